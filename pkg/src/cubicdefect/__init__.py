"""Analysis of cubic threefolds with isolated singularities.

Finds and classifies singular points, computes the defect sigma(X) from the
irreducible-component count of the projection curve C_q, derives the
Hodge-Du Bois numbers of H^3, detects planes and rational normal cubic
scrolls, and tests lines for the good / very-good property via the conic
bundle discriminant quintic.
"""

__version__ = "0.1.0"

from .forms import Form, FormError, LinearChange, ParseError, parse_form

__all__ = ["Form", "FormError", "LinearChange", "ParseError", "parse_form",
           "__version__"]
