"""Command-line interface for analyzing a cubic threefold.

``cubic-defect analyze <poly|@file>`` parses the cubic, runs the requested
commands in dependency order (singular -> defect -> hodge / surfaces; lines
after singular) and prints a human-readable summary.  The full report
(JSON, ``schema: 1``) is written to ``--json`` and is byte-identical across
runs with the same request and seed; wall-clock timings appear only in the
summary.  Exit codes: 0 success, 2 parse error, 3 pipeline error,
4 certification failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import fields as dataclass_fields
from fractions import Fraction

from .defect import (
    DefectDisagreement,
    DefectError,
    SmoothCubicError,
    compute_defect,
    hodge_numbers,
)
from .forms import FormError, ParseError, parse_form
from .geometry import (
    GeometryError,
    LineError,
    conic_bundle,
    good_line_test,
    sample_good_lines,
    surfaces_from_record,
    very_good_test,
)
from .singular import SingularityError, analyze_singularities
from .tracker import TrackerSettings, TrackingError

SCHEMA = 1
ALL_COMMANDS = ("singular", "defect", "hodge", "surfaces", "lines")
DEFAULT_COMMANDS = ("singular", "defect", "hodge", "surfaces")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PIPELINE = 3
EXIT_CERTIFICATION = 4


class CliParseError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# request parsing
# ---------------------------------------------------------------------------

def _build_parser():
    ap = argparse.ArgumentParser(
        prog="cubic-defect",
        description="Defect, singularities and Hodge-Du Bois numbers of "
                    "cubic threefolds.")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    an = sub.add_parser("analyze", help="analyze one cubic threefold")
    an.add_argument("cubic",
                    help="polynomial in x0..x4, or @file containing one")
    an.add_argument("--commands", default=",".join(DEFAULT_COMMANDS),
                    help="comma-separated subset of %s (default: all but "
                         "lines)" % ",".join(ALL_COMMANDS))
    an.add_argument("--seed", type=int, default=None,
                    help="random seed (default: fresh, echoed in the report)")
    an.add_argument("--json", dest="json_path", default=None,
                    help="write the full JSON report to this path")
    an.add_argument("--tol", action="append", default=[],
                    metavar="KEY=VALUE",
                    help="tracker setting override, e.g. corrector_tol=1e-12")
    an.add_argument("--line", default=None, metavar="P0;P1",
                    help="line for the lines command, as two projective "
                         "points of rational coordinates 'a,b,c,d,e;...'")
    an.add_argument("--sample", type=int, default=1,
                    help="number of good lines to sample for the lines "
                         "command when --line is absent (default 1)")
    return ap


def _parse_settings(tol_args):
    valid = {f.name for f in dataclass_fields(TrackerSettings)}
    overrides = {}
    for item in tol_args:
        key, sep, value = item.partition("=")
        if not sep or key not in valid:
            raise CliParseError("unknown tracker setting %r (valid: %s)"
                                % (key, ", ".join(sorted(valid))))
        field_type = int if key == "max_steps" else float
        try:
            overrides[key] = field_type(value)
        except ValueError:
            raise CliParseError("bad value for tracker setting %r: %r"
                                % (key, value))
    try:
        return TrackerSettings(**overrides), overrides
    except ValueError as exc:
        raise CliParseError(str(exc))


def _parse_point(text):
    coords = [Fraction(c) for c in text.split(",")]
    if len(coords) != 5 or all(c == 0 for c in coords):
        raise ValueError
    return coords


def _parse_line(text):
    try:
        p0_text, p1_text = text.split(";")
        return _parse_point(p0_text), _parse_point(p1_text)
    except (ValueError, ZeroDivisionError):
        raise CliParseError(
            "bad --line: expected two nonzero projective points of five "
            "rational coordinates, e.g. '1,0,0,0,0;0,1,0,0,0'")


def parse_request(argv):
    """Parsed and validated request: (namespace, form, commands, settings,
    overrides, line)."""
    ns = _build_parser().parse_args(argv)
    commands = []
    for c in ns.commands.split(","):
        c = c.strip()
        if c not in ALL_COMMANDS:
            raise CliParseError("unknown command %r (valid: %s)"
                                % (c, ", ".join(ALL_COMMANDS)))
        if c not in commands:
            commands.append(c)
    if not commands:
        raise CliParseError("at least one command is required")
    source = ns.cubic
    if source.startswith("@"):
        try:
            with open(source[1:]) as fh:
                source = fh.read()
        except OSError as exc:
            raise CliParseError("cannot read %s: %s" % (source[1:], exc))
    try:
        f = parse_form(source, nvars=5)
    except (ParseError, FormError) as exc:
        raise CliParseError("bad polynomial: %s" % exc)
    if f.degree != 3 or f.is_zero():
        raise CliParseError("expected a nonzero homogeneous cubic in "
                            "x0..x4, got degree %d" % f.degree)
    settings, overrides = _parse_settings(ns.tol)
    line = _parse_line(ns.line) if ns.line else None
    return ns, f, commands, settings, overrides, line


# ---------------------------------------------------------------------------
# JSON-safe serialization
# ---------------------------------------------------------------------------

def _num(c):
    if isinstance(c, Fraction):
        return str(c) if c.denominator != 1 else str(c.numerator)
    if isinstance(c, int):
        return str(c)
    return repr(complex(c))


def _point(coords):
    return [_num(c) for c in coords]


def _singular_payload(points):
    out = []
    for p in points:
        out.append({
            "location": _point(p.location),
            "exact": p.exact,
            "corank": p.corank,
            "milnor": p.milnor,
            "label": p.label,
            "b11": p.b11,
            "l11": p.l11,
            "certification": "exact" if p.exact else "numeric",
        })
    return out


def _projection_payload(rec):
    return {
        "point": _point(rec.point),
        "exact": rec.exact,
        "corank": rec.corank,
        "quadric": rec.quadric,
        "nonreduced": rec.nonreduced,
        "k": rec.k,
        "sigma": rec.sigma,
        "block_degrees": rec.block_degrees,
        "certified": rec.certified,
    }


def _defect_payload(report):
    payload = {
        "sigma": report.sigma,
        "cone": report.cone,
        "certification": report.certification,
    }
    if report.cone_detail:
        payload["cone_detail"] = report.cone_detail
    if report.primary is not None:
        payload["primary"] = _projection_payload(report.primary)
        payload["recomputations"] = [_projection_payload(r)
                                     for r in report.recomputations]
    return payload


def _hodge_payload(h):
    payload = {"mu_tot": h.mu_tot, "sigma": h.sigma, "h3": h.h3,
               "complete": h.complete}
    if h.complete:
        payload.update(B=h.B, L=h.L, h12=h.h12, h21=h.h21)
    return payload


def _surfaces_payload(v):
    return {
        "contains_plane": v.contains_plane,
        "contains_scroll": v.contains_scroll,
        "pattern": v.pattern,
        "sigma_consistent": v.sigma_consistent,
        "certification": "certified-numeric",
    }


def _line_payload(p0, p1, good, verdict):
    payload = {
        "line": [_point(p0), _point(p1)],
        "good": good.good,
        "good_reason": good.reason,
        "criterion_note": good.note,
    }
    if good.witness_y is not None:
        payload["witness_y"] = _point(good.witness_y)
    if verdict is not None:
        payload.update({
            "irreducible": verdict.irreducible,
            "cover_connected": verdict.cover_connected,
            "very_good": verdict.very_good,
            "components": verdict.components,
            "cover_loops": verdict.cover_loops,
            "certification": "probabilistic"
            if "probabilistic" in (verdict.irreducible +
                                   verdict.cover_connected)
            else "certified-numeric",
        })
    return payload


# ---------------------------------------------------------------------------
# the pipeline
# ---------------------------------------------------------------------------

def _run_lines(f, line, sample, points, seed, settings):
    if line is not None:
        p0, p1 = line
        cb = conic_bundle(f, p0, p1)
        good = good_line_test(cb, seed=seed, settings=settings)
        verdict = None
        if good.good == "yes":
            verdict = very_good_test(cb, seed=seed, settings=settings)
        return [_line_payload(p0, p1, good, verdict)]
    sampled = sample_good_lines(f, sample, seed=seed, settings=settings,
                                singular_points=points)
    if not sampled:
        raise GeometryError("no good line found")
    out = []
    for p0, v, cb, good in sampled:
        verdict = very_good_test(cb, seed=seed, settings=settings)
        out.append(_line_payload(p0, v, good, verdict))
    return out


def run_pipeline(f, commands, seed, settings, line=None, sample=1):
    """Execute the commands; returns (results, errors, timings, exit_code).

    Command failures are recorded without aborting the others; a
    certification failure (per-point sigma disagreement, Hodge
    inconsistency) trumps other exit codes.
    """
    results, errors, timings = {}, {}, {}
    exit_code = EXIT_OK

    def run(name, thunk):
        nonlocal exit_code
        t0 = time.monotonic()
        try:
            results[name] = thunk()
        except (DefectDisagreement,) as exc:
            errors[name] = "certification failure: %s" % exc
            exit_code = EXIT_CERTIFICATION
        except (DefectError, SingularityError, GeometryError, LineError,
                TrackingError, FormError) as exc:
            errors[name] = str(exc)
            if exit_code == EXIT_OK:
                exit_code = EXIT_PIPELINE
        timings[name] = time.monotonic() - t0
        return results.get(name)

    t0 = time.monotonic()
    try:
        points = analyze_singularities(f, seed=seed, settings=settings)
    except (SingularityError, TrackingError, FormError) as exc:
        errors["singular"] = str(exc)
        timings["singular"] = time.monotonic() - t0
        return results, errors, timings, EXIT_PIPELINE
    if "singular" in commands:
        timings["singular"] = time.monotonic() - t0
        results["singular"] = _singular_payload(points)

    defect_report = None
    smooth_note = None
    if {"defect", "hodge", "surfaces", "lines"} & set(commands):
        t0 = time.monotonic()
        try:
            defect_report = compute_defect(f, seed=seed, settings=settings,
                                           points=points)
        except SmoothCubicError as exc:
            smooth_note = str(exc)
        except DefectDisagreement as exc:
            errors["defect"] = "certification failure: %s" % exc
            exit_code = EXIT_CERTIFICATION
        except (DefectError, SingularityError, TrackingError) as exc:
            errors["defect"] = str(exc)
            exit_code = EXIT_PIPELINE
        timings["defect"] = time.monotonic() - t0

    if "defect" in commands and "defect" not in errors:
        results["defect"] = ({"sigma": None, "note": smooth_note}
                             if defect_report is None
                             else _defect_payload(defect_report))

    if "hodge" in commands:
        sigma = defect_report.sigma if defect_report else None
        run("hodge", lambda: _hodge_payload(hodge_numbers(points, sigma)))

    if "surfaces" in commands:
        if defect_report is None:
            results["surfaces"] = {"skipped": smooth_note
                                   or errors.get("defect", "no defect")}
        elif defect_report.cone:
            results["surfaces"] = {
                "skipped": "cone: the surface verdict applies to non-cones "
                           "(sigma = 6 already decides Theorem 1.3)"}
        else:
            run("surfaces", lambda: _surfaces_payload(surfaces_from_record(
                defect_report.primary, sigma=defect_report.sigma,
                seed=seed, settings=settings)))

    if "lines" in commands:
        if defect_report is not None and defect_report.cone:
            results["lines"] = {
                "skipped": "cone: every line through the vertex meets the "
                           "singular locus, so no line is good"}
        else:
            run("lines", lambda: _run_lines(f, line, sample, points,
                                            seed, settings))
    return results, errors, timings, exit_code


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------

def _summary(report, timings, out=sys.stdout):
    w = out.write
    w("cubic: %s\n" % report["input"])
    w("seed: %d\n" % report["seed"])
    results, errors = report["results"], report["errors"]
    if "singular" in results:
        pts = results["singular"]
        w("singular: %d point(s)%s\n" % (
            len(pts), "" if pts else " (smooth)"))
        for p in pts:
            w("  [%s]  corank %s  mu %s  %s\n" % (
                ":".join(p["location"]), p["corank"], p["milnor"],
                p["label"]))
    if "defect" in results:
        d = results["defect"]
        if d["sigma"] is None:
            w("defect: undefined (%s)\n" % d["note"])
        else:
            w("defect: sigma = %d (%s)%s\n" % (
                d["sigma"], d["certification"],
                "  [cone]" if d["cone"] else ""))
    if "hodge" in results:
        h = results["hodge"]
        w("hodge: mu_tot = %d, h3 = %d" % (h["mu_tot"], h["h3"]))
        if h["complete"]:
            w(", h12 = %d, h21 = %d" % (h["h12"], h["h21"]))
        w("\n")
    if "surfaces" in results:
        s = results["surfaces"]
        if "skipped" in s:
            w("surfaces: skipped (%s)\n" % s["skipped"])
        else:
            w("surfaces: plane %s, scroll %s (%s)\n" % (
                s["contains_plane"], s["contains_scroll"], s["pattern"]))
    if "lines" in results:
        ls = results["lines"]
        if isinstance(ls, dict) and "skipped" in ls:
            w("lines: skipped (%s)\n" % ls["skipped"])
        else:
            for entry in ls:
                w("line %s -- %s: good %s" % (
                    ",".join(entry["line"][0]), ",".join(entry["line"][1]),
                    entry["good"]))
                if "very_good" in entry:
                    w(", very_good %s (D_l irreducible %s, cover %s)" % (
                        entry["very_good"], entry["irreducible"],
                        entry["cover_connected"]))
                w("\n")
    for name, msg in errors.items():
        w("error [%s]: %s\n" % (name, msg))
    for name, dt in timings.items():
        w("time [%s]: %.2fs\n" % (name, dt))


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        ns, f, commands, settings, overrides, line = parse_request(argv)
    except CliParseError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE
    seed = ns.seed if ns.seed is not None else random.SystemRandom().\
        randrange(2 ** 31)
    results, errors, timings, exit_code = run_pipeline(
        f, commands, seed, settings, line=line, sample=ns.sample)
    report = {
        "schema": SCHEMA,
        "input": f.to_string(),
        "commands": list(commands),
        "seed": seed,
        "settings": overrides,
        "results": results,
        "errors": errors,
    }
    _summary(report, timings)
    if ns.json_path:
        with open(ns.json_path, "w") as fh:
            json.dump(report, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
