"""Command-line front end.

Every command writes one JSON document to stdout with a ``status`` field and
exits with the matching code: 0 ``ok``, 1 ``failed`` (a check did not pass),
2 ``error`` (bad input or structure), 3 ``refused`` (degenerate configuration
or refused move).  Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
from itertools import combinations

import numpy as np

from . import crgeom, crstruct, pentad, sampling, triangulation
from .dilog import bloch_wigner
from .errors import DegenerateConfigurationError, DomainError, StructuralError
from .jsonio import (
    complex_to_json,
    dumps,
    point_to_json,
    points_from_json,
    structure_to_json,
    triangulation_from_json,
    triangulation_to_json,
)

EXIT_CODES = {"ok": 0, "failed": 1, "error": 2, "refused": 3}
DEFAULT_TOL = 1e-9


class InputError(Exception):
    """Unparseable command line or input file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _pair_names(table):
    return [f"z{i}{j}" for (i, j) in sorted(table)]


# --- dilog ------------------------------------------------------------------


def _dilog_entry(z):
    res = bloch_wigner(z)
    return {"z": complex_to_json(z), "value": res.value, "estimated_error": res.estimated_error}


def cmd_dilog(args):
    if args.random is not None:
        rng = np.random.default_rng(args.seed)
        samples = [_dilog_entry(sampling.random_complex(rng)) for _ in range(args.random)]
        return {"status": "ok", "seed": args.seed, "samples": samples}
    if args.lobachevsky is not None:
        if args.z:
            raise InputError("give either z or --lobachevsky, not both")
        theta = args.lobachevsky
        if not math.isfinite(theta):
            raise InputError(f"angle must be finite, got {theta!r}")
        res = bloch_wigner(cmath.exp(2j * math.remainder(theta, math.pi)))
        return {"status": "ok", "theta": theta, "value": 0.5 * res.value, "estimated_error": 0.5 * res.estimated_error}
    if len(args.z) != 2:
        raise InputError("dilog needs z as two reals: RE IM")
    entry = _dilog_entry(complex(args.z[0], args.z[1]))
    return {"status": "ok", "value": entry["value"], "estimated_error": entry["estimated_error"]}


# --- simplex ----------------------------------------------------------------


def _simplex_payload(s, want_volume, want_branch, want_angles, tol):
    out = {"invariants": structure_to_json(s)}
    if want_volume:
        out["volume"] = crstruct.volume(s)
    if want_branch:
        out["branch"] = crstruct.classify_branch(s, tol).value
        out["branch_residuals"] = crstruct.branch_residuals(s)
    if want_angles:
        dec = crgeom.angle_decomposition(s)
        keys = sorted(dec["theta"])
        out["pairs"] = _pair_names(dec["theta"])
        out["theta"] = [dec["theta"][k] for k in keys]
        out["r"] = [dec["r"][k] for k in keys]
        out["angle_residuals"] = dec["residuals"]
    return out


def cmd_simplex(args):
    flags = (args.volume, args.classify, args.angles)
    if not any(flags):
        flags = (True, True, False)
    if args.random is not None:
        rng = np.random.default_rng(args.seed)
        samples = []
        for _ in range(args.random):
            s = crstruct.hyperbolic_lift(sampling.random_complex(rng), sampling.random_complex(rng))
            samples.append(_simplex_payload(s, *flags, args.tol))
        return {"status": "ok", "seed": args.seed, "samples": samples}
    values = []
    for name in ("z12", "z21", "z34", "z43"):
        pair = getattr(args, name)
        if pair is None:
            raise InputError(f"missing --{name}")
        values.append(complex(pair[0], pair[1]))
    s = crstruct.CrossRatioStructure(*values)
    return {"status": "ok", **_simplex_payload(s, *flags, args.tol)}


# --- config -----------------------------------------------------------------


def _config_payload(points, args):
    n = len(points)
    ids = [pid for pid, _ in points]
    pts = [p for _, p in points]
    wants = {k: getattr(args, k) for k in ("invariants", "cartan", "volume", "check_cr", "check_coboundary", "five_term")}
    if not any(wants.values()):
        wants["invariants"] = True
    if n not in (4, 5):
        raise InputError(f"need 4 or 5 points, got {n}")
    if wants["five_term"] and n != 5:
        raise InputError("--five-term needs 5 points")
    if (wants["check_cr"] or wants["check_coboundary"]) and n != 4:
        raise InputError("--check-cr and --check-coboundary need 4 points")
    tol = args.tol
    out = {"ids": ids}
    checks = {}

    if wants["cartan"]:
        out["cartan"] = {
            ",".join(ids[k] for k in tri): crgeom.cartan_invariant(*(pts[k] for k in tri))
            for tri in combinations(range(n), 3)
        }
    if n == 4:
        config = crgeom.cross_ratio_structure_of(*pts)
        s = config.structure
        if wants["invariants"]:
            out["invariants"] = structure_to_json(s)
            out["table"] = {f"z{i}{j}": complex_to_json(v) for (i, j), v in sorted(s.table.items())}
            out["kr_cross_ratio"] = complex_to_json(crgeom.kr_cross_ratio(*pts))
        if wants["volume"]:
            out["volume"] = crstruct.volume(s)
        if wants["check_cr"]:
            res = crgeom.cr_residuals(s)
            angles = crgeom.angle_decomposition(s)["residuals"]
            out["cr_residuals"] = res
            out["angle_residuals"] = angles
            out["similarity_residual"] = config.similarity_residual()
            worst = max(max(res.values()), config.similarity_residual())
            checks["cr"] = worst <= tol
            # the angle and sine equations lose a digit through arg and sin
            checks["angles"] = max(angles.values()) <= 10 * tol
        if wants["check_coboundary"]:
            terms = crgeom.coboundary_terms(pts)
            defect = abs(terms["cochain"] - terms["volume"])
            out["coboundary"] = {
                "cochain": terms["cochain"],
                "volume": terms["volume"],
                "face_sum": terms["face_sum"],
                "defect": defect,
            }
            checks["coboundary"] = defect <= tol
    else:
        coords, quint = pentad.from_five_points(*pts)
        if wants["invariants"]:
            out["columns"] = [structure_to_json(c) for c in quint.columns]
            out["coordinates"] = {k: complex_to_json(v) for k, v in coords.as_dict().items()}
        if wants["volume"]:
            out["volumes"] = quint.volumes()
            out["signs"] = list(quint.signs)
        if wants["five_term"]:
            defect = pentad.five_term_volume_defect(quint)
            out["five_term_defect"] = defect
            checks["five_term"] = defect <= tol
    if checks:
        out["checks"] = checks
    out["status"] = "ok" if all(checks.values()) else "failed"
    return out


def cmd_config(args):
    if args.random is not None:
        rng = np.random.default_rng(args.seed)
        samples = []
        for _ in range(args.random):
            pts = sampling.random_generic_points(rng, args.count, infinity_prob=0.1)
            points = [(f"p{k + 1}", p) for k, p in enumerate(pts)]
            payload = _config_payload(points, args)
            payload["points"] = [point_to_json(p, pid) for pid, p in points]
            samples.append(payload)
        status = "ok" if all(p["status"] == "ok" for p in samples) else "failed"
        return {"status": status, "seed": args.seed, "samples": samples}
    if args.file is None:
        raise InputError("config needs a points file or --random N")
    points = points_from_json(_load(args.file))
    return _config_payload(points, args)


# --- tri --------------------------------------------------------------------


def _labels(text, count, what):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if len(parts) != count:
        raise InputError(f"{what} needs {count} comma-separated vertex labels, got {text!r}")
    return tuple(parts)


def cmd_tri(args):
    t, a, positions = triangulation_from_json(_load(args.file))
    if args.action == "validate":
        edges = triangulation.validate_edge_compatibility(t, a, args.tol)
        faces = triangulation.validate_face_compatibility(t, a, args.tol)
        ok = edges.passed and faces.passed
        return {
            "status": "ok" if ok else "failed",
            "passed": ok,
            "edges": edges.to_json(),
            "faces": faces.to_json(),
        }
    if args.action == "volume":
        return {"status": "ok", "volume": triangulation.total_volume(t, a)}
    before = triangulation.total_volume(t, a)
    if args.action == "pachner23":
        if args.face is None:
            raise InputError("pachner23 needs --face a,b,c")
        t2, a2 = triangulation.pachner_23(t, a, _labels(args.face, 3, "--face"))
    else:
        if args.edge is None:
            raise InputError("pachner32 needs --edge a,b")
        t2, a2 = triangulation.pachner_32(t, a, _labels(args.edge, 2, "--edge"))
    after = triangulation.total_volume(t2, a2)
    return {
        "status": "ok",
        "triangulation": triangulation_to_json(t2, a2, positions),
        "volume_before": before,
        "volume_after": after,
        "volume_change": after - before,
    }


# --- plumbing ---------------------------------------------------------------


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crvolume", description="Volumes of cross-ratio structures.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def sampled(p):
        p.add_argument("--random", type=int, metavar="N", help="evaluate N seeded random samples")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("dilog", help="Bloch-Wigner dilogarithm D(z) or Lobachevsky function")
    p.add_argument("z", nargs="*", type=float, help="real and imaginary part of z")
    p.add_argument("--lobachevsky", type=float, metavar="THETA")
    sampled(p)
    p.set_defaults(func=cmd_dilog)

    p = sub.add_parser("simplex", help="one tetrahedron from its free parameters")
    for name in ("z12", "z21", "z34", "z43"):
        p.add_argument(f"--{name}", nargs=2, type=float, metavar=("RE", "IM"))
    p.add_argument("--volume", action="store_true")
    p.add_argument("--classify", action="store_true")
    p.add_argument("--angles", action="store_true")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sampled(p)
    p.set_defaults(func=cmd_simplex)

    p = sub.add_parser("config", help="configurations of 4 or 5 points of S^3")
    p.add_argument("file", nargs="?")
    p.add_argument("--invariants", action="store_true")
    p.add_argument("--cartan", action="store_true")
    p.add_argument("--volume", action="store_true")
    p.add_argument("--check-cr", action="store_true")
    p.add_argument("--check-coboundary", action="store_true")
    p.add_argument("--five-term", action="store_true")
    p.add_argument("--count", type=int, choices=(4, 5), default=4, help="points per random sample")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sampled(p)
    p.set_defaults(func=cmd_config)

    p = sub.add_parser("tri", help="triangulations: validate, volume, Pachner moves")
    p.add_argument("action", choices=("validate", "volume", "pachner23", "pachner32"))
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--face", help="comma-separated labels of an interior face")
    p.add_argument("--edge", help="comma-separated labels of an edge of degree 3")
    p.set_defaults(func=cmd_tri)
    return parser


def run(argv=None):
    """Returns ``(exit_code, payload)``; never raises for bad input."""
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "tol", DEFAULT_TOL) > 0:
            raise InputError("--tol must be positive")
        if getattr(args, "random", None) is not None and args.random < 0:
            raise InputError("--random must be non-negative")
        payload = args.func(args)
    except DegenerateConfigurationError as exc:
        payload = {"status": "refused", "message": str(exc)}
    except (InputError, DomainError, StructuralError, ValueError, TypeError) as exc:
        payload = {"status": "error", "message": str(exc)}
    return EXIT_CODES[payload["status"]], payload


def main(argv=None) -> int:
    code, payload = run(argv)
    if code in (2, 3):
        print(f"crvolume: {payload['message']}", file=sys.stderr)
    sys.stdout.write(dumps(payload) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
