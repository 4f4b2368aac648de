"""Command line front end: ``witgen check|witten|theta-verify|residue-demo``.

Model files are JSON::

    {"builtin": {"kind": "projective_space", "params": {"n": 3}},
     "degrees": [[2]],
     "options": {"q_order": 8, "seed": 0}}

or with an explicit ``"fan": {"dim": 2, "rays": [[1, 0], ...], "max_cones": [[0, 1], ...]}``
in place of ``"builtin"``.  Reports are JSON with exact rationals written as
``"p/q"`` strings.  Errors go to stderr as ``{"error": {"code": ..., ...}}``.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from fractions import Fraction
from typing import Any

from . import genus, theta, toric
from .genus import CIModel, ModelError
from .ringcore import MPoly, QSeries
from .toric import FanValidationError, InconsistencyError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INCONSISTENT = 3

_RATIONAL = re.compile(r"^-?\d+/\d+$")


class CLIError(Exception):
    def __init__(self, code: str, message: str, status: int = EXIT_VALIDATION, **detail):
        super().__init__(message)
        self.code = code
        self.status = status
        self.detail = detail


# -- serialization ----------------------------------------------------------


def _encode(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, float, str)):
        return obj
    if isinstance(obj, QSeries):
        return [_encode(c) for c in obj]
    if isinstance(obj, MPoly):
        return [
            {"exponent": list(e), "coeff": _encode(c if isinstance(c, Fraction) else Fraction(c))}
            for e, c in sorted(obj.items())
        ]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _decode(obj: Any) -> Any:
    if isinstance(obj, str) and _RATIONAL.match(obj):
        return Fraction(obj)
    if isinstance(obj, dict):
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


def dump_report(report: dict) -> str:
    return json.dumps(_encode(report), indent=2)


def load_report(text: str) -> dict:
    return _decode(json.loads(text))


# -- model parsing ----------------------------------------------------------


def _int_matrix(value, path: str, code: str) -> list[list[int]]:
    if not isinstance(value, list):
        raise CLIError(code, f"{path} must be a list of integer lists", path=path)
    out = []
    for i, row in enumerate(value):
        if not isinstance(row, list):
            raise CLIError(code, f"{path}[{i}] must be a list", path=f"{path}[{i}]")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, int):
                raise CLIError(code, f"{path}[{i}][{j}] must be an integer", path=f"{path}[{i}][{j}]")
        out.append(list(row))
    return out


def _builtin(spec: dict) -> tuple[toric.Fan, toric.PicardData | None]:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise CLIError("bad_model", "builtin needs a 'kind'", path="$.builtin")
    kind = spec["kind"]
    params = spec.get("params", {})
    try:
        if kind == "projective_space":
            return toric.projective_space(int(params["n"])), None
        if kind == "product_projective":
            return toric.product_projective([int(d) for d in params["dims"]])
        if kind == "hirzebruch":
            return toric.hirzebruch(int(params["a"])), None
    except (KeyError, TypeError, ValueError) as exc:
        raise CLIError("bad_model", f"bad params for builtin {kind!r}: {exc}", path="$.builtin.params")
    raise CLIError("bad_model", f"unknown builtin kind {kind!r}", path="$.builtin.kind")


def _explicit_fan(spec: dict) -> toric.Fan:
    if not isinstance(spec, dict):
        raise CLIError("bad_model", "fan must be an object", path="$.fan")
    for key in ("dim", "rays", "max_cones"):
        if key not in spec:
            raise CLIError("bad_model", f"fan is missing {key!r}", path=f"$.fan.{key}")
    dim = spec["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int):
        raise CLIError("bad_model", "fan.dim must be an integer", path="$.fan.dim")
    rays = _int_matrix(spec["rays"], "$.fan.rays", "bad_ray")
    cones = _int_matrix(spec["max_cones"], "$.fan.max_cones", "bad_cone")
    for i, cone in enumerate(cones):
        for j, idx in enumerate(cone):
            if idx < 0 or idx >= len(rays):
                raise CLIError(
                    "bad_cone",
                    f"cone {i} references ray {idx}, but only {len(rays)} rays exist",
                    path=f"$.fan.max_cones[{i}][{j}]",
                )
    return toric.Fan(dim, tuple(map(tuple, rays)), tuple(map(tuple, cones)))


def parse_model(data: Any) -> tuple[CIModel, dict]:
    """Validated model and its options from decoded JSON."""
    if not isinstance(data, dict):
        raise CLIError("bad_model", "model must be a JSON object", path="$")
    if ("builtin" in data) == ("fan" in data):
        raise CLIError("bad_model", "model needs exactly one of 'builtin' or 'fan'", path="$")
    if "builtin" in data:
        fan, pd = _builtin(data["builtin"])
    else:
        fan, pd = _explicit_fan(data["fan"]), None
    options = data.get("options", {})
    if not isinstance(options, dict):
        raise CLIError("bad_model", "options must be an object", path="$.options")
    seed = options.get("seed", 0)
    try:
        toric.validate_fan(fan, seed=seed)
    except FanValidationError as exc:
        raise CLIError(exc.code, str(exc), path="$.fan" if "fan" in data else "$.builtin", **exc.detail)
    if pd is None:
        pd = toric.picard_data(fan)
    degrees = _int_matrix(data.get("degrees", []), "$.degrees", "bad_degrees")
    try:
        ci = CIModel(fan, pd, tuple(map(tuple, degrees)))
    except ModelError as exc:
        raise CLIError(exc.code, str(exc), path="$.degrees")
    return ci, options


def load_model(path: str) -> tuple[CIModel, dict]:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CLIError("io_error", str(exc), path=path)
    except json.JSONDecodeError as exc:
        raise CLIError("bad_json", exc.msg, line=exc.lineno, column=exc.colno)
    return parse_model(data)


def parse_tau(text: str) -> complex:
    s = text.strip().replace(" ", "")
    s = re.sub(r"(^|[+-])i$", r"\g<1>1i", s)
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise CLIError("bad_tau", f"cannot parse tau {text!r}")


# -- commands ---------------------------------------------------------------


def _check_section(ci: CIModel) -> dict:
    pd = ci.pd
    obs = genus.string_check(ci)
    return {
        "fan": {
            "valid": True,
            "dim": ci.fan.dim,
            "rays": [list(u) for u in ci.fan.rays],
            "max_cones": [list(c) for c in ci.fan.max_cones],
        },
        "picard": {
            "k": pd.k,
            "basis_rays": list(pd.basis_rays),
            "m_matrix": [list(r) for r in pd.m_matrix],
            "reorder_map": list(pd.reorder_map),
            "m_matrix_reordered": [list(r) for r in pd.reordered_m()],
        },
        "degrees": [list(r) for r in ci.degrees],
        "obstructions": {
            "offdiag": [list(r) for r in obs.offdiag],
            "diag": list(obs.diag),
            "parity": list(obs.parity),
        },
        "verdict": obs.verdict,
    }


def cmd_check(ci: CIModel, options: dict) -> dict:
    return {"command": "check", **_check_section(ci)}


def cmd_witten(
    ci: CIModel,
    options: dict,
    q_order: int | None = None,
    with_oracle: bool = False,
    with_table: bool = False,
    timings: bool = False,
) -> dict:
    seed = options.get("seed", 0)
    N = q_order if q_order is not None else options.get("q_order", genus.default_q_order(ci))
    if N < 0:
        raise CLIError("bad_q_order", "q-order must be >= 0")
    rep = genus.genus_report(ci, N, seed=seed, timings=timings)
    out = {
        "command": "witten",
        **_check_section(ci),
        "q_order": N,
        "witten_genus": list(rep.witten_genus),
        "ahat": rep.ahat,
        "w2": rep.w2_poly,
        "p1": rep.p1_poly,
        "metadata": rep.metadata,
    }
    if with_oracle:
        M = min(N, genus.ORACLE_MAX_ORDER)
        oracle = genus.witten_bundle_oracle(ci, M, seed)
        out["oracle"] = {
            "q_order": M,
            "coefficients": list(oracle),
            "agree": list(oracle) == list(rep.witten_genus)[: M + 1],
        }
    if with_table:
        table = toric.intersection_table(ci.fan, ci.pd, seed)
        out["intersection_table"] = [
            {"exponent": list(e), "value": v} for e, v in sorted(table.values.items())
        ]
    return out


SAMPLE_V = (0.3 + 0.1j, 0.2, -0.17 + 0.05j)


def cmd_theta_verify(taus: list[complex], tol: float) -> dict:
    results = []
    ok_all = True
    for tau in taus:
        try:
            jac = theta.jacobi_identity_residual(tau)
        except theta.DomainError as exc:
            raise CLIError("domain_error", str(exc), tau=str(tau))
        worst = 0.0
        rows = []
        for kind in theta.ThetaKind:
            for m in (-1, 0, 1):
                for n in (-1, 0, 1):
                    res = max(theta.translation_law_residual(kind, v, tau, m, n) for v in SAMPLE_V)
                    worst = max(worst, res)
                    rows.append({"kind": kind.value, "m": m, "n": n, "residual": res})
        ok = jac < tol and worst < tol
        ok_all = ok_all and ok
        results.append(
            {"tau": {"re": tau.real, "im": tau.imag}, "jacobi_residual": jac,
             "translation": rows, "max_translation_residual": worst, "pass": ok}
        )
    return {"command": "theta-verify", "tol": tol, "results": results, "pass": ok_all}


def cmd_residue_demo(ci: CIModel, tau: complex) -> dict:
    try:
        rep = genus.residue_sum_demo(ci, tau)
    except ModelError as exc:
        raise CLIError(exc.code, str(exc))
    except theta.DomainError as exc:
        raise CLIError("domain_error", str(exc))
    except genus.ConditioningError as exc:
        raise CLIError("conditioning", str(exc))
    obs = genus.string_check(ci)
    return {
        "command": "residue-demo",
        "tau": {"re": tau.real, "im": tau.imag},
        "verdict": obs.verdict,
        "is_elliptic": rep.is_elliptic,
        "ellipticity_deviation": rep.ellipticity_deviation,
        "residue_sum": rep.residue_sum,
        "origin_residue": rep.origin_residue,
        "poles": rep.poles,
    }


# -- entry point ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError("bad_arguments", message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="witgen", description="Witten genus of toric complete intersections")
    parser.add_argument("-o", "--output", help="write the report here instead of stdout")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a model and run the string check")
    p.add_argument("model")

    p = sub.add_parser("witten", help="Witten genus q-expansion")
    p.add_argument("model")
    p.add_argument("--q-order", type=int, default=None)
    p.add_argument("--with-oracle", action="store_true")
    p.add_argument("--with-table", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-identity)")

    p = sub.add_parser("theta-verify", help="numeric theta identities")
    p.add_argument("--tau", default="i,2i,0.5+i")
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("residue-demo", help="ellipticity and residue sum (Picard rank 1)")
    p.add_argument("model")
    p.add_argument("--tau", default="2i")
    return parser


def run(args: argparse.Namespace) -> tuple[int, dict]:
    status = EXIT_OK
    if args.command == "theta-verify":
        taus = [parse_tau(t) for t in args.tau.split(",") if t.strip()]
        report = cmd_theta_verify(taus, args.tol)
        if not report["pass"]:
            status = EXIT_INCONSISTENT
        return status, report
    ci, options = load_model(args.model)
    if getattr(args, "seed", None) is not None:
        options = {**options, "seed": args.seed}
    if args.command == "check":
        return status, cmd_check(ci, options)
    if args.command == "witten":
        report = cmd_witten(ci, options, args.q_order, args.with_oracle, args.with_table, args.timings)
        if args.with_oracle and not report["oracle"]["agree"]:
            status = EXIT_INCONSISTENT
        return status, report
    return status, cmd_residue_demo(ci, parse_tau(args.tau))


def _fail(code: str, message: str, status: int, **detail) -> int:
    print(json.dumps({"error": _encode({"code": code, "message": message, **detail})}), file=sys.stderr)
    return status


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except CLIError as exc:
        return _fail(exc.code, str(exc), exc.status)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        status, report = run(args)
    except CLIError as exc:
        return _fail(exc.code, str(exc), exc.status, **exc.detail)
    except InconsistencyError as exc:
        return _fail("inconsistency", str(exc), EXIT_INCONSISTENT)
    except Exception as exc:  # anything unexpected still gets a code
        logging.getLogger(__name__).debug("unhandled error", exc_info=True)
        return _fail("internal_error", f"{type(exc).__name__}: {exc}", EXIT_INCONSISTENT)
    text = dump_report(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
