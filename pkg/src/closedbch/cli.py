"""Command-line front end: classify, solve, verify, virasoro.

Exit codes: 0 success, 2 Jacobi violation (and argparse usage errors),
3 unparseable input, 4 no admissible alpha, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import oracle
from .algebra import ALL_TAGS, AlgebraSpec, classify, complex_to_json, jacobi_defect, jacobi_residual, sample_spec
from .closed_form import ClosedForm, compose3, select_principal, virasoro_compose, virasoro_explicit
from .errors import (
    AmbiguousClassification,
    BCHError,
    DegenerateDivision,
    InadmissibleOnly,
    JacobiViolation,
    PoleError,
)

log = logging.getLogger("closedbch")

EXIT_OK = 0
EXIT_JACOBI = 2
EXIT_PARSE = 3
EXIT_NO_ALPHA = 4
EXIT_VERIFY = 5


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = 1e-10
    oracle_order: int = 12
    oracle_scale: float = 0.05
    output_format: str = "json"
    seed: int = 0

    def __post_init__(self):
        if not 4 <= self.oracle_order <= 20:
            raise ValueError(f"order must lie in [4, 20], got {self.oracle_order}")
        if not 0 < self.tolerance <= 1e-4:
            raise ValueError(f"tolerance must lie in (0, 1e-4], got {self.tolerance}")
        if not self.oracle_scale > 0:
            raise ValueError("scale must be positive")
        if self.output_format not in ("json", "text"):
            raise ValueError(f"unknown format {self.output_format!r}")


class InputError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, complex):
        if x.imag == 0:
            return f"{x.real:.12g}"
        return f"{x.real:.12g}{x.imag:+.12g}j"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _jsonable(obj):
    if isinstance(obj, complex):
        return complex_to_json(obj)
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _text_lines(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, dict) or (isinstance(v, list) and v and not _is_flat(v)):
                lines.append(f"{pad}{k}:")
                lines.extend(_text_lines(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar_text(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            lines.append(f"{pad}- [{i}]")
            lines.extend(_text_lines(v, indent + 1))
    else:
        lines.append(pad + _scalar_text(obj))
    return lines


def _is_flat(v) -> bool:
    return _is_pair(v) or all(not isinstance(x, (dict, list)) or _is_pair(x) for x in v)


def _is_pair(v) -> bool:
    return isinstance(v, list) and len(v) == 2 and all(isinstance(x, float) for x in v)


def _scalar_text(v) -> str:
    if _is_pair(v):
        return _fmt(complex(v[0], v[1]))
    if isinstance(v, list):
        return ", ".join(_scalar_text(x) for x in v) if v else "-"
    return _fmt(v)


def emit(report: dict, cfg: RunConfig, out=None) -> None:
    out = sys.stdout if out is None else out
    data = _jsonable(report)
    if cfg.output_format == "json":
        out.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        out.write("\n".join(_text_lines(data)) + "\n")


def load_spec(path: str) -> AlgebraSpec:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
        return AlgebraSpec.from_json_dict(json.loads(text))
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        raise InputError(f"cannot read spec from {path}: {exc}") from exc


def _spec_from_args(args, cfg: RunConfig) -> AlgebraSpec:
    if args.input is not None:
        return load_spec(args.input)
    if args.type is not None:
        return sample_spec(args.type, cfg.seed, cfg.oracle_scale)
    raise InputError("give --input FILE or --type TAG")


# -- commands ---------------------------------------------------------------

def cmd_classify(spec: AlgebraSpec, cfg: RunConfig) -> dict:
    res = jacobi_residual(spec)
    report = {
        "spec": spec.to_json_dict(),
        "jacobi_residual": list(res.as_tuple()),
        "jacobi_defect": jacobi_defect(spec),
    }
    atype = classify(spec)
    report.update({
        "type": atype.tag.value,
        "dimension": atype.dimension,
        "free": list(atype.free_params),
        "case": atype.case,
        "constrained": atype.constraints,
        "summary": f"{atype.tag.value}, D={atype.dimension}, free: {','.join(atype.free_params) or '-'}",
    })
    return report


def _form_report(cf: ClosedForm) -> dict:
    return cf.to_json()


def cmd_solve(spec: AlgebraSpec, cfg: RunConfig) -> dict:
    atype = classify(spec)
    forms = compose3(spec, atype)
    return {
        "spec": spec.to_json_dict(),
        "type": atype.tag.value,
        "solutions": [_form_report(cf) for cf in forms],
    }


def _check_forms(spec: AlgebraSpec, forms: list[ClosedForm], cfg: RunConfig) -> dict:
    principal, errs = select_principal(forms, cfg.oracle_order)
    ref = oracle.series_coefficients(spec, cfg.oracle_order)
    entries = []
    for cf, err in zip(forms, errs):
        entry = {
            "alpha": complex_to_json(cf.alpha.alpha) if cf.alpha else None,
            "branch": str(cf.alpha.branch) if cf.alpha else None,
            "principal": cf is principal,
            "series_discrepancy": {k: abs(cf.coefficients()[i] - ref[i]) for i, k in enumerate("ABCD")},
            "series_max": err,
            "series_pass": err <= cfg.tolerance,
        }
        cf.verified["series"] = entry["series_pass"]
        entries.append(entry)
    worst = float(min(errs))
    ok = worst <= cfg.tolerance
    report = {"type": forms[0].type.tag.value, "forms": entries, "worst": worst}
    rep = oracle.rep_for_spec(spec)
    if rep is not None:
        dev = oracle.verify_matrix(rep, principal)
        report["matrix"] = {"rep": rep.name, "discrepancy": dev, "pass": dev <= cfg.tolerance}
        principal.verified["matrix"] = dev <= cfg.tolerance
        ok = ok and dev <= cfg.tolerance
        report["worst"] = max(worst, dev)
    report["pass"] = ok
    return report


def cmd_verify(spec: AlgebraSpec | None, cfg: RunConfig, run_all: bool = False, seeds: int = 25) -> dict:
    if not run_all:
        forms = compose3(spec)
        report = _check_forms(spec, forms, cfg)
        report["spec"] = spec.to_json_dict()
        return report
    results, ok, worst = [], True, 0.0
    for tag in ALL_TAGS:
        for seed in range(cfg.seed, cfg.seed + seeds):
            sp = sample_spec(tag, seed, cfg.oracle_scale)
            r = _check_forms(sp, compose3(sp), cfg)
            log.info("%s seed %d worst %.3e", tag.value, seed, r["worst"])
            results.append({"type": tag.value, "seed": seed, "worst": r["worst"], "pass": r["pass"]})
            ok = ok and r["pass"]
            worst = max(worst, r["worst"])
    return {"cases": results, "count": len(results), "worst": worst, "pass": ok,
            "scale": cfg.oracle_scale, "order": cfg.oracle_order}


def cmd_virasoro(k: int, lm: float, l0: float, lk: float, central: float, cfg: RunConfig) -> dict:
    if k == 0:
        raise ValueError("k must be nonzero")
    cf = virasoro_compose(k, lm, l0, lk, central)
    ex = virasoro_explicit(k, lm, l0, lk, central)
    report = {
        "k": k, "lambda_minus_k": lm, "lambda_0": l0, "lambda_k": lk, "central": central,
        "spec": cf.spec.to_json_dict(),
        "factors": cf.factors,
        "closed_form": cf.to_json(),
        "lambda_plus": ex.lambdas[0], "lambda_minus": ex.lambdas[1],
        "c_k": ex.c_k,
    }
    if ex.roots is not None:
        report["roots"] = list(ex.roots)
    checks = {}
    ref = oracle.series_coefficients(cf.spec, cfg.oracle_order, factors=cf.factors)
    checks["series"] = float(np.max(np.abs(cf.coefficients() - ref)))
    checks["explicit"] = float(np.max(np.abs(cf.coefficients() - ex.coefficients)))
    if k in (1, -1):
        rep = oracle.sl2_virasoro_rep(lm, l0, lk, k)
        checks["matrix"] = oracle.verify_matrix(rep, cf)
    # the truncated series is only meaningful at small parameters
    small = max(abs(lm), abs(l0), abs(lk)) <= cfg.oracle_scale
    gating = {n: v for n, v in checks.items() if n != "series" or small}
    report["checks"] = checks
    report["pass"] = all(v <= cfg.tolerance for v in gating.values())
    return report


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--tolerance", type=float, default=1e-10)
    common.add_argument("--order", type=int, default=12, help="truncation order of the series oracle")
    common.add_argument("--scale", type=float, default=0.05, help="parameter scale for sampled specs")
    common.add_argument("--seed", type=int, default=0)

    src = argparse.ArgumentParser(add_help=False)
    src.add_argument("--input", help="spec JSON file, '-' for stdin")
    src.add_argument("--type", choices=[t.value for t in ALL_TAGS], help="sample a spec of this type")

    ap = argparse.ArgumentParser(prog="closedbch", description="Closed-form BCH coefficients for three exponentials.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common, src], help="Jacobi check and type")
    sub.add_parser("solve", parents=[common, src], help="closed forms for every admissible alpha")
    pv = sub.add_parser("verify", parents=[common, src], help="compare against the oracles")
    pv.add_argument("--all", action="store_true", help="sweep all types over --seeds seeds")
    pv.add_argument("--seeds", type=int, default=25)
    pr = sub.add_parser("virasoro", parents=[common], help="exp(l_-k L_-k) exp(l_0 L_0) exp(l_k L_k)")
    pr.add_argument("--k", type=int, default=1)
    pr.add_argument("--lm", type=float, default=0.1, help="lambda_{-k}")
    pr.add_argument("--l0", type=float, default=0.1, help="lambda_0")
    pr.add_argument("--lk", type=float, default=0.1, help="lambda_k")
    pr.add_argument("--central", type=float, default=0.0)
    return ap


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("BCH_LOG", "WARNING").upper(), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = RunConfig(args.tolerance, args.order, args.scale, args.format, args.seed)
    except ValueError as exc:
        ap.error(str(exc))
    if args.command == "virasoro" and args.k == 0:
        ap.error("k must be nonzero")

    try:
        if args.command == "virasoro":
            report = cmd_virasoro(args.k, args.lm, args.l0, args.lk, args.central, cfg)
        elif args.command == "verify" and args.all:
            report = cmd_verify(None, cfg, run_all=True, seeds=args.seeds)
        else:
            spec = _spec_from_args(args, cfg)
            if args.command == "classify":
                report = cmd_classify(spec, cfg)
            elif args.command == "solve":
                report = cmd_solve(spec, cfg)
            else:
                report = cmd_verify(spec, cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except JacobiViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_JACOBI
    except AmbiguousClassification as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InadmissibleOnly, DegenerateDivision, PoleError) as exc:
        print(f"error: no admissible alpha: {exc}", file=sys.stderr)
        return EXIT_NO_ALPHA
    except BCHError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY if args.command == "verify" else EXIT_NO_ALPHA

    emit(report, cfg)
    if args.command in ("verify", "virasoro") and not report["pass"]:
        print(f"verification failed: worst discrepancy {report.get('worst', max(report.get('checks', {0: 0}).values())):.3e}",
              file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
