"""Command-line surface: exact counts, density brackets, certificates,
decomposition ledgers, square-multiple scans and grid sweeps.

Every command emits one table (CSV by default, JSON mirroring the same
columns) with locale-free formatting: reals carry 15 significant digits,
line endings are LF, reruns of an identical configuration are byte-identical
and independent of the thread count.

Exit codes: 0 success, 2 usage or precondition error, 3 violated internal
contract.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .arith import OffsetTuple, as_offsets
from .buchstab import SquareMultipleQuery, buchstab_decompose, count_square_multiples
from .density import DEFAULT_PRIME_CUTOFF, certify_inverse_bound, density_constant, inverse_density_cap
from .errors import ContractViolation, DegenerateTupleError, MemoryBudgetError
from .selberg import excess_exponent, optimal_weights, quadratic_form_bound, sieve_level
from .sieve import Window, count_tuples

COLUMNS = {
    "count": ["x", "h", "offsets", "z", "q"],
    "density": ["offsets", "r", "prime_cutoff", "lower", "upper", "tail_log_bound",
                "degenerate_zero", "inverse_upper", "inverse_cap", "inverse_holds"],
    "selberg": ["x", "h", "offsets", "z", "form_minimum", "normalizer", "weight_mass",
                "tail_defect", "inv_density_upper", "form_value", "exact_count",
                "reference_rhs", "certified"],
    "buchstab": ["x", "h", "offsets", "lambda0", "base_count", "base_main", "base_error",
                 "divisor_cap", "removed_total", "removed_cap", "exact_count",
                 "reconciliation", "ledger_rows"],
    "squaremul": ["x", "h", "d_lo", "d_hi", "count"],
    "sweep": ["x", "h", "r", "offsets", "q", "density_lower", "density_upper",
              "density_mid", "ratio", "excess_exponent", "excess_stat"],
}


@dataclass
class ExperimentConfig:
    command: str
    x: Optional[int] = None
    h: Optional[int] = None
    offsets: Optional[OffsetTuple] = None
    x_grid: tuple = ()
    h_grid: tuple = ()
    offsets_grid: tuple = ()
    z: Optional[str] = None
    lambda0: Optional[float] = None
    psi: str = "loglog"
    d_lo: Optional[float] = None
    d_hi: Optional[float] = None
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF
    rng_seed: int = 0
    threads: int = 1
    fmt: str = "csv"
    out: Optional[str] = None


def _int_arg(text: str) -> int:
    return int(text)  # int() accepts underscore digit separators


def _float_arg(text: str) -> float:
    return float(text)


def _offsets_arg(text: str) -> OffsetTuple:
    return as_offsets(int(part) for part in text.split(","))


def _int_list_arg(text: str) -> tuple:
    return tuple(int(part) for part in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqfree",
        description="Exact squarefree-tuple counts in short windows with certified sieve bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--seed", type=_int_arg, default=0)
        p.add_argument("--threads", type=_int_arg, default=1)
        p.add_argument("--prime-cutoff", type=_int_arg, default=DEFAULT_PRIME_CUTOFF)

    p = sub.add_parser("count", help="exact tuple count over one window")
    p.add_argument("--x", type=_int_arg, required=True)
    p.add_argument("--h", type=_int_arg, required=True)
    p.add_argument("--offsets", type=_offsets_arg, required=True)
    p.add_argument("--z", default=None, help="sieve level (default: full squarefree test)")
    common(p)

    p = sub.add_parser("density", help="certified bracket for the tuple density")
    p.add_argument("--offsets", type=_offsets_arg, required=True)
    common(p)

    p = sub.add_parser("selberg", help="weight-system upper-bound certificate")
    p.add_argument("--x", type=_int_arg, required=True)
    p.add_argument("--h", type=_int_arg, required=True)
    p.add_argument("--offsets", type=_offsets_arg, required=True)
    p.add_argument("--z", required=True, help="sieve level, or 'auto' for the canonical choice")
    common(p)

    p = sub.add_parser("buchstab", help="exact removal-ledger decomposition")
    p.add_argument("--x", type=_int_arg, required=True)
    p.add_argument("--h", type=_int_arg, required=True)
    p.add_argument("--offsets", type=_offsets_arg, required=True)
    p.add_argument("--lambda0", type=_float_arg, required=True)
    p.add_argument("--psi", default="loglog", help="growth kind: loglog | pow23 | const:C")
    common(p)

    p = sub.add_parser("squaremul", help="square-multiple obstruction count")
    p.add_argument("--x", type=_int_arg, required=True)
    p.add_argument("--h", type=_int_arg, required=True)
    p.add_argument("--d-lo", type=_float_arg, required=True)
    p.add_argument("--d-hi", type=_float_arg, required=True)
    common(p)

    p = sub.add_parser("sweep", help="exact counts and density ratios over a grid")
    p.add_argument("--x", type=_int_list_arg, required=True, help="comma-separated x values")
    p.add_argument("--h", type=_int_list_arg, required=True, help="comma-separated h values")
    p.add_argument("--offsets", type=_offsets_arg, action="append", required=True,
                   help="repeatable; one offset pattern per use")
    common(p)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig(command=args.command)
    cfg.fmt = args.format
    cfg.out = args.out
    cfg.rng_seed = args.seed
    cfg.threads = args.threads
    cfg.prime_cutoff = getattr(args, "prime_cutoff", DEFAULT_PRIME_CUTOFF)
    if args.command == "sweep":
        cfg.x_grid = args.x
        cfg.h_grid = args.h
        cfg.offsets_grid = tuple(args.offsets)
    else:
        cfg.x = getattr(args, "x", None)
        cfg.h = getattr(args, "h", None)
        cfg.offsets = getattr(args, "offsets", None)
        if hasattr(args, "d_lo"):
            cfg.d_lo = args.d_lo
            cfg.d_hi = args.d_hi
    cfg.z = getattr(args, "z", None)
    cfg.lambda0 = getattr(args, "lambda0", None)
    cfg.psi = getattr(args, "psi", "loglog")
    return cfg


def _warn_regime(cfg: ExperimentConfig) -> None:
    if cfg.offsets is None or cfg.x is None or cfg.h is None:
        return
    if cfg.offsets.offsets[-1] > cfg.x or cfg.h > cfg.x:
        print(
            "note: largest offset or window length exceeds the window start; "
            "results are exact but outside the certified asymptotic regime",
            file=sys.stderr,
        )


def _resolve_level(cfg: ExperimentConfig) -> float:
    if cfg.z is None or cfg.z == "auto":
        level = sieve_level(cfg.h, cfg.offsets.r)
        if not level > 2.0:
            raise ValueError(
                f"automatic sieve level {level:.6g} is not above 2; pass --z explicitly"
            )
        return level
    return float(cfg.z)


def _excess_stat(q: int, mid: float, h: int):
    if mid <= 0:
        return None, None
    ratio = q / (mid * h)
    if h >= 16:
        rho = excess_exponent(h)
        stat = max(0.0, ratio - 1.0) * h ** (1.0 / 3.0 - rho)
    else:
        rho, stat = None, None
    return ratio, (rho, stat)


def run_command(cfg: ExperimentConfig) -> list[dict]:
    if cfg.command == "count":
        w = Window(cfg.x, cfg.h)
        # "auto" keeps the default full-squarefree level
        z = float(cfg.z) if cfg.z not in (None, "auto") else None
        q = count_tuples(w, cfg.offsets, z=z, threads=cfg.threads)
        z_used = z if z is not None else 2.0 * math.sqrt(w.end + cfg.offsets.offsets[-1])
        return [{"x": w.x, "h": w.h, "offsets": str(cfg.offsets), "z": z_used, "q": q}]

    if cfg.command == "density":
        est = density_constant(cfg.offsets, cfg.prime_cutoff)
        row = {
            "offsets": str(cfg.offsets),
            "r": cfg.offsets.r,
            "prime_cutoff": est.prime_cutoff,
            "lower": est.lower,
            "upper": est.upper,
            "tail_log_bound": est.tail_log_bound,
            "degenerate_zero": est.degenerate_zero,
            "inverse_upper": None,
            "inverse_cap": inverse_density_cap(cfg.offsets.r),
            "inverse_holds": None,
        }
        if not est.degenerate_zero:
            row["inverse_upper"] = 1.0 / est.lower
            row["inverse_holds"] = row["inverse_upper"] <= row["inverse_cap"]
        return [row]

    if cfg.command == "selberg":
        _warn_regime(cfg)
        w = Window(cfg.x, cfg.h)
        level = _resolve_level(cfg)
        system = optimal_weights(level, cfg.offsets, prime_cutoff=cfg.prime_cutoff)
        cert = quadratic_form_bound(w, cfg.offsets, system, threads=cfg.threads)
        if not cert.certified:
            raise ContractViolation(
                f"upper-bound certificate breached: exact {cert.exact_count} "
                f"> form value {float(cert.form_value):.6f}"
            )
        return [{
            "x": w.x, "h": w.h, "offsets": str(cfg.offsets), "z": level,
            "form_minimum": float(system.form_minimum),
            "normalizer": float(system.normalizer),
            "weight_mass": system.weight_mass,
            "tail_defect": system.tail_defect,
            "inv_density_upper": system.inv_density_upper,
            "form_value": float(cert.form_value),
            "exact_count": cert.exact_count,
            "reference_rhs": cert.reference_rhs,
            "certified": cert.certified,
        }]

    if cfg.command == "buchstab":
        _warn_regime(cfg)
        w = Window(cfg.x, cfg.h)
        report = buchstab_decompose(w, cfg.offsets, cfg.lambda0)
        if report.reconciliation != 0:
            raise ContractViolation(
                f"decomposition does not reconcile: residue {report.reconciliation}"
            )
        return [{
            "x": w.x, "h": w.h, "offsets": str(cfg.offsets), "lambda0": report.cutoff,
            "base_count": report.base_count,
            "base_main": report.base_main,
            "base_error": report.base_error,
            "divisor_cap": report.divisor_cap,
            "removed_total": report.removed_total,
            "removed_cap": report.removed_cap,
            "exact_count": report.exact_count,
            "reconciliation": report.reconciliation,
            "ledger_rows": len(report.ledger),
        }]

    if cfg.command == "squaremul":
        query = SquareMultipleQuery(cfg.x, cfg.h, cfg.d_lo, cfg.d_hi)
        count = count_square_multiples(query)
        return [{"x": cfg.x, "h": cfg.h, "d_lo": cfg.d_lo, "d_hi": cfg.d_hi, "count": count}]

    if cfg.command == "sweep":
        rows = []
        for offs in cfg.offsets_grid:
            est = density_constant(offs, cfg.prime_cutoff)
            for x in cfg.x_grid:
                for h in cfg.h_grid:
                    w = Window(x, h)
                    q = count_tuples(w, offs, threads=cfg.threads)
                    ratio, rho_stat = _excess_stat(q, est.midpoint, h)
                    rho, stat = rho_stat if rho_stat else (None, None)
                    rows.append({
                        "x": x, "h": h, "r": offs.r, "offsets": str(offs), "q": q,
                        "density_lower": est.lower, "density_upper": est.upper,
                        "density_mid": est.midpoint, "ratio": ratio,
                        "excess_exponent": rho, "excess_stat": stat,
                    })
        if not rows:
            raise ValueError("sweep grid is empty")
        return rows

    raise ValueError(f"unknown command {cfg.command!r}")


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def _json_value(value):
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(f"{value:.15g}")
    return value


def render(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "json":
        payload = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        return json.dumps(payload, indent=2) + "\n"
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_cell(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def emit(rows: list[dict], columns: list[str], cfg: ExperimentConfig) -> None:
    text = render(rows, columns, cfg.fmt)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        cfg = config_from_args(args)
        rows = run_command(cfg)
        emit(rows, COLUMNS[cfg.command], cfg)
        return 0
    except ContractViolation as exc:
        print(f"contract failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, MemoryBudgetError, DegenerateTupleError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
