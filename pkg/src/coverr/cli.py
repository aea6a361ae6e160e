"""Command line front end: ``coverr {table,predict,quantile,simulate}``.

Every command writes a delimited table whose first line is the schema tag
``# coverr-schema=1``. Summary tables use 6 significant digits; the
``simulate`` report keeps full round-trip precision.

Exit codes: 0 success (for ``simulate``, every verdict passed), 1 a verdict
failed, 2 usage error, 3 invalid configuration value, 4 output path not
writable, 5 simulation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence, TextIO

from coverr import distributions, edgeworth, mc, specfun
from coverr.edgeworth import IntervalKind, MomentProfile

SCHEMA_LINE = "# coverr-schema=1"

EXIT_OK = 0
EXIT_VERDICT_FAILED = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_IO = 4
EXIT_SIMULATION = 5

_PARAM_FLAGS = {"mu": "--mu", "sigma": "--sigma", "rate": "--rate", "shape": "--shape",
                "a": "--a", "b": "--b", "mu_log": "--mu-log", "sigma_log": "--sigma-log"}


@dataclass
class OutputTable:
    header: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    format: str = "csv"
    full_precision: bool = False
    digits: int = 6

    def cell(self, v: Any) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return repr(v) if self.full_precision else f"{v:.{self.digits}g}"
        return str(v)

    def render(self) -> str:
        for row in self.rows:
            if len(row) != len(self.header):
                raise ValueError("ragged table row")
        buf = io.StringIO()
        buf.write(SCHEMA_LINE + "\n")
        writer = csv.writer(buf, delimiter="\t" if self.format == "tsv" else ",",
                            lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([self.cell(v) for v in row])
        return buf.getvalue()


class _ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_table(alpha: float = 0.025, digits: int = 2, fmt: str = "csv") -> OutputTable:
    table = OutputTable(["kind", "a_kappa", "a_gamma2", "a_0", "entry"], format=fmt)
    for kind in (IntervalKind.NORM, IntervalKind.STUDENT_T):
        e = edgeworth.entry_coefficients(alpha, kind)
        table.rows.append([kind.value, e.a_kappa, e.a_gamma2, e.a_0, e.render(digits)])
    return table


def cmd_predict(n: float, alpha: float, kinds: Sequence[IntervalKind],
                family: distributions.DistributionSpec | None = None,
                moments: MomentProfile | None = None, fmt: str = "csv") -> OutputTable:
    if (family is None) == (moments is None):
        raise _ConfigError("give exactly one moment source: a family or explicit gamma/kappa")
    m = family.moments if family is not None else moments
    table = OutputTable(["family", "params", "gamma", "kappa", "n", "alpha", "kind", "entry",
                         "predicted_error", "predicted_coverage"], format=fmt)
    for kind in kinds:
        entry = edgeworth.entry_coefficients(alpha, kind)
        err = edgeworth.two_sided_error(alpha, n, m, kind)
        table.rows.append([
            family.family.value if family else "",
            family.label() if family else "",
            m.gamma, m.kappa, n, alpha, kind.value, entry.value(m), err,
            1.0 - 2.0 * alpha + err,
        ])
    return table


def cmd_quantile(nus: Sequence[float], ps: Sequence[float], order: int = 4,
                 fmt: str = "csv") -> OutputTable:
    if not 0 <= order <= specfun.MAX_EXPANSION_ORDER:
        raise _ConfigError(f"order must be in 0..{specfun.MAX_EXPANSION_ORDER}")
    header = ["nu", "p", "exact"]
    header += [f"expansion_{k}" for k in range(order + 1)]
    header += [f"abs_error_{k}" for k in range(order + 1)]
    table = OutputTable(header, format=fmt)
    for nu in nus:
        for p in ps:
            exact = specfun.t_quantile(p, nu)
            approx = [specfun.t_quantile_expansion(p, nu, k) for k in range(order + 1)]
            table.rows.append([nu, p, exact, *approx, *[abs(a - exact) for a in approx]])
    return table


def cmd_simulate(config: mc.SimulationConfig, z_tol: float = mc.DEFAULT_Z_TOL,
                 slack: float = mc.DEFAULT_SLACK, fmt: str = "csv") -> tuple[OutputTable, bool]:
    results = mc.run(config)
    table = OutputTable(["family", "params", "n", "alpha", "kind", "reps", "seed", "coverage",
                         "se", "scaled_error", "scaled_se", "predicted_scaled_error",
                         "z_score", "pass"], format=fmt, full_precision=True)
    all_pass = True
    for res in results:
        v = mc.compare(res, z_tol=z_tol, slack=slack)
        all_pass &= v.passed
        table.rows.append([config.spec.family.value, config.spec.label(), config.n,
                           float(config.alpha), res.kind.value, res.reps, config.master_seed,
                           res.coverage, res.se, res.scaled_error, res.scaled_se,
                           res.predicted_scaled_error, v.z_score, v.passed])
    return table, all_pass


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def _kinds(value: str) -> list[IntervalKind]:
    if value.strip().lower() in ("both", "all"):
        return list(mc.ALL_KINDS)
    try:
        kinds = [IntervalKind.parse(v) for v in value.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return [k for k in mc.ALL_KINDS if k in kinds]


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=[f.value for f in distributions.Family])
    for name, flag in _PARAM_FLAGS.items():
        p.add_argument(flag, dest=name, type=float, default=None)


def _family_from_args(args: argparse.Namespace) -> distributions.DistributionSpec | None:
    given = {k: getattr(args, k) for k in _PARAM_FLAGS if getattr(args, k) is not None}
    if args.family is None:
        if given:
            raise _ConfigError("distribution parameters given without --family")
        return None
    fam = distributions.Family(args.family)
    stray = set(given) - set(distributions.PARAM_NAMES[fam])
    if stray:
        raise _ConfigError(f"{fam.value} does not take " + ", ".join(_PARAM_FLAGS[k] for k in sorted(stray)))
    return distributions.spec(fam, **given)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coverr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=["csv", "tsv"], default="csv")
        p.add_argument("--out", default=None, help="also write the table to this path")

    p = sub.add_parser("table", help="table entries for the Norm and Student t intervals")
    p.add_argument("--alpha", type=float, default=0.025)
    p.add_argument("--digits", type=int, default=2)
    common(p)

    p = sub.add_parser("predict", help="predicted coverage error for given moments")
    _add_family_flags(p)
    p.add_argument("--gamma", type=float, default=None, help="skewness")
    p.add_argument("--kappa", type=float, default=None, help="excess kurtosis")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.025)
    p.add_argument("--kind", type=_kinds, default=[IntervalKind.STUDENT_T],
                   help="t, norm, or both")
    common(p)

    p = sub.add_parser("quantile", help="t quantile against its asymptotic expansion")
    p.add_argument("--nu", type=float, nargs="+", required=True)
    p.add_argument("--p", type=float, nargs="+", required=True)
    p.add_argument("--order", type=int, default=specfun.MAX_EXPANSION_ORDER)
    common(p)

    p = sub.add_parser("simulate", help="Monte Carlo coverage against the predictions")
    _add_family_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.025)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--kinds", type=_kinds, default=list(mc.ALL_KINDS))
    p.add_argument("--z-tol", type=float, default=mc.DEFAULT_Z_TOL)
    p.add_argument("--slack", type=float, default=mc.DEFAULT_SLACK)
    common(p)
    return parser


def _dispatch(args: argparse.Namespace, parser: argparse.ArgumentParser) -> tuple[OutputTable, int]:
    if args.command == "table":
        return cmd_table(args.alpha, args.digits, args.format), EXIT_OK
    if args.command == "quantile":
        return cmd_quantile(args.nu, args.p, args.order, args.format), EXIT_OK
    if args.command == "predict":
        fam = _family_from_args(args)
        explicit = (args.gamma, args.kappa)
        if fam is not None and any(v is not None for v in explicit):
            parser.error("--family conflicts with --gamma/--kappa")
        if fam is None and None in explicit:
            parser.error("give --family or both --gamma and --kappa")
        moments = None if fam is not None else MomentProfile(args.gamma, args.kappa)
        return cmd_predict(args.n, args.alpha, args.kind, fam, moments, args.format), EXIT_OK
    fam = _family_from_args(args)
    if fam is None:
        parser.error("simulate requires --family")
    config = mc.SimulationConfig(fam, args.n, args.alpha, args.reps, args.seed,
                                 args.workers, tuple(args.kinds))
    table, ok = cmd_simulate(config, args.z_tol, args.slack, args.format)
    return table, EXIT_OK if ok else EXIT_VERDICT_FAILED


def _probe_writable(path: str) -> bool:
    """Check ``path`` can be written without truncating it; returns whether it existed."""
    existed = os.path.exists(path)
    with open(path, "a", encoding="utf-8"):
        pass
    return existed


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    existed = True
    if args.out is not None:
        # fail before any long computation
        try:
            existed = _probe_writable(args.out)
        except OSError as exc:
            print(f"coverr: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    try:
        table, code = _dispatch(args, parser)
    except SystemExit as exc:
        code, table = int(exc.code or EXIT_USAGE), None
    except (_ConfigError, ValueError) as exc:
        print(f"coverr: {exc}", file=sys.stderr)
        code, table = EXIT_INVALID, None
    except mc.SimulationError as exc:
        print(f"coverr: {exc}", file=sys.stderr)
        code, table = EXIT_SIMULATION, None
    if table is None:
        if args.out is not None and not existed:
            os.remove(args.out)
        return code
    text = table.render()
    stdout.write(text)
    if args.out is not None:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"coverr: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
