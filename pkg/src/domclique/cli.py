"""Command-line harness: analytic tables, exact oracles, simulations and figure data as CSV."""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, fields
from typing import Sequence

from . import analytic as A
from . import exact as E
from . import montecarlo as M
from .errors import CapacityError, DomainError, UndefinedEstimateError

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_ORACLE = 3
EXIT_CAPACITY = 4

ORACLE_REL_TOL = 1e-9
ORACLE_ABS_TOL = 1e-12
DEFAULT_TRIALS = 100_000

ANALYTIC_QUANTITIES = (
    "alpha", "epsilon-hat", "r0", "r1", "variance-factor", "critical-r", "classify",
    "expected-x", "expected-y", "ratio", "ratio-finite", "offset-asymptote",
)
EXACT_QUANTITIES = ("expected-x", "expected-y")
SIMULATION_QUANTITIES = ("mean-x", "existence", "ratio", "ratio-finite")

_NEEDS_N = {"r0", "r1", "variance-factor", "critical-r", "expected-x", "expected-y",
            "ratio", "ratio-finite"}
_NEEDS_R = {"expected-x", "expected-y", "ratio", "ratio-finite"}


@dataclass
class SweepRecord:
    """One CSV row.  Fields that do not apply to a row stay ``None`` and print empty."""

    command: str
    quantity: str
    n: int | None = None
    p: float | None = None
    selector: str | None = None
    rho_or_r: float | None = None
    r: float | None = None
    analytic_value: float | None = None
    empirical_point: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    abs_gap: float | None = None
    rel_gap: float | None = None
    trials: int | None = None
    excluded_trials: int | None = None
    seed: int | None = None
    note: str | None = None


COLUMNS = tuple(f.name for f in fields(SweepRecord))


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    quantities: tuple[str, ...]
    ns: tuple[int, ...]
    ps: tuple[float, ...]
    selector: str | None
    selector_value: float | None
    offset: float | None
    offset_kind: A.OffsetKind | None
    trials: int
    seed: int
    workers: int
    figure: str | None


class UsageError(DomainError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(message)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for rec in records:
        w.writerow([_fmt(getattr(rec, c)) for c in COLUMNS])
    return buf.getvalue()


def parse_n_range(text: str) -> tuple[int, ...]:
    """``a:b:step`` (arithmetic) or ``a:b:factor:geom`` (geometric), inclusive of ``b``."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "geom"):
        raise UsageError(f"--n-range {text!r} is not a:b:step or a:b:factor:geom")
    try:
        a, b = int(parts[0]), int(parts[1])
        step = float(parts[2])
    except ValueError:
        raise UsageError(f"--n-range {text!r} has a non-numeric field") from None
    if a > b:
        raise UsageError(f"--n-range {text!r} is empty")
    out: list[int] = []
    if len(parts) == 4:
        if step <= 1:
            raise UsageError(f"--n-range geometric factor must exceed 1, got {step}")
        k = 0
        while True:
            v = round(a * step**k)
            if v > b:
                break
            if not out or v != out[-1]:
                out.append(v)
            k += 1
    else:
        if step <= 0 or not step.is_integer():
            raise UsageError(f"--n-range step must be a positive integer, got {parts[2]}")
        out = list(range(a, b + 1, int(step)))
    return tuple(out)


def _parse_p_list(text: str) -> tuple[float, ...]:
    try:
        ps = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"--p-list {text!r} is not a comma-separated list of numbers") from None
    if not ps:
        raise UsageError("--p-list is empty")
    return ps


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="domclique", description=__doc__)
    ap.add_argument("command", choices=("analytic", "exact", "simulate", "sweep", "figure"))
    ap.add_argument("figure", nargs="?", choices=("alpha", "ratio"),
                    help="figure to reproduce (figure command only)")
    ap.add_argument("--quantity", help="comma-separated quantities for the command")
    ap.add_argument("--n", type=int)
    ap.add_argument("--n-range")
    ap.add_argument("--p", type=float)
    ap.add_argument("--p-list")
    sel = ap.add_mutually_exclusive_group()
    sel.add_argument("--r", type=int)
    sel.add_argument("--rho", type=float)
    sel.add_argument("--critical", action="store_true")
    off = ap.add_mutually_exclusive_group()
    off.add_argument("--delta", type=float,
                     help="signed offset from the critical size; negative means minus delta")
    off.add_argument("--lambda", dest="lam", type=float, help="constant offset from the critical size")
    ap.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    ap.add_argument("--workers", type=int)
    return ap


def make_config(argv: Sequence[str]) -> tuple[ExperimentConfig, str | None]:
    ns_ = build_parser().parse_args(argv)
    cmd = ns_.command
    if ns_.figure is not None and cmd != "figure":
        raise UsageError(f"unexpected argument {ns_.figure!r} for command {cmd}")
    if cmd == "figure" and ns_.figure is None:
        raise UsageError("figure needs a name: alpha or ratio")
    if ns_.n is not None and ns_.n_range is not None:
        raise UsageError("give --n or --n-range, not both")
    if ns_.p is not None and ns_.p_list is not None:
        raise UsageError("give --p or --p-list, not both")
    ns = (ns_.n,) if ns_.n is not None else parse_n_range(ns_.n_range) if ns_.n_range else ()
    ps = (ns_.p,) if ns_.p is not None else _parse_p_list(ns_.p_list) if ns_.p_list else ()
    if cmd == "simulate" and (len(ns) > 1 or len(ps) > 1):
        raise UsageError("simulate takes a single --n and --p; use sweep for grids")

    if ns_.r is not None:
        selector, value = "r", float(ns_.r)
    elif ns_.rho is not None:
        selector, value = "rho", ns_.rho
    elif ns_.critical:
        selector, value = "critical", None
    else:
        selector, value = None, None

    offset, kind = None, None
    if ns_.delta is not None:
        offset = ns_.delta
        kind = A.OffsetKind.MINUS_DELTA if ns_.delta < 0 else A.OffsetKind.PLUS_DELTA
    elif ns_.lam is not None:
        offset, kind = ns_.lam, A.OffsetKind.CONSTANT_LAMBDA
    if offset is not None and selector not in (None, "critical"):
        raise UsageError("--delta/--lambda offset the critical size; combine with --critical only")

    allowed = {
        "analytic": ANALYTIC_QUANTITIES,
        "exact": EXACT_QUANTITIES,
        "simulate": SIMULATION_QUANTITIES,
        "sweep": SIMULATION_QUANTITIES,
        "figure": (),
    }[cmd]
    default = {"analytic": "ratio", "exact": "expected-x", "simulate": "mean-x", "sweep": "ratio"}
    if ns_.quantity is not None and cmd == "figure":
        raise UsageError("figure does not take --quantity")
    quantities = tuple(q.strip() for q in (ns_.quantity or default.get(cmd, "")).split(",") if q.strip())
    for q in quantities:
        if q not in allowed:
            raise UsageError(f"--quantity {q!r} is not one of {', '.join(allowed)} for {cmd}")

    if cmd in ("exact", "simulate", "sweep"):
        if not ns or not ps:
            raise UsageError(f"{cmd} needs --n/--n-range and --p/--p-list")
        if cmd != "exact" and selector is None:
            raise UsageError(f"{cmd} needs one of --r, --rho, --critical")
    if cmd == "analytic":
        if not ps:
            raise UsageError("analytic needs --p or --p-list")
        if any(q in _NEEDS_N for q in quantities) and not ns:
            raise UsageError("the requested quantities need --n or --n-range")
        if any(q in _NEEDS_R for q in quantities) and selector is None:
            raise UsageError("the requested quantities need one of --r, --rho, --critical")
        if "classify" in quantities and selector != "rho":
            raise UsageError("classify needs --rho")
        if "offset-asymptote" in quantities and offset is None:
            raise UsageError("offset-asymptote needs --delta or --lambda")
    if ns_.trials < 1:
        raise UsageError(f"--trials must be at least 1, got {ns_.trials}")
    if not 0 <= ns_.seed < 2**64:
        raise UsageError(f"--seed {ns_.seed} is not a 64-bit unsigned integer")
    workers = ns_.workers if ns_.workers is not None else M.default_workers()
    if workers < 1:
        raise UsageError(f"--workers must be at least 1, got {workers}")

    cfg = ExperimentConfig(
        command=cmd, quantities=quantities, ns=ns, ps=ps, selector=selector,
        selector_value=value, offset=offset, offset_kind=kind, trials=ns_.trials,
        seed=ns_.seed, workers=workers, figure=ns_.figure,
    )
    return cfg, ns_.out


def _clique_size(cfg: ExperimentConfig, n: int, p: float) -> tuple[float, float]:
    """(real size for analytic use, value echoed in the rho_or_r column)."""
    if cfg.selector == "r":
        return cfg.selector_value, cfg.selector_value
    if cfg.selector == "rho":
        return A.r_from_rho(n, cfg.selector_value, p), cfg.selector_value
    r = A.critical_r(n, p) + (cfg.offset or 0.0)
    return r, r


def _counting_size(r_real: float, n: int) -> int:
    r = int(math.floor(r_real + 0.5))
    if not 1 <= r <= n:
        raise DomainError(f"clique size r={r_real!r} rounds to {r}, outside 1..n={n}")
    return r


def _gaps(analytic: float, empirical: float) -> tuple[float, float | None]:
    gap = abs(analytic - empirical)
    return gap, (gap / abs(analytic) if analytic != 0 else None)


def _analytic_rows(cfg: ExperimentConfig) -> list[SweepRecord]:
    rows = []
    needs_n = any(q in _NEEDS_N for q in cfg.quantities)
    for n in cfg.ns if needs_n else (None,):
        for p in cfg.ps:
            for q in cfg.quantities:
                rec = SweepRecord("analytic", q, n=n, p=p)
                if q in _NEEDS_R or q == "classify":
                    rec.selector = cfg.selector
                    if q == "classify":
                        rec.rho_or_r = cfg.selector_value
                    else:
                        rec.r, rec.rho_or_r = _clique_size(cfg, n, p)
                if q == "alpha":
                    rec.analytic_value = A.alpha(p)
                elif q == "epsilon-hat":
                    rec.analytic_value = A.epsilon_hat(p)
                elif q == "r0":
                    rec.analytic_value = A.r0(n, p)
                elif q == "r1":
                    rec.analytic_value = A.r1(n, p)
                elif q == "variance-factor":
                    rec.analytic_value = A.variance_bound_factor(n, p)
                elif q == "critical-r":
                    rec.analytic_value = A.critical_r(n, p)
                elif q == "classify":
                    phase = A.classify_phase(p, cfg.selector_value)
                    rec.analytic_value = phase.rho_hat
                    rec.note = phase.kind.value if phase.side is None else f"{phase.kind.value}:{phase.side.value}"
                elif q == "expected-x":
                    rec.r = _counting_size(rec.r, n)
                    rec.analytic_value = A.expected_dominating_cliques(n, rec.r, p)
                elif q == "expected-y":
                    rec.r = _counting_size(rec.r, n)
                    rec.analytic_value = A.expected_maximal_cliques(n, rec.r, p)
                elif q == "ratio":
                    rec.analytic_value = A.ratio_analytic(n, rec.r, p)
                elif q == "ratio-finite":
                    rec.analytic_value = A.ratio_finite(n, rec.r, p)
                elif q == "offset-asymptote":
                    rec.selector = cfg.offset_kind.value
                    rec.rho_or_r = cfg.offset
                    rec.analytic_value = A.ratio_offset_asymptote(p, abs(cfg.offset), cfg.offset_kind)
                rows.append(rec)
    return rows


def _exact_rows(cfg: ExperimentConfig) -> tuple[list[SweepRecord], bool]:
    rows = []
    mismatch = False
    for n in cfg.ns:
        if n > E.MAX_ORACLE_NODES:
            raise CapacityError(f"exact oracles support n <= {E.MAX_ORACLE_NODES}, got {n}")
        for p in cfg.ps:
            if cfg.selector is None:
                sizes = range(1, n + 1)
            else:
                sizes = (_counting_size(_clique_size(cfg, n, p)[0], n),)
            for r in sizes:
                for q in cfg.quantities:
                    if q == "expected-x":
                        oracle = E.exhaustive_expectation_Xr(n, r, p)
                        value = A.expected_dominating_cliques(n, r, p)
                    else:
                        oracle = E.exhaustive_expectation_Yr(n, r, p)
                        value = A.expected_maximal_cliques(n, r, p)
                    gap, rel = _gaps(value, oracle)
                    ok = gap <= ORACLE_ABS_TOL if value == 0 else rel <= ORACLE_REL_TOL
                    mismatch |= not ok
                    rows.append(SweepRecord(
                        "exact", q, n=n, p=p, selector=cfg.selector or "r", rho_or_r=float(r), r=r,
                        analytic_value=value, empirical_point=oracle, abs_gap=gap, rel_gap=rel,
                        note=None if ok else "oracle-mismatch",
                    ))
    return rows, mismatch


def _simulation_rows(cfg: ExperimentConfig) -> list[SweepRecord]:
    rows = []
    grid = [(n, p) for n in cfg.ns for p in cfg.ps]
    for k, (n, p) in enumerate(grid, 1):
        r_real, echoed = _clique_size(cfg, n, p)
        r = _counting_size(r_real, n)
        print(f"[{k}/{len(grid)}] n={n} p={p!r} r={r} trials={cfg.trials}", file=sys.stderr, flush=True)
        agg = M.run_trials(n, p, r, cfg.trials, cfg.seed, cfg.workers)
        for q in cfg.quantities:
            rec = SweepRecord(cfg.command, q, n=n, p=p, selector=cfg.selector, rho_or_r=echoed,
                              r=r, trials=agg.trials, excluded_trials=0, seed=cfg.seed)
            try:
                if q == "mean-x":
                    est = M.estimate_mean_x(agg)
                    rec.analytic_value = A.expected_dominating_cliques(n, r, p)
                elif q == "existence":
                    est = M.estimate_existence_probability(agg)
                else:
                    est = M.estimate_mean_ratio(agg)
                    rec.excluded_trials = est.excluded
                    if q == "ratio":
                        rec.analytic_value = A.ratio_analytic(n, r_real, p)
                    else:
                        rec.analytic_value = A.ratio_finite(n, r, p)
            except UndefinedEstimateError as exc:
                rec.excluded_trials = agg.excluded_trials
                rec.note = str(exc)
                rows.append(rec)
                continue
            rec.empirical_point, rec.ci_low, rec.ci_high = est.point, est.ci_low, est.ci_high
            if rec.analytic_value is not None:
                rec.abs_gap, rec.rel_gap = _gaps(rec.analytic_value, est.point)
            rows.append(rec)
    return rows


def _figure_rows(cfg: ExperimentConfig) -> list[SweepRecord]:
    if cfg.figure == "alpha":
        ps = cfg.ps or tuple(k / 100 for k in range(1, 100))
        return [SweepRecord("figure", "alpha", p=p, analytic_value=A.alpha(p)) for p in ps]
    ps = cfg.ps or (0.45,)
    ns = cfg.ns or parse_n_range("100:10000000:10:geom")
    rows = []
    for p in ps:
        rhos = (1.9, 1.0 / A.alpha(p), 1.05)
        for rho in rhos:
            for n in ns:
                r = A.r_from_rho(n, rho, p)
                rows.append(SweepRecord("figure", "ratio", n=n, p=p, selector="rho", rho_or_r=rho,
                                        r=r, analytic_value=A.ratio_analytic(n, r, p)))
    return rows


def run(argv: Sequence[str]) -> tuple[int, str]:
    """Execute a command; returns ``(exit code, CSV text)`` without touching any file."""
    cfg, _ = make_config(argv)
    status = EXIT_OK
    if cfg.command == "analytic":
        rows = _analytic_rows(cfg)
    elif cfg.command == "exact":
        rows, mismatch = _exact_rows(cfg)
        status = EXIT_ORACLE if mismatch else EXIT_OK
    elif cfg.command == "figure":
        rows = _figure_rows(cfg)
    else:
        rows = _simulation_rows(cfg)
    return status, render_csv(rows)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        _, out = make_config(argv)
        status, text = run(argv)
    except CapacityError as exc:
        print(f"domclique: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (DomainError, UndefinedEstimateError) as exc:
        print(f"domclique: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
