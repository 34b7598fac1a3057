"""Repeated-trial error estimation, log-log rate fits, rate envelopes and the adaption-gap experiment."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import estimators
from .estimators import AdaptiveConfig, BudgetAudit, budget_bound, ceil_div
from .hard_instances import HARD_FAMILIES, InstanceSpec, draw
from .rng_streams import SeedSpec, derive
from .tensor_space import INF, ExponentPair, format_exponent, lp_norm, mean_rows, parse_exponent, recip

ALGORITHMS = ("zero", "a2", "a3")
CSV_HEADER = (
    "algo", "instance", "p", "q", "n1", "n2", "n", "m", "w",
    "trials", "seed", "mean_err", "stderr", "card_mean", "card_max",
)  # fmt: skip
GAP_HEADER = (
    "n", "n1", "n2", "err_nonadaptive", "err_adaptive", "ratio",
    "budget_nonadaptive", "budget_adaptive",
)  # fmt: skip
DEFAULT_C0 = 1.0 / 21.0


class BudgetViolation(RuntimeError):
    """An audited run used more oracle calls than its algorithm's bound allows."""


@dataclass(frozen=True)
class TrialRecord:
    algo: str
    instance: str
    p: float
    q: float
    n1: int
    n2: int
    n: int
    m: int
    w: float
    trials: int
    seed: SeedSpec
    mean_err: float
    stderr: float
    card_mean: float
    card_max: int

    def row(self) -> list[str]:
        seed = "/".join(str(x) for x in (self.seed.master_seed, *self.seed.path))
        return [
            self.algo, self.instance, format_exponent(self.p), format_exponent(self.q),
            str(self.n1), str(self.n2), str(self.n), str(self.m), _fmt(self.w),
            str(self.trials), seed, _fmt(self.mean_err), _fmt(self.stderr),
            _fmt(self.card_mean), str(self.card_max),
        ]  # fmt: skip


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int

    def line(self) -> str:
        return (
            f"# RateFit slope={_fmt(self.slope)} intercept={_fmt(self.intercept)} "
            f"r_squared={_fmt(self.r_squared)} n_points={self.n_points}"
        )


@dataclass
class ExperimentPlan:
    """A sweep over budgets; ``coupled`` picks dimensions by the gap coupling per n."""

    n_grid: list[int]
    algorithms: list[str]
    trials: int
    seed: int
    n1: int | None = None
    n2: int | None = None
    coupled: bool = False
    p: float = 2.0
    q: float = 2.0
    extra: dict = field(default_factory=dict)

    def dimensions(self, n: int) -> tuple[int, int]:
        if self.coupled:
            return coupled_dimensions(self.p, self.q, n)
        if self.n1 is None or self.n2 is None:
            raise ValueError("fixed-dimension plans need n1 and n2")
        return self.n1, self.n2


def _fmt(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf"
    return repr(int(x)) if x.is_integer() and abs(x) < 2**53 else repr(x)


def run_algorithm(algo: str, f, n: int, m: int, w: float, stream):
    if algo == "zero":
        return estimators.zero_algorithm(f)
    if algo == "a2":
        return estimators.a2_mean(f, n, stream)
    if algo == "a3":
        return estimators.a3_mean(f, AdaptiveConfig(n, m, w), stream)
    raise ValueError(f"unknown algorithm {algo!r}")


def _check_audit(algo: str, audit: BudgetAudit, n: int, n1: int, m: int) -> None:
    bound = budget_bound(algo, n, n1, m)
    if audit.total_calls > bound:
        raise BudgetViolation(f"{algo} used {audit.total_calls} oracle calls, bound is {bound}")
    if algo == "a2":
        expected = n1 * ceil_div(n, n1) if n >= n1 else 0
        if audit.total_calls != expected:
            raise BudgetViolation(f"a2 used {audit.total_calls} oracle calls, expected {expected}")


def estimate_error(
    algo: str,
    spec: InstanceSpec,
    cfg: AdaptiveConfig,
    q,
    trials: int,
    seed: SeedSpec | int,
    algo_n: int | None = None,
) -> TrialRecord:
    """Monte Carlo estimate of ``(E ||S f - A f||_{L_q}^w)^(1/w)``.

    Trial t draws the instance from substream (seed, t, 0) and runs the algorithm on
    (seed, t, 1). ``algo_n`` overrides the algorithm's budget (default ``cfg.n``) while
    the instance stays tuned to ``spec.n``.
    """
    if trials < 2:
        raise ValueError("need at least two trials")
    q = parse_exponent(q)
    if not isinstance(seed, SeedSpec):
        seed = SeedSpec(int(seed))
    n = cfg.n if algo_n is None else algo_n
    fixed = None if spec.random else draw(spec)
    errs = np.empty(trials)
    cards = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        f = fixed if fixed is not None else draw(spec, derive(seed, t, 0))
        out, audit = run_algorithm(algo, f, n, cfg.m, cfg.w, derive(seed, t, 1))
        _check_audit(algo, audit, n, f.n1, cfg.m)
        errs[t] = lp_norm(mean_rows(f) - out, q)
        cards[t] = audit.total_calls
    mean_err, stderr = _moment_summary(errs, cfg.w)
    return TrialRecord(
        algo, spec.family, spec.p, q, spec.n1, spec.n2, n,
        cfg.m if algo == "a3" else 1, cfg.w, trials, seed,
        mean_err, stderr, float(cards.mean()), int(cards.max()),
    )  # fmt: skip


def _moment_summary(errs: np.ndarray, w: float) -> tuple[float, float]:
    """(mean of err^w)^(1/w) and its standard error by the delta method."""
    powered = errs if w == 1 else errs**w
    mw = float(np.mean(powered))
    # identical samples: avoid an ulp-sized spread from the mean's rounding
    spread = 0.0 if np.ptp(powered) == 0 else float(np.std(powered, ddof=1))
    se = spread / math.sqrt(errs.size)
    if w == 1:
        return mw, se
    if mw == 0.0:
        return 0.0, 0.0
    return mw ** (1 / w), se * mw ** (1 / w - 1) / w


def fit_rate(points) -> RateFit:
    """Least squares line through (log2 n, log2 err)."""
    pts = [(float(n), float(e)) for n, e in points]
    if len(pts) < 3:
        raise ValueError("need at least three points")
    if any(n <= 0 or e <= 0 for n, e in pts):
        raise ValueError("rate fits need positive budgets and errors")
    x = np.log2([n for n, _ in pts])
    y = np.log2([e for _, e in pts])
    xc, yc = x - x.mean(), y - y.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise ValueError("budgets must not all be equal")
    slope = float(xc @ yc) / sxx
    intercept = float(y.mean() - slope * x.mean())
    ss_tot = float(yc @ yc)
    resid = y - (intercept + slope * x)
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - float(resid @ resid) / ss_tot))
    return RateFit(slope, intercept, r2, len(pts))


def predicted_rate(setting: str, p, q, n1: int, n2: int, n: int) -> float:
    """Rate envelope of the n-th minimal error with all constants set to 1.

    ``setting`` is ``ran`` (adaptive randomized), ``ran_non`` (non-adaptive
    randomized) or ``det`` (deterministic). Logs are base 2.
    """
    pair = ExponentPair(p, q)
    p, q = pair.p, pair.q
    if setting == "det":
        return n1**pair.gap
    if setting not in ("ran", "ran_non"):
        raise ValueError(f"unknown setting {setting!r}")
    k = ceil_div(n, n1)
    d_p = 1.0 if p == INF else 0.0
    d_q = 1.0 if q == INF else 0.0
    if p <= 2 or p >= q:
        log_term = min(math.log2(n1 + 1), k) ** (d_p * d_q / 2)
        return n1**pair.gap * k ** -(1 - 1 / pair.p_bar) * log_term
    scale = n1 ** (recip(p) - recip(q))
    if setting == "ran_non":
        return scale * k**-0.5
    return scale * k ** -(1 - 1 / p) + k**-0.5 * math.log2(n1 + 1) ** (d_q / 2)


def envelope_constant(records, setting: str) -> float:
    """Smallest C with mean_err <= C * predicted_rate over all records."""
    return max(
        r.mean_err / predicted_rate(setting, r.p, r.q, r.n1, r.n2, r.n) for r in records
    )


def gap_exponent(p, q) -> float:
    """Exponent of the adaption gap, (1/2 - 1/p)(1/p - 1/q) / (1/2 - 1/q)."""
    rp, rq = recip(parse_exponent(p)), recip(parse_exponent(q))
    return (0.5 - rp) * (rp - rq) / (0.5 - rq)


def coupled_dimensions(p, q, n: int, c0: float = DEFAULT_C0) -> tuple[int, int]:
    """N1 = ceil(x0), N2 = floor(n / (c0 x0)) + 1 with x0 = n^((1/2-1/p)/(1/2-1/q))."""
    p, q = parse_exponent(p), parse_exponent(q)
    if not 2 < p < q:
        raise ValueError("the gap coupling needs 2 < p < q")
    rp, rq = recip(p), recip(q)
    x0 = n ** ((0.5 - rp) / (0.5 - rq))
    # exact for perfect powers such as sqrt(4**k)
    x0r = round(x0)
    if x0r > 0 and abs(x0 - x0r) < 1e-9 * x0:
        x0 = float(x0r)
    return math.ceil(x0), math.floor(n / (c0 * x0)) + 1


@dataclass(frozen=True)
class GapPoint:
    n: int
    n1: int
    n2: int
    err_nonadaptive: float
    err_adaptive: float
    ratio: float
    budget_nonadaptive: float
    budget_adaptive: float
    records: tuple = ()

    def row(self) -> list[str]:
        return [
            str(self.n), str(self.n1), str(self.n2), _fmt(self.err_nonadaptive),
            _fmt(self.err_adaptive), _fmt(self.ratio), _fmt(self.budget_nonadaptive),
            _fmt(self.budget_adaptive),
        ]  # fmt: skip


@dataclass
class GapResult:
    points: list[GapPoint]
    skipped: list[tuple[int, str]]
    fit: RateFit | None


def adaptive_budget(n: int, m: int) -> int:
    """Nominal budget for the adaptive algorithm so that 6 m n_a <= n."""
    return n // (6 * m)


def gap_experiment(p, q, n_grid, trials: int, m: int, seed: int | SeedSpec, families=HARD_FAMILIES) -> GapResult:
    """Worst-family error of a2 at budget n against a3 at the deflated budget.

    Dimensions follow the gap coupling per n. Both algorithms see the same instance
    draws. Points violating preconditions are reported in ``skipped``.
    """
    base = seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))
    points, skipped = [], []
    for pi, n in enumerate(n_grid):
        try:
            n1, n2 = coupled_dimensions(p, q, n)
            if not n1 <= n:
                raise ValueError(f"N1={n1} exceeds n={n}")
            specs = [InstanceSpec(fam, p, n, n1, n2) for fam in families]
        except ValueError as exc:
            skipped.append((n, str(exc)))
            continue
        n_ad = adaptive_budget(n, m)
        recs = []
        for fi, spec in enumerate(specs):
            point_seed = base.child(pi, fi)
            recs.append(estimate_error("a2", spec, AdaptiveConfig(n, 1), q, trials, point_seed))
            recs.append(
                estimate_error("a3", spec, AdaptiveConfig(max(n_ad, 1), m), q, trials, point_seed, algo_n=max(n_ad, 1))
            )
        non = [r for r in recs if r.algo == "a2"]
        ada = [r for r in recs if r.algo == "a3"]
        e_non = max(r.mean_err for r in non)
        e_ad = max(r.mean_err for r in ada)
        points.append(
            GapPoint(
                n, n1, n2, e_non, e_ad, e_non / e_ad if e_ad > 0 else math.inf,
                max(r.card_mean for r in non), max(r.card_mean for r in ada), tuple(recs),
            )
        )  # fmt: skip
    usable = [(pt.n, pt.ratio) for pt in points if 0 < pt.ratio < math.inf]
    fit = fit_rate(usable) if len(usable) >= 3 else None
    return GapResult(points, skipped, fit)


def sweep(plan: ExperimentPlan, algo: str, family: str, m: int = 1, w: float = 1.0, path: str | None = None):
    """One TrialRecord per budget in the plan, instances regenerated per n."""
    records = []
    for pi, n in enumerate(plan.n_grid):
        n1, n2 = plan.dimensions(n)
        spec = InstanceSpec(family, plan.p, n, n1, n2, path=path)
        records.append(
            estimate_error(algo, spec, AdaptiveConfig(n, m, w), plan.q, plan.trials, SeedSpec(plan.seed, (pi,)))
        )
    return records


def records_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(r.row())
    return buf.getvalue()


def gap_csv(result: GapResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(GAP_HEADER)
    for pt in result.points:
        writer.writerow(pt.row())
    text = buf.getvalue()
    for n, why in result.skipped:
        text += f"# skipped n={n}: {why}\n"
    if result.fit is not None:
        text += result.fit.line() + "\n"
    return text
