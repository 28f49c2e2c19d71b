"""Monte Carlo pivotal draws for the common coefficient of variation.

Each replicate substitutes fresh chi-square and normal variates into the
observed summary statistics, yielding one draw from a pivotal quantity
whose percentiles bound phi.  Per replicate the base randomness layout is
fixed: k chi-squares U_i with n_i - 1 degrees of freedom, then k normals
Z_i, then one spare normal.  Every method reads from that same layout
(spare and unused variates are still drawn), so under one seed the Tian,
new, and combined pivotal values are different functions of identical
randomness.

Draw formulas, with r_i = mean_i/sd_i, n = sum n_i, and
D_i = r_i*sqrt(U_i/(n_i-1)) - Z_i/sqrt(n_i):

    tian:      weighted mean of the 1/D_i:  sum_i w_i/D_i / sum_i w_i,  w_i = n_i - 1
    new:       weighted harmonic counterpart:  n / sum_i n_i*D_i
    combined:  the plain average of the two

The new pivot is often written with a single standard normal Z against the
pooled rate, n / (sum_i n_i*sqrt(U_i/(n_i-1))*r_i - sqrt(n)*Z).  That Z
stands for the standardized deviation of the pooled inverse-CV estimate,
which the per-group deviations determine: sqrt(n)*Z = sum_i sqrt(n_i)*Z_i.
Realizing Z this way leaves the new pivot's own distribution unchanged (an
independent draw would too) but fixes the joint distribution of the two
pivots, which is what the combined average depends on.

Replicates whose denominator is exactly zero (or whose value is not
finite) are regenerated from a per-replicate sub-stream and counted in
``rejected``; results are therefore independent of how replicates are
scheduled.  Draws can be negative: the pivotal distributions have heavy
tails when any group's mean/sd ratio is small, and no truncation is
applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateDenominatorError,
    DegenerateRateError,
    NonPositiveChiSquareError,
    ValidationError,
)
from .estimators import vj_interval
from .model import (
    Alternative,
    IntervalResult,
    Method,
    PIVOTAL_METHODS,
    SampleSummary,
    Study,
    TestResult,
)
from .randgen import ROLE_PIVOT_BLOCK, ROLE_RESAMPLE, SeededStream

_MIN_DRAWS = 100
_BLOCK = 1 << 15
_MAX_RESAMPLE_ATTEMPTS = 1000
_MAX_REJECTED_FRACTION = 0.01


@dataclass(frozen=True)
class PivotalDraws:
    """Monte Carlo draws of one pivotal quantity.

    ``rejected`` counts degenerate draws that were discarded and
    regenerated; ``values`` always holds exactly the requested m draws.
    """

    method: Method
    values: np.ndarray
    seed: int
    rejected: int

    @property
    def m(self) -> int:
        return int(self.values.size)


def _groups(study: Study | Sequence[SampleSummary]) -> tuple[SampleSummary, ...]:
    if isinstance(study, Study):
        return study.groups
    return tuple(study)


def variance_pivot_draw(summary: SampleSummary, u: float) -> float:
    """Pivotal draw for one group variance: (n-1)*sd^2 / u, u ~ chi2(n-1)."""
    if u <= 0.0:
        raise NonPositiveChiSquareError(f"chi-square realization must be positive, got {u}")
    return (summary.n - 1) * summary.variance / u


class _DrawContext:
    """Precomputed study constants shared by all draw formulas."""

    def __init__(self, study):
        groups = _groups(study)
        self.k = len(groups)
        self.ns = np.array([g.n for g in groups], dtype=float)
        self.dfs_int = np.array([g.n - 1 for g in groups])
        self.dfs = self.dfs_int.astype(float)
        self.ratios = np.array([g.mean / g.sd for g in groups])
        self.sqrt_ns = np.sqrt(self.ns)
        self.total_n = float(self.ns.sum())
        self.sqrt_total = math.sqrt(self.total_n)
        self.wsum = float(self.dfs.sum())

    def tian_values(self, u, zg):
        # u, zg: (b, k) arrays -> (values, degenerate_mask), both length b.
        d = self.ratios * np.sqrt(u / self.dfs) - zg / self.sqrt_ns
        bad = np.any(d == 0.0, axis=1)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            vals = np.sum(self.dfs / d, axis=1) / self.wsum
        return vals, bad | ~np.isfinite(vals)

    def new_values(self, u, z_common):
        den = np.sum(self.ns * np.sqrt(u / self.dfs) * self.ratios, axis=1) - self.sqrt_total * z_common
        bad = den == 0.0
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            vals = self.total_n / den
        return vals, bad | ~np.isfinite(vals)

    def pooled_z(self, zg):
        # sqrt(n) times the pooled-estimate deviation, written in the
        # per-group normals: sum_i sqrt(n_i)*Z_i / sqrt(n).
        return zg @ self.sqrt_ns / self.sqrt_total

    def method_values(self, method, u, zg, z0):
        # z0 is the layout's spare normal; no current formula consumes it.
        if method is Method.TIAN:
            return self.tian_values(u, zg)
        if method is Method.NEW:
            return self.new_values(u, self.pooled_z(zg))
        if method is Method.COMBINED:
            t, t_bad = self.tian_values(u, zg)
            s, s_bad = self.new_values(u, self.pooled_z(zg))
            vals = 0.5 * (t + s)
            return vals, t_bad | s_bad | ~np.isfinite(vals)
        raise ValidationError(f"not a pivotal method: {method}")


def tian_draw(study: Study | Sequence[SampleSummary], u: Sequence[float], z: Sequence[float]) -> float:
    """One draw of the group-weighted pivotal (weights n_i - 1)."""
    ctx = _DrawContext(study)
    vals, bad = ctx.tian_values(np.atleast_2d(np.asarray(u, float)), np.atleast_2d(np.asarray(z, float)))
    if bad[0]:
        raise DegenerateDenominatorError("zero denominator in pivotal draw")
    return float(vals[0])


def new_method_draw(study: Study | Sequence[SampleSummary], u: Sequence[float], z_common: float) -> float:
    """One draw of the pooled inverse-CV pivotal.

    z_common is the standard normal attached to the pooled estimate; to
    pair a draw with per-group normals z_i (as the engine does), pass
    sum_i sqrt(n_i)*z_i / sqrt(n).
    """
    ctx = _DrawContext(study)
    vals, bad = ctx.new_values(np.atleast_2d(np.asarray(u, float)), np.asarray([z_common], float))
    if bad[0]:
        raise DegenerateDenominatorError("zero denominator in pivotal draw")
    return float(vals[0])


def combined_draw(tian_value: float, new_value: float) -> float:
    """Average of the two pivotal draws for one replicate."""
    return 0.5 * (tian_value + new_value)


def _pivot_value_arrays(study, methods, m, seed):
    """Shared engine: m draws per requested method from one base layout.

    Returns ({method: values}, {method: rejected_count}).  Per-method
    degenerate replicates are regenerated independently, each from the
    sub-stream keyed by its replicate index, so a method's output is
    identical whether it is computed alone or alongside others.
    """
    if m < _MIN_DRAWS:
        raise ValidationError(f"need at least {_MIN_DRAWS} draws, got {m}")
    for method in methods:
        if method not in PIVOTAL_METHODS:
            raise ValidationError(f"not a pivotal method: {method}")
    ctx = _DrawContext(study)
    base = SeededStream(seed)

    values = {method: np.empty(m) for method in methods}
    bad_masks = {method: np.empty(m, dtype=bool) for method in methods}

    for start in range(0, m, _BLOCK):
        stop = min(start + _BLOCK, m)
        b = stop - start
        stream = base.substream(ROLE_PIVOT_BLOCK, start // _BLOCK)
        u = stream.chi_square(ctx.dfs_int, size=(b, ctx.k))
        zg = stream.standard_normal((b, ctx.k))
        z0 = stream.standard_normal(b)
        for method in methods:
            vals, bad = ctx.method_values(method, u, zg, z0)
            values[method][start:stop] = vals
            bad_masks[method][start:stop] = bad

    rejected = {}
    for method in methods:
        count = 0
        for r in np.nonzero(bad_masks[method])[0]:
            stream = base.substream(ROLE_RESAMPLE, int(r))
            for _ in range(_MAX_RESAMPLE_ATTEMPTS):
                u = stream.chi_square(ctx.dfs_int, size=(1, ctx.k))
                zg = stream.standard_normal((1, ctx.k))
                z0 = stream.standard_normal(1)
                vals, bad = ctx.method_values(method, u, zg, z0)
                if not bad[0]:
                    values[method][r] = vals[0]
                    break
                count += 1
            else:
                raise DegenerateRateError(
                    f"replicate {int(r)} stayed degenerate after {_MAX_RESAMPLE_ATTEMPTS} attempts"
                )
            count += 1  # the original degenerate draw
        if count and count / (m + count) >= _MAX_REJECTED_FRACTION:
            raise DegenerateRateError(
                f"{count} degenerate draws out of {m + count} attempts; data look pathological"
            )
        rejected[method] = count
    return values, rejected


def generate_draws(study: Study | Sequence[SampleSummary], method: Method, m: int, seed: int) -> PivotalDraws:
    """Generate m pivotal draws for one method.

    Deterministic in (study, method, m, seed); methods sharing a seed
    share the underlying chi-square/normal variates.
    """
    values, rejected = _pivot_value_arrays(study, (method,), m, seed)
    return PivotalDraws(method=method, values=values[method], seed=seed, rejected=rejected[method])


def quantile(draws: PivotalDraws | np.ndarray, p: float) -> float:
    """Lower empirical quantile: the ceil(p*m)-th order statistic (1-based).

    No interpolation.  The product p*m is evaluated with a 1e-9 slack so
    that fractions like 0.025 * 10**6, which float arithmetic carries a
    hair above the exact integer, still select the intended rank.
    """
    if not 0.0 < p < 1.0:
        raise ValidationError(f"quantile level must be in (0, 1), got {p}")
    vals = draws.values if isinstance(draws, PivotalDraws) else np.asarray(draws, float)
    m = vals.size
    rank = math.ceil(p * m - 1e-9)
    rank = min(max(rank, 1), m)
    return float(np.partition(vals, rank - 1)[rank - 1])


def gpq_interval(study: Study, method: Method, level: float, m: int, seed: int) -> IntervalResult:
    """Equal-tailed Monte Carlo interval from m pivotal draws."""
    if not 0.0 < level < 1.0:
        raise ValidationError(f"confidence level must be in (0, 1), got {level}")
    draws = generate_draws(study, method, m, seed)
    alpha = 1.0 - level
    return IntervalResult(
        method=method,
        level=level,
        lower=quantile(draws, alpha / 2.0),
        upper=quantile(draws, 1.0 - alpha / 2.0),
        draws=m,
        seed=seed,
    )


def gpq_test(
    study: Study,
    method: Method,
    phi0: float,
    alternative: Alternative,
    m: int,
    seed: int,
) -> TestResult:
    """Monte Carlo p-value for H0 about phi, from the same draws a
    same-seed interval would use.

    The proportion of draws at or below phi0 estimates the evidence for
    phi > phi0 and vice versa; the two-sided p-value doubles the smaller
    tail and is capped at 1.
    """
    if not math.isfinite(phi0):
        raise ValidationError(f"null value must be finite, got {phi0}")
    draws = generate_draws(study, method, m, seed)
    p_le = float(np.count_nonzero(draws.values <= phi0)) / m
    p_ge = float(np.count_nonzero(draws.values >= phi0)) / m
    if alternative is Alternative.GREATER:
        p = p_le
    elif alternative is Alternative.LESS:
        p = p_ge
    else:
        p = min(1.0, 2.0 * min(p_le, p_ge))
    return TestResult(
        method=method, phi0=phi0, alternative=alternative, p_value=p, draws=m, seed=seed
    )


def confidence_interval(study: Study, method: Method, level: float, m: int, seed: int) -> IntervalResult:
    """Uniform front door over all four methods."""
    if method is Method.VERRILL_JOHNSON:
        return vj_interval(study, level)
    return gpq_interval(study, method, level, m, seed)
