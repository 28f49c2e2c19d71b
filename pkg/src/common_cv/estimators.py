"""Point estimators and the likelihood machinery for the common CV model.

Groups are independent samples x_ij ~ Normal(mu_i, sigma_i^2), j = 1..n_i,
constrained to share one coefficient of variation phi = sigma_i/mu_i.  With
theta = (phi, sigma_1..sigma_k) and mu_i = sigma_i/phi, the log likelihood
in terms of the sufficient statistics (n_i, mean_i, sd_i) is

    sum_i [ -n_i*ln(sigma_i)
            - ((n_i-1)*sd_i^2 + n_i*(mean_i - sigma_i/phi)^2) / (2*sigma_i^2) ]
    - (n/2)*ln(2*pi),            n = sum_i n_i.

Three closed-form estimators are provided, plus a Newton maximizer of the
likelihood above and the asymptotic (Wald) interval built on it.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.stats import norm

from .errors import (
    DegenerateDenominatorError,
    NoConvergenceError,
    NonPositiveSigmaError,
    SingularHessianError,
    ValidationError,
)
from .model import IntervalResult, Method, ParameterVector, SampleSummary, Study

_MAX_NEWTON_ITERATIONS = 100
_MAX_STEP_HALVINGS = 30
_GRADIENT_TOLERANCE = 1e-9  # scaled by total n in the stopping rule
_PHI_BOUNDS = (1e-6, 1e6)
_LL_SLACK = 1e-10  # relative likelihood wiggle treated as "no worse"
_ENDGAME_SHRINK = 0.5  # required gradient-norm factor when the likelihood is flat


def _groups(study: Study | Sequence[SampleSummary]) -> tuple[SampleSummary, ...]:
    if isinstance(study, Study):
        return study.groups
    return tuple(study)


def _stats(study) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    groups = _groups(study)
    ns = np.array([g.n for g in groups], dtype=float)
    means = np.array([g.mean for g in groups], dtype=float)
    sds = np.array([g.sd for g in groups], dtype=float)
    return ns, means, sds


def group_cvs(study: Study | Sequence[SampleSummary]) -> np.ndarray:
    """Per-group sample coefficients of variation sd_i/mean_i."""
    return np.array([g.cv for g in _groups(study)])


def feltz_miller_estimate(study: Study | Sequence[SampleSummary]) -> float:
    """Pooled CV as the size-weighted arithmetic mean of group CVs."""
    ns, means, sds = _stats(study)
    return float(np.sum(ns * (sds / means)) / np.sum(ns))


def new_estimate(study: Study | Sequence[SampleSummary]) -> float:
    """Pooled CV as the size-weighted harmonic mean of group CVs.

    Equals n / sum_i(n_i * mean_i/sd_i); errors if the weighted sum of
    inverse CVs cancels to exactly zero (possible with mixed-sign means).
    """
    ns, means, sds = _stats(study)
    denom = float(np.sum(ns * (means / sds)))
    if denom == 0.0:
        raise DegenerateDenominatorError("weighted inverse CVs sum to zero")
    return float(np.sum(ns)) / denom


def eta_hat(study: Study | Sequence[SampleSummary], sigmas: Sequence[float]) -> float:
    """Estimate of the inverse CV 1/phi when the sigmas are treated as known:
    sum_i (n_i/sigma_i) * mean_i / n."""
    ns, means, _ = _stats(study)
    sig = np.asarray(sigmas, dtype=float)
    if sig.shape != ns.shape:
        raise ValidationError(f"expected {len(ns)} sigmas, got {sig.size}")
    if np.any(sig <= 0.0) or not np.all(np.isfinite(sig)):
        raise NonPositiveSigmaError("sigmas must be finite and positive")
    return float(np.sum(ns * means / sig) / np.sum(ns))


def _theta_arrays(theta: ParameterVector | tuple) -> tuple[float, np.ndarray]:
    if isinstance(theta, ParameterVector):
        return theta.phi, np.asarray(theta.sigmas, dtype=float)
    phi, sigmas = theta
    return float(phi), np.asarray(sigmas, dtype=float)


class _Likelihood:
    """Sufficient statistics of one study, with the likelihood, gradient and
    Hessian as plain-array evaluations (no per-call Study traversal)."""

    def __init__(self, study):
        self.ns, self.means, self.sds = _stats(study)
        self.a = (self.ns - 1.0) * self.sds**2
        self.constant = 0.5 * float(self.ns.sum()) * math.log(2.0 * math.pi)

    def value(self, phi: float, sig: np.ndarray) -> float:
        resid = self.means - sig / phi
        ss = self.a + self.ns * resid * resid
        return float(np.sum(-self.ns * np.log(sig) - ss / (2.0 * sig * sig)) - self.constant)

    def score_hessian(self, phi: float, sig: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ns, means = self.ns, self.means
        k = len(ns)
        resid = means - sig / phi  # d(resid)/d(phi) = sig/phi^2, d/d(sigma_i) = -1/phi
        ss = self.a + ns * resid**2

        g_phi = float(np.sum(-ns * resid / (sig * phi**2)))
        g_sig = -ns / sig + ss / sig**3 + ns * resid / (sig**2 * phi)

        h_phiphi = float(np.sum(-ns / phi**4 + 2.0 * ns * resid / (sig * phi**3)))
        h_phisig = ns * means / (phi**2 * sig**2)
        h_sigsig = ns / sig**2 - 3.0 * ss / sig**4 - 4.0 * ns * resid / (phi * sig**3) - ns / (phi**2 * sig**2)

        gradient = np.concatenate(([g_phi], g_sig))
        hessian = np.zeros((k + 1, k + 1))
        hessian[0, 0] = h_phiphi
        hessian[0, 1:] = h_phisig
        hessian[1:, 0] = h_phisig
        hessian[np.arange(1, k + 1), np.arange(1, k + 1)] = h_sigsig
        return gradient, hessian


def log_likelihood(study: Study | Sequence[SampleSummary], theta: ParameterVector | tuple) -> float:
    phi, sig = _theta_arrays(theta)
    return _Likelihood(study).value(phi, sig)


def score_and_hessian(
    study: Study | Sequence[SampleSummary], theta: ParameterVector | tuple
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient and Hessian of the log likelihood at theta.

    Ordering is (phi, sigma_1..sigma_k).  The sigma block of the Hessian is
    diagonal because groups only interact through phi.
    """
    phi, sig = _theta_arrays(theta)
    return _Likelihood(study).score_hessian(phi, sig)


def _solve_step(gradient: np.ndarray, hessian: np.ndarray) -> np.ndarray:
    # Newton displacement -H^{-1} g via a linear solve, never an inverse.
    try:
        step = np.linalg.solve(hessian, gradient)
    except np.linalg.LinAlgError as exc:
        raise SingularHessianError(str(exc)) from exc
    if not np.all(np.isfinite(step)):
        raise SingularHessianError("Newton step is not finite")
    return -step


def newton_step(
    study: Study | Sequence[SampleSummary], theta: ParameterVector | tuple
) -> ParameterVector:
    """One full, undamped Newton step from theta."""
    phi, sig = _theta_arrays(theta)
    gradient, hessian = score_and_hessian(study, (phi, sig))
    move = _solve_step(gradient, hessian)
    return ParameterVector(phi=phi + move[0], sigmas=tuple(sig + move[1:]))


def _in_domain(phi: float, sig: np.ndarray) -> bool:
    lo, hi = _PHI_BOUNDS
    return bool(np.all(sig > 0.0)) and lo < abs(phi) < hi


def newton_mle(study: Study | Sequence[SampleSummary]) -> ParameterVector:
    """Maximum likelihood estimate of (phi, sigma_1..sigma_k).

    Damped Newton iteration started at (harmonic pooled CV, sample sds),
    stopped when the gradient's max-norm drops below 1e-9 * n, with up to
    100 iterations.  A trial step is halved (at most 30 times) until it
    lands inside the parameter domain (all sigma > 0, |phi| within
    [1e-6, 1e6]) and raises the likelihood; once improvements sit below
    floating point resolution a step is still accepted if it at least
    halves the gradient norm.  Where the pure Newton direction fails,
    progressively larger multiples of the identity are subtracted from the
    Hessian, grading the direction toward plain gradient ascent.
    """
    lik = _Likelihood(study)
    n_total = float(lik.ns.sum())
    tol = _GRADIENT_TOLERANCE * n_total

    phi = new_estimate(study)
    sig = lik.sds.copy()
    current = lik.value(phi, sig)

    for _ in range(_MAX_NEWTON_ITERATIONS):
        gradient, hessian = lik.score_hessian(phi, sig)
        gnorm = float(np.max(np.abs(gradient)))
        if gnorm < tol:
            return ParameterVector(phi=phi, sigmas=tuple(sig))

        slack = _LL_SLACK * (1.0 + abs(current))
        shift_unit = max(1.0, float(np.max(np.abs(np.diag(hessian)))))
        accepted = False
        for shift_exp in range(-1, 18):
            if shift_exp < 0:
                shifted = hessian
            else:
                shifted = hessian - shift_unit * 10.0 ** (shift_exp - 8) * np.eye(len(gradient))
            try:
                move = _solve_step(gradient, shifted)
            except SingularHessianError:
                continue
            if float(gradient @ move) <= 0.0:
                continue  # not an ascent direction; no step length can help
            for _ in range(_MAX_STEP_HALVINGS + 1):
                cand_phi = float(phi + move[0])
                cand_sig = sig + move[1:]
                if _in_domain(cand_phi, cand_sig):
                    value = lik.value(cand_phi, cand_sig)
                    if value > current:
                        accepted = True
                        break
                    if value >= current - slack:
                        cand_grad, _ = lik.score_hessian(cand_phi, cand_sig)
                        if float(np.max(np.abs(cand_grad))) <= _ENDGAME_SHRINK * gnorm:
                            accepted = True
                            break
                move = move / 2.0
            if accepted:
                phi, sig, current = cand_phi, cand_sig, value
                break
        if not accepted:
            raise NoConvergenceError("Newton iteration stalled away from a stationary point")
    raise NoConvergenceError(f"no convergence in {_MAX_NEWTON_ITERATIONS} Newton iterations")


def vj_interval(study: Study, level: float) -> IntervalResult:
    """Asymptotic (Wald) interval around the maximum likelihood CV.

    phi_hat +/- z_{alpha/2} * sqrt((phi_hat^4 + phi_hat^2/2) / n), where n
    is the total observation count.  Deterministic, so the result carries
    draws=0 and no seed.
    """
    if not 0.0 < level < 1.0:
        raise ValidationError(f"confidence level must be in (0, 1), got {level}")
    phi = newton_mle(study).phi
    n_total = study.n
    z = float(norm.ppf(0.5 + level / 2.0))
    half = z * math.sqrt((phi**4 + phi**2 / 2.0) / n_total)
    return IntervalResult(
        method=Method.VERRILL_JOHNSON,
        level=level,
        lower=phi - half,
        upper=phi + half,
        draws=0,
        seed=None,
    )
