"""L-infinity norm with peak-frequency extraction, and the H2 error metric.

The L-infinity computation is the Hamiltonian bisection of Bruinsma and
Steinbuch: a candidate level gamma is a strict upper bound iff the
associated Hamiltonian matrix has no purely imaginary eigenvalues; when
it does, the imaginary parts bracket frequency intervals where some
singular value exceeds gamma, and evaluating the response there lifts
the lower bound.  Stability is not required, only the absence of
imaginary-axis poles, so the same routine serves unstable interpolants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ImaginaryAxisPoles, NonzeroFeedthrough
from .numkernels import solve_lyapunov
from .statespace import StateSpace, eval_freq

__all__ = ["LinfResult", "linf_norm", "sigma_max", "h2_error_metric"]

DEFAULT_BISECT_RTOL = 1e-6

# |Re(lambda)| below this times ||A|| disqualifies the Hamiltonian test.
AXIS_GUARD_RTOL = 1e-8

# Classification margin for "purely imaginary" Hamiltonian eigenvalues.
# Loose on purpose: a false positive only costs extra gain evaluations.
_IMAG_CLASS_RTOL = 1e-6

_MAX_LEVEL_ITERATIONS = 60


@dataclass(frozen=True)
class LinfResult:
    """Peak gain ``gamma``, a frequency attaining it within tolerance, and
    the number of Hamiltonian level tests performed.  ``omega_peak`` is
    ``math.inf`` when the supremum is approached only as omega -> inf
    (feedthrough-dominated error)."""

    gamma: float
    omega_peak: float
    iterations: int


def sigma_max(sys: StateSpace, omega: float) -> float:
    """Largest singular value of the response at ``omega``."""
    return float(np.linalg.norm(eval_freq(sys, omega), 2))


def _hamiltonian_crossings(sys: StateSpace, gamma: float) -> np.ndarray:
    """Frequencies omega >= 0 where some singular value of G(j omega) equals
    ``gamma``, read off the imaginary eigenvalues of the gamma-level
    Hamiltonian.  Empty array means gamma is a strict upper bound."""
    A, B, C, D = sys.A, sys.B, sys.C, sys.D
    q = sys.q
    R = gamma**2 * np.eye(q) - D.T @ D
    RinvDt = np.linalg.solve(R, D.T)
    RinvBt = np.linalg.solve(R, B.T)
    Acl = A + B @ RinvDt @ C
    H = np.block(
        [
            [Acl, B @ RinvBt],
            [-C.T @ (np.eye(sys.p) + D @ RinvDt) @ C, -Acl.T],
        ]
    )
    lam = np.linalg.eigvals(H)
    on_axis = np.abs(lam.real) <= _IMAG_CLASS_RTOL * np.maximum(1.0, np.abs(lam))
    omegas = np.unique(np.abs(lam[on_axis].imag))
    return omegas


def linf_norm(sys: StateSpace, rel_tol: float = DEFAULT_BISECT_RTOL) -> LinfResult:
    """Peak of sigma_max(G(j omega)) over omega in [0, inf].

    Terminates when (upper - lower) / lower <= rel_tol and returns the
    certified upper bound as ``gamma``; ``omega_peak`` is the best
    frequency actually evaluated (omega = 0 and the omega -> inf
    feedthrough limit are always candidates).
    """
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    d_gain = float(np.linalg.norm(sys.D, 2)) if sys.D.size else 0.0
    if sys.n == 0:
        return LinfResult(d_gain, 0.0, 0)

    lam_A = np.linalg.eigvals(sys.A)
    norm_A = float(np.linalg.norm(sys.A, 2))
    if np.min(np.abs(lam_A.real)) <= AXIS_GUARD_RTOL * max(1.0, norm_A):
        raise ImaginaryAxisPoles(
            "A has eigenvalues within guard distance of the imaginary axis"
        )

    best_omega = 0.0
    best_gain = -1.0

    def probe(omegas) -> float:
        nonlocal best_omega, best_gain
        top = 0.0
        for w in omegas:
            g = sigma_max(sys, float(w))
            if g > best_gain:
                best_gain, best_omega = g, float(w)
            top = max(top, g)
        return top

    # Seed candidates: DC, resonant frequencies, pole magnitudes.
    seeds = {0.0}
    seeds.update(float(v) for v in np.abs(lam_A.imag) if v > 0)
    seeds.update(float(v) for v in np.abs(lam_A))
    probe(sorted(seeds))
    gamma_lb = max(best_gain, d_gain)

    # Scale floor so exactly-cancelling systems terminate immediately.
    rough = d_gain + float(
        np.linalg.norm(sys.B) * np.linalg.norm(sys.C)
        / max(np.min(np.abs(lam_A.real)), np.finfo(float).tiny)
    )
    floor = 1e-13 * max(1.0, rough)

    iterations = 0
    gamma = gamma_lb
    while iterations < _MAX_LEVEL_ITERATIONS:
        iterations += 1
        level = max(gamma_lb * (1.0 + rel_tol), floor)
        crossings = _hamiltonian_crossings(sys, level)
        if crossings.size == 0:
            # level certified as an upper bound
            gamma = level if gamma_lb > floor else max(gamma_lb, 0.0)
            break
        tests = list(crossings)
        tests.extend(0.5 * (crossings[:-1] + crossings[1:]))
        new_lb = max(probe(tests), gamma_lb)
        if new_lb <= level:
            # tangency or classification noise: bracket is already tight
            gamma = level
            break
        gamma_lb = new_lb
    else:
        gamma = gamma_lb * (1.0 + rel_tol)

    omega_peak = best_omega if best_gain >= d_gain else math.inf
    return LinfResult(float(gamma), omega_peak, iterations)


def h2_error_metric(err_sys: StateSpace) -> float:
    """sqrt(|trace(C P C^T)|) with A P + P A^T = -B B^T.

    Equals the H2 norm when ``err_sys`` is stable; for unstable systems it
    is the same trace formula evaluated with this solver's sign
    convention, reported as a plain metric (callers flag non-norm use).
    Requires zero feedthrough.
    """
    D = err_sys.D
    scale = 1.0 + float(np.abs(err_sys.B).max(initial=0.0)) * float(
        np.abs(err_sys.C).max(initial=0.0)
    )
    if D.size and float(np.abs(D).max()) > 1e-14 * scale:
        raise NonzeroFeedthrough("H2 metric requires D = 0")
    if err_sys.n == 0:
        return 0.0
    gram = solve_lyapunov(err_sys.A, err_sys.B @ err_sys.B.T)
    value = np.trace(err_sys.C @ gram.P @ err_sys.C.T)
    return float(np.sqrt(abs(value)))
