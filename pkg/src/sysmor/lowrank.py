"""Low-rank variant of the adaptive interpolation driver.

Instead of interpolating the full p x q sample at each support point,
each point carries a truncated SVD of its sample and only the leading
singular directions enter the block realization: a rank-r point costs r
states at omega = 0 and 2r states otherwise.  When the error peak falls
near an existing support point the driver grows that point's rank by
one (recomputing the truncation from the cached exact sample) rather
than spending a whole new block.

Models with more outputs than inputs are reduced through their dual so
the per-state cost tracks min(p, q).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import (
    DegenerateFactors,
    ImaginaryAxisPoles,
    InsufficientSpectrum,
    NonRealSampleAtZero,
    Saturated,
    SingularW0,
    UnstableInput,
)
from .norms import linf_norm
from .numkernels import svd_truncate
from .report import IterationRecord, ReductionReport
from .statespace import StateSpace, dual, is_stable, static_gain, subtract
from .sysaaa import (
    DUPLICATE_ATOL,
    DUPLICATE_RTOL,
    BlockRealization,
    Interpolant,
    StoppingOptions,
    WeightMatrix,
    _h2_of,
    _identity_weight,
    assemble_error_system,
    compute_X,
    realize_interpolant,
    sample_support_point,
    solve_weights,
)

__all__ = [
    "LowRankPoint",
    "NewPoint",
    "GrowRank",
    "truncate_sample",
    "build_lowrank_block",
    "select_or_grow",
    "reduce_lowrank",
]

# Singular values below this fraction of the largest make a block factor
# numerically rank-deficient.
_FACTOR_RTOL = 1e-12


@dataclass(frozen=True)
class LowRankPoint:
    """Support point carrying a rank-``rank`` truncated SVD of its sample.

    ``U`` (p x r) and ``V`` (q x r) have orthonormal columns, ``S`` is the
    r x r diagonal of leading singular values, and ``sample`` keeps the
    exact p x q sample so the truncation can be refreshed when the rank
    grows.  At omega = 0 all factors are real.
    """

    omega: float
    rank: int
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    sample: np.ndarray

    @property
    def is_zero(self) -> bool:
        return self.omega == 0.0

    @property
    def order(self) -> int:
        return self.rank if self.is_zero else 2 * self.rank


@dataclass(frozen=True)
class NewPoint:
    omega: float


@dataclass(frozen=True)
class GrowRank:
    index: int


def truncate_sample(omega: float, sample: np.ndarray, rank: int) -> LowRankPoint:
    """Rank-``rank`` truncated SVD of a frequency sample.

    The omega = 0 sample must be real (NonRealSampleAtZero otherwise) and
    is factored in real arithmetic.
    """
    value = np.atleast_2d(np.asarray(sample))
    omega = float(omega)
    if omega < 0:
        raise ValueError("support frequencies are nonnegative")
    if omega == 0.0:
        imag_tol = 1e-9 * max(1.0, float(np.abs(value).max()))
        if np.iscomplexobj(value) and float(np.abs(value.imag).max()) > imag_tol:
            raise NonRealSampleAtZero(
                "sample at omega = 0 has imaginary part "
                f"{float(np.abs(value.imag).max()):.3e}"
            )
        value = value.real.astype(float)
    U, s, V = svd_truncate(value, rank)
    return LowRankPoint(omega, rank, U, np.diag(s), V, value)


def build_lowrank_block(pt: LowRankPoint) -> BlockRealization:
    """Interpolation block for the leading singular directions of a point.

    omega = 0: (0_r, [S V^T, U^T]); omega > 0: the 2r-state skew pair with
    B1 = [S Re(V)^T; S Im(V)^T] and B2 = [Re(U)^T; Im(U)^T].  Raises
    DegenerateFactors when a retained singular value is numerically zero
    (the direction carries no information to interpolate).
    """
    s_diag = np.diag(pt.S)
    if s_diag.size == 0 or s_diag.min() <= _FACTOR_RTOL * max(1.0, s_diag.max()):
        raise DegenerateFactors(
            "retained singular values include a numerically zero entry"
        )
    S = pt.S.real
    if pt.is_zero:
        A = np.zeros((pt.rank, pt.rank))
        B1 = S @ pt.V.real.T
        B2 = pt.U.real.T.copy()
    else:
        r = pt.rank
        eye = np.eye(r)
        A = np.block(
            [
                [np.zeros((r, r)), pt.omega * eye],
                [-pt.omega * eye, np.zeros((r, r))],
            ]
        )
        B1 = np.vstack([S @ pt.V.real.T, S @ pt.V.imag.T])
        B2 = np.vstack([pt.U.real.T, pt.U.imag.T])
    return BlockRealization(pt.omega, A, B1, B2)


def select_or_grow(
    candidate_omega: float, points, min_dist: float
) -> NewPoint | GrowRank:
    """Decide whether a peak frequency funds a new point or a rank step.

    The candidate grows the nearest existing point when it lands within
    ``min_dist * max(1, omega_i)`` of it and that point is not yet full
    rank; Saturated is raised when it is (nothing left to refine there).
    """
    if min_dist <= 0:
        raise ValueError("min_dist must be positive")
    candidate = float(candidate_omega)
    if not points:
        return NewPoint(candidate)
    dists = [abs(candidate - pt.omega) for pt in points]
    i = int(np.argmin(dists))
    pt = points[i]
    if dists[i] < min_dist * max(1.0, pt.omega):
        full = min(pt.sample.shape)
        if pt.rank < full:
            return GrowRank(i)
        raise Saturated(
            f"support point at {pt.omega:.6g} rad/s already has full rank "
            f"{pt.rank}"
        )
    return NewPoint(candidate)


def reduce_lowrank(
    sys: StateSpace, options: StoppingOptions | None = None
) -> tuple[Interpolant, ReductionReport]:
    """Adaptive interpolation with rank-1 entry and local rank growth.

    Same skeleton and termination rules as the full driver; each record
    additionally lists the per-point ranks.  When the model has more
    outputs than inputs it is reduced through its dual and the result
    transposed back (flagged in the report).
    """
    opts = options or StoppingOptions()
    if not is_stable(sys):
        raise UnstableInput("adaptive interpolation needs a stable model")
    report = ReductionReport(method="lowrank-aaa", options=asdict(opts))
    dualized = sys.p > sys.q
    work = dual(sys) if dualized else sys
    report.dualized = dualized

    points: list[LowRankPoint] = []
    current = Interpolant(static_gain(work.D), (), _identity_weight(work.p), 0)
    err = subtract(work, current.sys)
    lres = linf_norm(err, opts.bisect_rel_tol)
    report.records.append(
        IterationRecord(
            iteration=0,
            action="init",
            omega=None,
            order=0,
            linf_error=lres.gamma,
            h2_metric=_h2_of(err),
            h2_is_norm=True,
            stable=True,
            ranks=(),
        )
    )
    report.iterates.append(current)
    floor = 1e-13 * (1.0 + lres.gamma)
    best_gamma, best_iter = lres.gamma, 0

    iteration = 0
    termination = None
    while termination is None:
        if opts.target_linf is not None and lres.gamma <= opts.target_linf:
            termination = "target_linf reached"
            break
        if lres.gamma <= floor:
            termination = "error at numerical floor"
            break
        if iteration >= opts.max_iterations:
            termination = "max_iterations reached"
            break
        if math.isinf(lres.omega_peak):
            report.warn(
                "error peak lies at omega -> inf; feedthrough is already "
                "matched, nothing to refresh"
            )
            termination = "no finite peak frequency"
            break

        omega = lres.omega_peak
        if omega < DUPLICATE_ATOL:
            omega = 0.0
        try:
            action = select_or_grow(omega, points, opts.min_dist)
        except Saturated as exc:
            report.warn(f"Saturated: {exc}")
            termination = "saturated support point"
            break

        if isinstance(action, NewPoint):
            # a fresh point nearly on top of an old one cannot happen with a
            # sane min_dist, but tiny values would stall the loop
            dup = any(
                abs(omega - pt.omega)
                <= max(DUPLICATE_ATOL, DUPLICATE_RTOL * max(omega, pt.omega))
                for pt in points
            )
            if dup:
                report.warn(
                    f"DuplicateSupportPoint: peak frequency {omega:.6g} rad/s "
                    "coincides with an existing support point; terminating"
                )
                termination = "duplicate support point"
                break
            increment = 1 if omega == 0.0 else 2
            if (
                opts.target_order is not None
                and current.order + increment > opts.target_order
            ):
                termination = "target_order would be exceeded"
                break
            sp = sample_support_point(work, omega)
            points.append(truncate_sample(sp.omega, sp.sample, 1))
            action_label, acted_omega = "add", omega
        else:
            pt = points[action.index]
            increment = 1 if pt.is_zero else 2
            if (
                opts.target_order is not None
                and current.order + increment > opts.target_order
            ):
                termination = "target_order would be exceeded"
                break
            points[action.index] = truncate_sample(
                pt.omega, pt.sample, pt.rank + 1
            )
            action_label, acted_omega = "grow", pt.omega

        iteration += 1
        blocks = [build_lowrank_block(pt) for pt in points]
        X = compute_X(assemble_error_system(blocks, work, opts.minreal_tol))
        try:
            weight = solve_weights(X, work.p)
            reduced = realize_interpolant(
                blocks, weight, work.D, opts.w0_condition_cap
            )
        except (SingularW0, InsufficientSpectrum) as exc:
            report.warn(f"{type(exc).__name__}: {exc}")
            termination = "weight computation failed"
            break
        current = Interpolant(reduced, tuple(points), weight, reduced.n)
        if weight.degenerate:
            report.warn(
                f"iteration {iteration}: repeated Gramian eigenvalues, "
                "distinctness relaxed"
            )

        err = subtract(work, reduced)
        stable = is_stable(reduced)
        try:
            lres = linf_norm(err, opts.bisect_rel_tol)
            gamma = lres.gamma
            axis_ok = True
        except ImaginaryAxisPoles:
            report.warn(f"iteration {iteration}: interpolant poles on the axis")
            gamma = math.inf
            axis_ok = False
        report.records.append(
            IterationRecord(
                iteration=iteration,
                action=action_label,
                omega=acted_omega,
                order=reduced.n,
                linf_error=gamma,
                h2_metric=_h2_of(err),
                h2_is_norm=stable,
                stable=stable,
                w0_condition=weight.w0_condition,
                ranks=tuple(pt.rank for pt in points),
            )
        )
        report.iterates.append(current)
        if gamma < best_gamma:
            best_gamma, best_iter = gamma, iteration
        if not axis_ok:
            termination = "interpolant has imaginary-axis poles"
            break

    report.termination = termination
    if opts.keep_best:
        report.best_iteration = best_iter
    else:
        report.best_iteration = report.records[-1].iteration
    chosen = report.iterates[report.best_iteration]
    if dualized:
        chosen = Interpolant(
            dual(chosen.sys), chosen.support, chosen.weights, chosen.order
        )
    return chosen, report
