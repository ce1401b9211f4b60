"""Adaptive rational interpolation: blocks, weights, realization, driver."""

import math

import numpy as np
import pytest
from scipy.integrate import quad_vec

from sysmor import (
    BlockRealization,
    ImaginaryAxisPoles,
    InsufficientSpectrum,
    Interpolant,
    LinfResult,
    NonRealSampleAtZero,
    ResidualImaginaryPoles,
    SingularW0,
    StateSpace,
    StoppingOptions,
    SupportPoint,
    UnstableInput,
    WeightMatrix,
    assemble_error_system,
    build_block,
    compute_X,
    eval_freq,
    linf_norm,
    realize_interpolant,
    reduce,
    sample_support_point,
    sigma_max,
    solve_weights,
    static_gain,
    subtract,
)
from conftest import random_orthogonal, random_stable, tf_eval

FIRST_ORDER = StateSpace([[-1.0]], [[1.0]], [[1.0]], [[0.0]])


def nm_eval(blocks, D, s):
    """Direct evaluation of the stacked pair [N(s) M(s)].

    The first row block is the constant [D I]; every support block k
    contributes [(sI - A_k)^-1 B1_k, (sI - A_k)^-1 B2_k].
    """
    D = np.atleast_2d(D)
    p = D.shape[0]
    N_rows = [D.astype(complex)]
    M_rows = [np.eye(p, dtype=complex)]
    for blk in blocks:
        inv = np.linalg.inv(s * np.eye(blk.order) - blk.A)
        N_rows.append(inv @ blk.B1)
        M_rows.append(inv @ blk.B2)
    return np.vstack(N_rows), np.vstack(M_rows)


class TestBuildBlock:
    def test_zero_frequency_scalar(self):
        blk = build_block(SupportPoint(0.0, np.array([[1.0 + 0.0j]])))
        np.testing.assert_array_equal(blk.A, [[0.0]])
        np.testing.assert_array_equal(blk.B1, [[1.0]])
        np.testing.assert_array_equal(blk.B2, [[1.0]])
        assert blk.order == 1

    def test_nonzero_frequency_scalar(self):
        blk = build_block(SupportPoint(2.0, np.array([[1.0 + 1.0j]])))
        np.testing.assert_array_equal(blk.A, [[0.0, 2.0], [-2.0, 0.0]])
        np.testing.assert_array_equal(blk.B1, [[1.0], [-1.0]])
        np.testing.assert_array_equal(blk.B2, [[1.0], [0.0]])
        assert blk.order == 2

    def test_rational_forms(self):
        # For the sample g at omega, the block realizes
        # N(s) = (g_r s - g_i w) / (s^2 + w^2) stacked over
        #        -(g_i s + g_r w) / (s^2 + w^2)
        # and M(s) = [s; -w] / (s^2 + w^2).
        omega, g = 2.0, 1.0 + 1.0j
        blk = build_block(SupportPoint(omega, np.array([[g]])))
        s = 0.7j
        inv = np.linalg.inv(s * np.eye(2) - blk.A)
        den = s * s + omega * omega
        np.testing.assert_allclose(
            inv @ blk.B1,
            np.array([[g.real * s - g.imag * omega], [-(g.imag * s + g.real * omega)]])
            / den,
            atol=1e-14,
        )
        np.testing.assert_allclose(
            inv @ blk.B2, np.array([[s], [-omega]]) / den, atol=1e-14
        )

    def test_size_scales_with_outputs(self):
        rng = np.random.default_rng(51)
        val = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        blk = build_block(SupportPoint(1.5, val))
        assert blk.order == 6
        assert blk.B1.shape == (6, 2)
        assert blk.B2.shape == (6, 3)
        real_val = rng.standard_normal((3, 2)).astype(complex)
        blk0 = build_block(SupportPoint(0.0, real_val))
        assert blk0.order == 3

    def test_complex_sample_at_zero_rejected(self):
        with pytest.raises(NonRealSampleAtZero):
            build_block(SupportPoint(0.0, np.array([[1.0 + 1.0j]])))

    def test_negative_frequency_rejected(self):
        with pytest.raises(ValueError):
            build_block(SupportPoint(-1.0, np.array([[1.0 + 0.0j]])))

    def test_sample_support_point(self):
        pt = sample_support_point(FIRST_ORDER, 1.0)
        assert not pt.is_zero
        assert pt.sample[0, 0] == pytest.approx((1 - 1j) / 2)
        assert sample_support_point(FIRST_ORDER, 0.0).is_zero


class TestAssembleErrorSystem:
    def test_matches_rational_oracle(self):
        rng = np.random.default_rng(52)
        sys = random_stable(rng, n=7, q=2, p=2, feedthrough=True)
        blocks = [
            build_block(sample_support_point(sys, 0.0)),
            build_block(sample_support_point(sys, 1.3)),
        ]
        h = assemble_error_system(blocks, sys)
        for omega in (0.4, 2.9, 11.0):
            N, M = nm_eval(blocks, sys.D, 1j * omega)
            expect = N - M @ eval_freq(sys, omega)
            np.testing.assert_allclose(eval_freq(h, omega), expect, atol=1e-9)

    def test_block_states_cancel(self):
        rng = np.random.default_rng(53)
        sys = random_stable(rng, n=6, q=2, p=2)
        blocks = [
            build_block(sample_support_point(sys, 0.0)),
            build_block(sample_support_point(sys, 2.0)),
        ]
        h = assemble_error_system(blocks, sys)
        # Only the dynamics of the sampled model survive the cancellation.
        assert h.n == sys.n
        lam = np.linalg.eigvals(h.A)
        assert np.max(lam.real) < 0

    def test_interpolation_encoded_in_residues(self):
        # N_k - M_k G has a removable singularity at j*omega exactly when
        # (A_k + j*omega I)(B1_k - B2_k G(j*omega)) = 0; that identity is
        # what lets minreal cancel the block modes.
        rng = np.random.default_rng(54)
        sys = random_stable(rng, n=6, q=2, p=2)
        for omega in (0.0, 1.7):
            blk = build_block(sample_support_point(sys, omega))
            G = eval_freq(sys, omega)
            res = (blk.A + 1j * omega * np.eye(blk.order)) @ (blk.B1 - blk.B2 @ G)
            assert np.abs(res).max() <= 1e-12 * (1.0 + np.abs(G).max())

    def test_no_blocks_gives_feedthrough_error(self):
        rng = np.random.default_rng(55)
        sys = random_stable(rng, n=4, q=2, p=2, feedthrough=True)
        h = assemble_error_system([], sys)
        np.testing.assert_allclose(
            eval_freq(h, 0.9), sys.D - eval_freq(sys, 0.9), atol=1e-11
        )

    def test_static_model_no_blocks_is_zero(self):
        sys = static_gain([[2.0, 1.0]])
        h = assemble_error_system([], sys)
        assert h.n == 0
        np.testing.assert_array_equal(h.D, np.zeros((1, 2)))

    def test_wrong_sample_leaves_axis_poles(self):
        # A sample that is not G(j*omega) cannot cancel the block modes.
        blk = build_block(SupportPoint(1.0, np.array([[123.0 + 0.0j]])))
        with pytest.raises(ResidualImaginaryPoles):
            assemble_error_system([blk], FIRST_ORDER)


class TestComputeX:
    def test_first_order_closed_form(self):
        # H = 1/(s+1): P = 1/2, C = 1, so X = [[0.5]].
        X = compute_X(FIRST_ORDER)
        np.testing.assert_allclose(X, [[0.5]], rtol=1e-12)

    def test_static_system_gives_zero(self):
        X = compute_X(static_gain(np.zeros((3, 2))))
        np.testing.assert_array_equal(X, np.zeros((3, 3)))

    def test_quadrature_oracle(self):
        # X = (1/pi) * Re integral_0^inf H(jw) H(jw)^* dw.
        rng = np.random.default_rng(56)
        sys = random_stable(rng, n=5, q=2, p=3)

        def integrand(omega):
            H = eval_freq(sys, omega)
            return (H @ H.conj().T).real.ravel()

        integral, _ = quad_vec(integrand, 0.0, np.inf)
        oracle = integral.reshape(3, 3) / math.pi
        np.testing.assert_allclose(compute_X(sys), oracle, atol=1e-8)

    def test_symmetric_psd(self):
        rng = np.random.default_rng(57)
        sys = random_stable(rng, n=8, q=2, p=4)
        X = compute_X(sys)
        np.testing.assert_allclose(X, X.T, atol=1e-13)
        assert np.min(np.linalg.eigvalsh(X)) >= -1e-12 * np.trace(X)


class TestSolveWeights:
    def test_picks_smallest_distinct_nonzero(self):
        weight = solve_weights(np.diag([0.0, 1.0, 2.0, 3.0]), p=2)
        assert weight.selected_eigenvalues == (1.0, 2.0)
        assert not weight.degenerate
        np.testing.assert_allclose(
            np.abs(weight.W),
            [[0, 1, 0, 0], [0, 0, 1, 0]],
            atol=1e-12,
        )
        assert weight.objective == pytest.approx(3.0)

    def test_rows_orthonormal(self):
        rng = np.random.default_rng(58)
        M = rng.standard_normal((6, 6))
        weight = solve_weights(M @ M.T, p=3)
        np.testing.assert_allclose(weight.W @ weight.W.T, np.eye(3), atol=1e-12)

    def test_identity_spectrum_single_row(self):
        weight = solve_weights(np.eye(4), p=1)
        assert weight.objective == pytest.approx(1.0)
        assert not weight.degenerate

    def test_insufficient_nonzero_eigenvalues(self):
        with pytest.raises(InsufficientSpectrum):
            solve_weights(np.diag([0.0, 0.0, 0.0, 1.0]), p=2)

    def test_zero_matrix_rejected(self):
        with pytest.raises(InsufficientSpectrum):
            solve_weights(np.zeros((3, 3)), p=1)

    def test_repeated_eigenvalues_flagged_degenerate(self):
        weight = solve_weights(np.diag([1.0, 1.0]), p=2)
        assert weight.degenerate
        assert weight.selected_eigenvalues == (1.0, 1.0)

    def test_w0_condition_scalar_row(self):
        weight = WeightMatrix(np.array([[0.6, 0.8]]), (1.0,))
        assert weight.w0_condition == pytest.approx(1.0 / 0.6)

    def test_invalid_p(self):
        with pytest.raises(ValueError):
            solve_weights(np.eye(2), p=0)


class TestRealizeInterpolant:
    def test_no_blocks_returns_feedthrough(self):
        D = np.array([[1.0, 2.0]])
        sys = realize_interpolant([], WeightMatrix(np.eye(1), ()), D)
        assert sys.n == 0
        np.testing.assert_array_equal(sys.D, D)

    def test_single_iteration_interpolates(self):
        rng = np.random.default_rng(59)
        g = random_stable(rng, n=8, q=2, p=2)
        omega = 1.3
        blocks = [build_block(sample_support_point(g, omega))]
        X = compute_X(assemble_error_system(blocks, g))
        weight = solve_weights(X, g.p)
        r = realize_interpolant(blocks, weight, g.D)
        assert r.n == 4
        gap = np.linalg.norm(eval_freq(r, omega) - eval_freq(g, omega), 2)
        assert gap <= 1e-8 * (1.0 + sigma_max(g, omega))

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(60)
        g = random_stable(rng, n=6, q=2, p=2)
        blocks = [build_block(sample_support_point(g, 0.8))]
        weight = solve_weights(compute_X(assemble_error_system(blocks, g)), g.p)
        r = realize_interpolant(blocks, weight, g.D)
        v_pos = tf_eval(r.A, r.B, r.C, r.D, 1j * 2.4)
        v_neg = tf_eval(r.A, r.B, r.C, r.D, -1j * 2.4)
        np.testing.assert_allclose(v_neg, v_pos.conj(), atol=1e-12)

    def test_singular_normalization_rejected(self):
        blocks = [build_block(SupportPoint(0.0, np.array([[1.0 + 0.0j]])))]
        bad = WeightMatrix(np.array([[1e-15, 1.0]]), (1.0,))
        with pytest.raises(SingularW0):
            realize_interpolant(blocks, bad, np.zeros((1, 1)))

    def test_weight_width_checked(self):
        blocks = [build_block(SupportPoint(0.0, np.array([[1.0 + 0.0j]])))]
        with pytest.raises(ValueError):
            realize_interpolant(blocks, WeightMatrix(np.eye(1), ()), np.zeros((1, 1)))


class TestReduceDriver:
    def test_static_model_is_exact_immediately(self):
        sys = static_gain([[1.0, -2.0], [0.5, 3.0]])
        chosen, report = reduce(sys)
        assert chosen.order == 0
        np.testing.assert_array_equal(chosen.sys.D, sys.D)
        assert report.termination == "error at numerical floor"
        assert len(report.records) == 1

    def test_first_order_hand_run(self):
        # One pass on 1/(s+1) interpolates at omega = 0; excluding the
        # exactly-interpolated direction leaves the reflected pole, so the
        # iterate is -1/(s-1) in closed form: matches at s = 0, unstable.
        opts = StoppingOptions(max_iterations=1, keep_best=False)
        chosen, report = reduce(FIRST_ORDER, opts)
        np.testing.assert_allclose(chosen.sys.A, [[1.0]], atol=1e-10)
        np.testing.assert_allclose(chosen.sys.B, [[-1.0]], atol=1e-10)
        np.testing.assert_allclose(chosen.sys.C, [[1.0]], atol=1e-10)
        np.testing.assert_array_equal(chosen.sys.D, [[0.0]])
        assert eval_freq(chosen.sys, 0.0)[0, 0] == pytest.approx(1.0, abs=1e-12)
        rec = report.records[-1]
        assert rec.omega == 0.0
        assert rec.order == 1
        assert not rec.stable
        assert rec.h2_metric is None  # mirrored poles make the metric ill-posed
        assert report.termination == "max_iterations reached"

    def test_order_growth_matches_frequency_type(self):
        rng = np.random.default_rng(61)
        sys = random_stable(rng, n=14, q=2, p=2)
        _, report = reduce(sys, StoppingOptions(max_iterations=4, keep_best=False))
        prev = 0
        for rec in report.records[1:]:
            if rec.action != "add":
                continue
            step = sys.p if rec.omega == 0.0 else 2 * sys.p
            assert rec.order - prev == step
            prev = rec.order

    def test_interpolation_at_all_support_points(self):
        rng = np.random.default_rng(62)
        sys = random_stable(rng, n=16, q=2, p=2)
        chosen, _ = reduce(sys, StoppingOptions(max_iterations=5))
        assert chosen.weights.w0_condition < 1e8
        for pt in chosen.support:
            gap = np.linalg.norm(eval_freq(chosen.sys, pt.omega) - pt.sample, 2)
            assert gap <= 1e-8 * (1.0 + np.linalg.norm(pt.sample, 2))

    def test_keep_best_returns_smallest_error(self):
        rng = np.random.default_rng(63)
        sys = random_stable(rng, n=12, q=1, p=1)
        chosen, report = reduce(sys, StoppingOptions(max_iterations=6))
        errors = [r.linf_error for r in report.records]
        assert report.best_iteration == int(np.argmin(errors))
        recheck = linf_norm(subtract(sys, chosen.sys))
        assert recheck.gamma <= min(errors) * (1.0 + 1e-4) + 1e-12

    def test_error_decreases_on_rich_model(self):
        rng = np.random.default_rng(64)
        sys = random_stable(rng, n=18, q=2, p=2)
        _, report = reduce(sys, StoppingOptions(max_iterations=5))
        errors = [r.linf_error for r in report.records]
        assert min(errors) < errors[0]

    def test_unstable_model_rejected(self):
        unstable = StateSpace([[1.0]], [[1.0]], [[1.0]], [[0.0]])
        with pytest.raises(UnstableInput):
            reduce(unstable)

    def test_target_linf_stops_early(self):
        rng = np.random.default_rng(65)
        sys = random_stable(rng, n=12, q=2, p=2)
        first = linf_norm(subtract(sys, static_gain(sys.D))).gamma
        _, report = reduce(
            sys, StoppingOptions(max_iterations=15, target_linf=0.8 * first)
        )
        assert report.termination == "target_linf reached"
        assert report.records[-1].linf_error <= 0.8 * first

    def test_target_order_respected(self):
        rng = np.random.default_rng(66)
        sys = random_stable(rng, n=14, q=2, p=2)
        _, report = reduce(
            sys,
            StoppingOptions(max_iterations=10, target_order=4, keep_best=False),
        )
        assert report.termination == "target_order would be exceeded"
        assert all(r.order <= 4 for r in report.records)

    def test_coordinate_change_invariance(self):
        rng = np.random.default_rng(67)
        sys = random_stable(rng, n=10, q=2, p=2)
        Q = random_orthogonal(rng, 10)
        rotated = StateSpace(Q.T @ sys.A @ Q, Q.T @ sys.B, sys.C @ Q, sys.D)
        opts = StoppingOptions(max_iterations=3, keep_best=False)
        a, _ = reduce(sys, opts)
        b, _ = reduce(rotated, opts)
        for omega in (0.0, 0.7, 3.1):
            np.testing.assert_allclose(
                eval_freq(a.sys, omega), eval_freq(b.sys, omega), atol=1e-9
            )

    def test_duplicate_peak_terminates_with_warning(self, monkeypatch):
        import sysmor.sysaaa as mod

        def pinned(err, rel_tol=1e-6):
            return LinfResult(gamma=1.0, omega_peak=1.3, iterations=1)

        monkeypatch.setattr(mod, "linf_norm", pinned)
        rng = np.random.default_rng(68)
        sys = random_stable(rng, n=6, q=1, p=1)
        _, report = reduce(sys, StoppingOptions(max_iterations=10))
        assert report.termination == "duplicate support point"
        assert any(w.startswith("DuplicateSupportPoint") for w in report.warnings)

    def test_peak_at_infinity_terminates(self, monkeypatch):
        # A supremum approached only as omega -> inf leaves nothing to
        # sample; the driver must stop instead of chasing it.
        import sysmor.sysaaa as mod

        monkeypatch.setattr(
            mod, "linf_norm", lambda err, rel_tol=1e-6: LinfResult(0.5, math.inf, 1)
        )
        rng = np.random.default_rng(70)
        sys = random_stable(rng, n=6, q=1, p=1)
        chosen, report = reduce(sys)
        assert report.termination == "no finite peak frequency"
        assert chosen.order == 0
        assert report.warnings

    def test_axis_pole_iterate_terminates_gracefully(self):
        # s/(s+1) is a hard target for this scheme; iterates eventually
        # pick up imaginary-axis poles, which must end the loop (not
        # raise) and still hand back the best certified iterate.
        highpass = StateSpace([[-1.0]], [[1.0]], [[-1.0]], [[1.0]])
        chosen, report = reduce(highpass)
        assert report.termination is not None
        finite = [r.linf_error for r in report.records if math.isfinite(r.linf_error)]
        best = linf_norm(subtract(highpass, chosen.sys)).gamma
        assert best <= min(finite) * (1.0 + 1e-4)

    def test_report_metadata(self):
        rng = np.random.default_rng(69)
        sys = random_stable(rng, n=8, q=2, p=2)
        chosen, report = reduce(sys, StoppingOptions(max_iterations=2))
        assert report.method == "sys-aaa"
        assert report.records[0].action == "init"
        assert isinstance(chosen, Interpolant)
        assert chosen.order == chosen.sys.n
        doc = report.to_dict()
        assert doc["method"] == "sys-aaa"
        assert len(doc["records"]) == len(report.records)
