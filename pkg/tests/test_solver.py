"""Tests of the Spice solver: schedules, parameter rules, the eta search,
prediction and correction steps, the extended matrices and full runs."""
import importlib
import math
import numpy as np
import pytest
from scipy.linalg import eigvalsh
from spicepc.Data.constants import HISTORY_COLUMNS
from spicepc.Exceptions import DegenerateProblemError, EtaSearchError
from spicepc.Numerics.DenseLinalg import spectral_norm_sq
from spicepc.Problem.ProblemInstance import Iterate
from spicepc.Problem.Residuals import kkt_residual
from spicepc.Qcqp.QcqpGenerator import QcqpConfig, QcqpData, build_instance, generate
from spicepc.Solver.ExtendedMatrices import (
    build_matrices, check_contraction, difference_matrix, ergodic_error_bound,
    gmin_proxy, quadratic_form_symmetric_part
)
from spicepc.Solver.Parameters import (
    ParamState, compute_params, compute_r, eta_lower_bound
)
from spicepc.Solver.Scaling import ScalingSchedule, rho_value
from spicepc.Solver.SolveHistory import ergodic_average
from spicepc.Solver.SpiceSolver import (
    SolveConfig, SpiceSolver, correct, eta_search, predict, solve
)
from conftest import scalar_qcqp

# the package re-exports the SpiceSolver class under the module name
spice_solver_module = importlib.import_module('spicepc.Solver.SpiceSolver')

ignore_max_iters = pytest.mark.filterwarnings('ignore:Spice stopped at max_iters')


def _params(rho=1.0, eta=1.0, r=2.0, s=1.0, mu=1.5, R_x=1.0, R_xbar=1.0, k=0):
    return ParamState(k, rho, eta, r, s, mu, R_x, R_xbar)


class TestScalingSchedule:

    def test_values(self):
        assert rho_value(ScalingSchedule('constant'), 10) == 1.0
        assert rho_value(ScalingSchedule('power', alpha=2), 3) == 16.0
        assert rho_value(ScalingSchedule('exp', beta=2), 0) == 1.0
        assert rho_value(ScalingSchedule('exp', beta=2), 1) == pytest.approx(math.exp(2))
        assert rho_value(ScalingSchedule('powerexp'), 2) == 27.0

    def test_cap(self):
        assert ScalingSchedule('exp', cap=1e12).value(100) == 1e12
        assert ScalingSchedule('exp').value(20) == 1e12
        assert ScalingSchedule('exp').value(10000) == ScalingSchedule('exp').cap
        assert ScalingSchedule('powerexp').value(500) == ScalingSchedule('powerexp').cap

    def test_labels(self):
        assert ScalingSchedule('power', alpha=2).label == 'power2'
        assert ScalingSchedule('exp', beta=0.5).label == 'exp0.5'
        assert ScalingSchedule().label == 'constant'

    def test_invalid(self):
        with pytest.raises(ValueError, match='has to be selected from'):
            ScalingSchedule('linear')
        with pytest.raises(ValueError):
            ScalingSchedule('power', alpha=0)
        with pytest.raises(ValueError):
            ScalingSchedule('exp').value(-1)


class TestParameters:
    """The r, s rules and the eta lower bound."""

    def test_compute_params_example(self):
        assert compute_params(4.0, 4.0, 1.0, 1.5) == (2.0, 3.0)

    def test_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            R_x, R_xbar = rng.uniform(0.1, 100, 2)
            eta, mu = rng.uniform(0.1, 10), rng.uniform(1.01, 3)
            r, s = compute_params(R_x, R_xbar, eta, mu)
            assert r*s*eta**2 == pytest.approx(mu*R_xbar, rel=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateProblemError):
            compute_r(0.0, 1.0)
        with pytest.raises(DegenerateProblemError):
            compute_params(1.0, 0.0, 1.0, 1.5)

    def test_mu_must_exceed_one(self):
        with pytest.raises(ValueError):
            compute_params(1.0, 1.0, 1.0, 1.0)

    def test_eta_lower_bound(self):
        assert eta_lower_bound(1.0, 1.0, 4.0, 4.0, 4.0) == pytest.approx(2.0)
        assert eta_lower_bound(2.0, 4.0, 4.0, 4.0, 8.0) == pytest.approx(4.0)
        assert eta_lower_bound(3.0, 4.0, 4.0, 4.0, 4.0) == pytest.approx(3.0)

    def test_bound_keeps_parameters_non_increasing(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            eta_prev = rng.uniform(0.5, 5)
            R_x_prev, R_x, R_xbar_prev, R_xbar = rng.uniform(0.1, 50, 4)
            eta = eta_lower_bound(eta_prev, R_x_prev, R_x, R_xbar_prev, R_xbar)
            r_prev, s_prev = compute_params(R_x_prev, R_xbar_prev, eta_prev, 1.5)
            r, s = compute_params(R_x, R_xbar, eta, 1.5)
            assert r <= r_prev*(1 + 1e-12)
            assert s <= s_prev*(1 + 1e-12)


class TestEtaSearch:
    """Escalation of eta on a problem with a linear constraint, where
    R = 4 at every point."""

    def test_stationary(self, halfline):
        it = halfline.make_iterate([0.0], [1.0])
        found = eta_search(halfline, it, 1.0, 4.0, 4.0, SolveConfig())
        assert found.eta == 1.0
        assert found.passes == 1
        assert found.R_xbar == pytest.approx(4.0)

    def test_escalation(self, halfline):
        """A fourfold jump of R needs eta >= 2. The retry lands on the bound
        itself instead of overshooting by mu."""
        it = halfline.make_iterate([0.0], [1.0])
        found = eta_search(halfline, it, 1.0, 1.0, 4.0, SolveConfig(mu=1.5))
        assert found.passes == 2
        assert found.eta == 2.0
        assert found.r == pytest.approx(1.0)

    def test_no_compounding_after_jump(self, halfline):
        """Once R stops moving, the eta found after a jump is kept as is."""
        it = halfline.make_iterate([0.0], [1.0])
        config = SolveConfig(mu=1.5)
        first = eta_search(halfline, it, 1.0, 1.0, 4.0, config)
        second = eta_search(halfline, it, first.eta, 4.0, first.R_xbar, config)
        assert second.passes == 1
        assert second.eta == first.eta

    def test_margin_grows_on_retries(self, halfline, monkeypatch):
        """If the bound keeps moving up, later retries add a growing margin
        and eta stays within a factor mu of the bound it meets."""
        bounds = iter([2.0, 3.0, 4.0, 5.0, 5.0])
        monkeypatch.setattr(
            spice_solver_module, 'eta_lower_bound', lambda *args: next(bounds)
        )
        it = halfline.make_iterate([0.0], [1.0])
        found = eta_search(halfline, it, 1.0, 4.0, 4.0, SolveConfig(mu=1.5))
        assert found.passes == 5
        assert found.eta == pytest.approx(5.0*(1 + 1e-6))
        assert found.eta <= 1.5*5.0

    def test_budget_exhausted(self, halfline):
        it = halfline.make_iterate([0.0], [1.0])
        with pytest.raises(EtaSearchError) as info:
            eta_search(halfline, it, 1.0, 1.0, 4.0, SolveConfig(eta_max_passes=1))
        assert info.value.passes == 1
        assert info.value.eta == 1.0
        assert info.value.required == pytest.approx(2.0)


class TestPredictCorrect:

    def test_predict_example(self):
        """For f(x) = x^2, lam = 0, r = 2 and x = 3 the predictor is 1.5 and
        the dual predictor is the violation 1.5^2 - 1."""
        inst = build_instance(scalar_qcqp(a0=0.0))
        it = Iterate(np.array([3.0]), None, np.array([0.0]))
        w_bar = predict(inst, it, _params())
        np.testing.assert_allclose(w_bar.x, [1.5])
        np.testing.assert_allclose(w_bar.lam, [1.25])

    def test_predict_clamps_dual(self):
        inst = build_instance(scalar_qcqp(a0=0.0, pi=10.0))
        it = Iterate(np.array([3.0]), None, np.array([0.0]))
        w_bar = predict(inst, it, _params())
        np.testing.assert_array_equal(w_bar.lam, [0.0])

    def test_kkt_point_is_fixed(self, interval_instance, interval_solution):
        """At a KKT point with multiplier rho*eta*lam*, the predictor equals
        the iterate."""
        w_star, _ = interval_solution
        w_bar = predict(interval_instance, w_star, _params(r=2.0, s=3.0))
        np.testing.assert_allclose(w_bar.x, w_star.x, atol=1e-12)
        np.testing.assert_allclose(w_bar.lam, w_star.lam, atol=1e-12)

    def test_correct_example(self):
        it = Iterate(np.array([0.0]), None, np.array([1.5]))
        w_bar = Iterate(np.array([1.0]), None, np.array([1.0]))
        nxt = correct(it, w_bar, _params(r=2.0), np.array([[1.0]]))
        np.testing.assert_allclose(nxt.x, [1.25])
        np.testing.assert_array_equal(nxt.lam, w_bar.lam)

    def test_correct_without_dual_change(self):
        it = Iterate(np.array([5.0, 1.0]), None, np.array([2.0]))
        w_bar = Iterate(np.array([1.0, 2.0]), None, np.array([2.0]))
        nxt = correct(it, w_bar, _params(), np.array([[3.0, 4.0]]))
        np.testing.assert_array_equal(nxt.stacked(), w_bar.stacked())


class TestExtendedMatrices:
    """Q, M, H and G of one iteration."""

    def _random_case(self, rng, p=3, n=4):
        J = rng.standard_normal((p, n))
        eta = rng.uniform(0.5, 3)
        R_x = rng.uniform(1, 10)
        R_xbar = spectral_norm_sq(J, method='eigh')
        r, s = compute_params(R_x, R_xbar, eta, 1.5)
        return J, _params(eta=eta, r=r, s=s, R_x=R_x, R_xbar=R_xbar)

    def test_h_is_q_times_m_inverse(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            J, params = self._random_case(rng)
            mats = build_matrices(params, J)
            QMinv = np.linalg.solve(mats.M.T, mats.Q.T).T
            atol = 1e-12*max(1.0, np.abs(mats.Q).max())
            np.testing.assert_allclose(QMinv, mats.H, atol=atol)
            np.testing.assert_allclose(
                mats.G, mats.Q.T + mats.Q - mats.M.T @ mats.H @ mats.M, atol=atol
            )

    def test_g_dual_block_bound(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            J, params = self._random_case(rng)
            G = build_matrices(params, J).G
            n = J.shape[1]
            smallest = eigvalsh(G[n:, n:])[0]
            expected = params.s*(1 - 1/params.mu)
            assert smallest >= expected - 1e-10*(1 + params.s)
            assert gmin_proxy(params) <= expected*(1 + 1e-12)

    def test_separable_blocks(self):
        rng = np.random.default_rng(2)
        J_x, J_y = rng.standard_normal((2, 3)), rng.standard_normal((2, 2))
        mats = build_matrices(_params(), J_x, J_y)
        assert mats.Q.shape == (7, 7)
        np.testing.assert_array_equal(mats.M[:5, 5:], -np.hstack([J_x, J_y]).T/2.0)

    def test_gmin_example(self):
        assert gmin_proxy(_params(r=2.0, s=3.0, R_x=4.0, R_xbar=4.0)) == pytest.approx(1.0)

    def test_difference_matrix(self):
        p_k = _params(r=2.0, s=3.0)
        p_k1 = _params(r=1.5, s=3.0, k=1)
        D = difference_matrix(p_k, p_k1, 2, 1)
        np.testing.assert_allclose(np.diag(D), [0.5, 0.5, 0.0])

    def test_quadratic_form(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            Q = np.triu(rng.standard_normal((5, 5)))
            w = rng.standard_normal(5)
            scale = np.abs(Q).max()*(w @ w)
            assert quadratic_form_symmetric_part(Q, w) == pytest.approx(
                w @ Q @ w, abs=1e-12*scale
            )


class TestSolveConfig:

    def test_invalid(self):
        with pytest.raises(ValueError, match='has to be selected from'):
            SolveConfig(mode='admm')
        with pytest.raises(ValueError):
            SolveConfig(mu=1.0)
        with pytest.raises(ValueError):
            SolveConfig(tol=0.0)
        with pytest.raises(ValueError):
            SolveConfig(gap_tol=0.0)
        with pytest.raises(ValueError):
            SolveConfig(stall_patience=0)
        with pytest.raises(ValueError):
            SolveConfig(max_iters=0)
        with pytest.raises(TypeError):
            SolveConfig(schedule='exp')

    def test_frozen_with_constant_warns(self):
        with pytest.warns(UserWarning):
            SolveConfig(frozen_rho_at=5)

    def test_rho_at(self):
        assert SolveConfig(ScalingSchedule('power'), frozen_rho_at=3).rho_at(0) == 16.0
        assert SolveConfig(ScalingSchedule('exp'), mode='pc').rho_at(5) == 1.0
        assert SolveConfig(ScalingSchedule('power')).rho_at(1) == 4.0


class TestSolveExact:
    """Runs on instances with hand-computed solutions."""

    def test_interval(self, interval_instance, interval_solution):
        w_star, f_star = interval_solution
        config = SolveConfig(tol=1e-12, diagnostics=True)
        h = solve(interval_instance, config, x0=[0.5])
        assert h.status == 'converged'
        assert h.records[-1].delta_f <= 1e-12
        assert h.final_f == pytest.approx(f_star, rel=1e-6)
        np.testing.assert_allclose(h.final.x, w_star.x, atol=1e-4)
        assert np.all(h.final.lam >= 0)
        assert kkt_residual(interval_instance, h.final).feasibility <= 1e-6
        assert check_contraction(h, w_star) <= 1e-8*(1 + w_star.stacked() @ w_star.stacked())

    def test_disk(self, disk_data, disk_solution):
        w_star, f_star = disk_solution
        inst = build_instance(disk_data)
        h = solve(inst, SolveConfig(tol=1e-12, diagnostics=True), x0=[0.5, 0.5])
        assert h.converged
        assert h.final_f == pytest.approx(f_star, rel=1e-6)
        np.testing.assert_allclose(h.final.x, w_star.x, atol=1e-4)
        assert check_contraction(h, w_star) <= 1e-8*(1 + w_star.stacked() @ w_star.stacked())

    def test_stationary_start(self, interval_instance, interval_solution):
        """Starting at (x*, eta0*rho*lam*) stops after one iteration with all
        checks trivially satisfied."""
        w_star, f_star = interval_solution
        h = solve(
            interval_instance, SolveConfig(diagnostics=True), x0=w_star.x,
            lam0=w_star.lam
        )
        assert h.converged
        assert h.iterations == 1
        np.testing.assert_allclose(h.final.x, w_star.x, atol=1e-12)
        assert check_contraction(h, w_star) <= 1e-12*(1 + w_star.lam @ w_star.lam)
        bound = ergodic_error_bound(h, w_star, f_star)
        assert bound.objective_gap.iloc[0] <= bound.rhs.iloc[0] + 1e-8
        assert bound.lhs.iloc[0] <= bound.rhs.iloc[0] + 1e-8

    @ignore_max_iters
    def test_ergodic_bound(self, interval_instance, interval_solution):
        w_star, f_star = interval_solution
        h = solve(
            interval_instance, SolveConfig(max_iters=300, diagnostics=True),
            x0=[0.5]
        )
        bound = ergodic_error_bound(h, w_star, f_star)
        assert list(bound.columns) == ['t', 'objective_gap', 'gamma_term', 'lhs', 'rhs']
        assert len(bound) == h.iterations
        assert np.all(bound.rhs >= 0)
        assert np.all(bound.lhs <= bound.rhs + 1e-8*(1 + f_star))

    @ignore_max_iters
    def test_ergodic_bound_frozen_power_schedule(self, interval_instance, interval_solution):
        """With rho frozen at (3+1)^2 = 16 the ergodic estimate holds with the
        same rho on both sides at every t."""
        w_star, f_star = interval_solution
        config = SolveConfig(
            ScalingSchedule('power', alpha=2), frozen_rho_at=3, max_iters=300,
            diagnostics=True
        )
        h = solve(interval_instance, config, x0=[0.5])
        assert np.all(h.to_dataframe().rho == 16.0)
        bound = ergodic_error_bound(h, w_star, f_star)
        assert len(bound) == h.iterations
        assert np.all(bound.lhs <= bound.rhs + 1e-8*(1 + f_star))

    def test_ergodic_average_first(self, interval_instance):
        h = solve(interval_instance, SolveConfig(max_iters=1, diagnostics=True), x0=[0.5])
        avg = ergodic_average(h, 0)
        np.testing.assert_allclose(avg.u_bar, h.predictors[0].u, rtol=1e-15)
        np.testing.assert_allclose(avg.w_bar, h.predictors[0].stacked(), rtol=1e-15)
        assert avg.eta == pytest.approx(h.params[0].eta)

    def test_inactive_constraint_gives_least_squares(self):
        inst, data = generate(QcqpConfig(n=5, q=8, p=1, pi=1e12, seed=3))
        h = solve(inst, SolveConfig(tol=1e-12))
        x_ls = data.least_squares_point()[0]
        assert h.converged
        assert np.all(h.final.lam == 0)
        assert h.final_f == pytest.approx(data.objective_x(x_ls), rel=1e-9)
        np.testing.assert_allclose(h.final.x, x_ls, atol=1e-4*(1 + np.linalg.norm(x_ls)))


class TestSolveBehavior:

    @ignore_max_iters
    def test_parameter_invariants(self, small_generated):
        inst, _ = small_generated
        h = solve(inst, SolveConfig(max_iters=2000))
        assert h.status in ('converged', 'max_iters')
        df = h.to_dataframe(extra=True)
        r, s, eta = df.r.to_numpy(), df.s.to_numpy(), df.eta.to_numpy()
        assert np.all(r[1:] <= r[:-1]*(1 + 1e-12))
        assert np.all(s[1:] <= s[:-1]*(1 + 1e-12))
        assert np.all(eta[1:] >= eta[:-1])
        np.testing.assert_allclose(r*s*eta**2, 1.5*df.R_xbar.to_numpy(), rtol=1e-12)
        dual = s - df.R_xbar.to_numpy()/(eta**2*r)
        np.testing.assert_allclose(dual, s*(1 - 1/1.5), rtol=1e-10)
        assert np.all(df.gmin.to_numpy() <= dual*(1 + 1e-12))
        assert np.all(df.eta_passes >= 1)
        assert inst.dual_domain.contains(h.final.lam)
        for p_k, p_k1 in zip(h.params, h.params[1:]):
            D = difference_matrix(p_k, p_k1, inst.n, inst.p)
            assert np.diag(D).min() >= -1e-12*max(p_k.r, p_k.s)

    def test_history_columns(self, interval_instance):
        h = solve(interval_instance, SolveConfig(max_iters=5), x0=[0.5])
        assert list(h.to_dataframe().columns) == list(HISTORY_COLUMNS)
        assert set(h.summary()) == {'status', 'iterations', 'final_f', 'final_feas'}

    @ignore_max_iters
    def test_pc_mode_fixes_eta(self, interval_instance):
        h = solve(interval_instance, SolveConfig(mode='pc', max_iters=50), x0=[0.5])
        df = h.to_dataframe()
        assert np.all(df.eta == 1.0)
        assert np.all(df.rho == 1.0)

    def test_constant_schedule_closes_gap(self, halfline):
        """min (x - 10)^2 s.t. 2x <= 1 has x* = 0.5 and lam* = 9.5; the run
        only stops once the predictor has caught up with the iterate."""
        config = SolveConfig(tol=1e-12)
        h = solve(halfline, config, x0=[0.0])
        assert h.converged
        np.testing.assert_allclose(h.final.x, [0.5], atol=1e-6)
        gap = h.records[-1].pred_gap
        assert gap <= 2*config.gap_tol*(1 + np.linalg.norm(h.final.stacked()))

    def test_growing_schedule_stalls(self, halfline):
        """With rho(t) = e^{2t} the predictor settles at x_bar = 10 while lam
        grows by 19/3 per iteration and the corrected iterate settles at
        10 - 19/3. The objective is flat but the gap stays at sqrt(2)*19/3, so
        the run must not be reported as converged."""
        config = SolveConfig(ScalingSchedule('exp', beta=2), max_iters=1000)
        h = solve(halfline, config, x0=[0.0])
        assert h.status == 'stalled'
        assert not h.converged
        assert 'prediction gap' in h.message
        assert h.iterations < 400
        assert h.records[-1].delta_f <= config.tol
        assert h.records[-1].pred_gap == pytest.approx(math.sqrt(2)*19/3, rel=1e-6)
        assert h.final_feas == pytest.approx(2*(10 - 19/3) - 1, rel=1e-6)
        np.testing.assert_allclose(np.diff(h.to_dataframe().eta), 0.0)

    @ignore_max_iters
    def test_growing_schedule_on_generated_instance(self, desk_single):
        """At desk scale the exponential schedule flattens the objective within
        a few dozen iterations without closing the gap."""
        inst, _ = desk_single
        h = solve(inst, SolveConfig(ScalingSchedule('exp', beta=2), max_iters=500))
        assert h.status in ('stalled', 'max_iters')
        df = h.to_dataframe()
        assert df.pred_gap.iloc[-1] > 1e-6*(1 + np.linalg.norm(h.final.stacked()))

    def test_degenerate_start(self, interval_instance):
        """R vanishes at the origin, where the constraint gradient is 0."""
        h = solve(interval_instance, SolveConfig(), x0=[0.0])
        assert h.status == 'degenerate'
        assert h.iterations == 0

    def test_eta_search_failure_ends_run(self, interval_instance):
        h = solve(interval_instance, SolveConfig(eta_max_passes=1), x0=[0.5])
        assert h.status == 'eta_search_failed'
        assert h.iterations == 1
        assert 'eta search' in h.message

    def test_lam0_outside_domain(self, interval_instance):
        with pytest.raises(ValueError):
            solve(interval_instance, x0=[0.5], lam0=[-1.0])

    def test_contraction_needs_diagnostics(self, interval_instance, interval_solution):
        h = solve(interval_instance, SolveConfig(max_iters=2), x0=[0.5])
        with pytest.raises(ValueError):
            check_contraction(h, interval_solution[0])

    @ignore_max_iters
    def test_separable_with_zero_block_matches_single(self, small_generated):
        """A y-block with V = 0, c = 0 does not change the x trajectory."""
        _, data = small_generated
        zeros = QcqpData(
            data.W, data.a, data.pi, V=np.zeros((data.p+1, data.q, 2)),
            c=np.zeros((data.p+1, data.q))
        )
        config = SolveConfig(max_iters=60)
        single = solve(build_instance(data), config)
        separable = SpiceSolver(build_instance(zeros), config).solve(np.zeros(data.n))
        np.testing.assert_array_equal(
            single.to_dataframe().f.to_numpy(), separable.to_dataframe().f.to_numpy()
        )
        np.testing.assert_array_equal(single.final.x, separable.final.x)
        np.testing.assert_array_equal(separable.final.y, np.zeros(2))


@pytest.mark.slow
class TestPaperScale:
    """Runs at the full benchmark instance sizes and sweeps over seeds."""

    def test_constant_schedule_matches_pc(self):
        inst, _ = generate(QcqpConfig(n=300, q=400, p=20, seed=0))
        spice = solve(inst, SolveConfig())
        pc = solve(inst, SolveConfig(mode='pc'))
        assert spice.converged
        assert pc.converged
        assert spice.final_f == pytest.approx(pc.final_f, rel=1e-4)

    @ignore_max_iters
    def test_exp_schedule_does_not_converge(self):
        inst, _ = generate(QcqpConfig(n=300, q=400, p=20, seed=0))
        h = solve(inst, SolveConfig(ScalingSchedule('exp', beta=2), max_iters=500))
        assert h.status in ('stalled', 'max_iters')

    @pytest.mark.parametrize('seed', range(5))
    @pytest.mark.parametrize('m', [None, 50])
    def test_desk_sweep(self, seed, m):
        """Spice with rho = 1 and PC reach the same feasible optimum from the
        origin on every desk instance."""
        inst, data = generate(QcqpConfig(n=50, m=m, q=60, p=5, seed=seed))
        spice = solve(inst, SolveConfig())
        pc = solve(inst, SolveConfig(mode='pc'))
        assert spice.converged
        assert pc.converged
        assert spice.final_f == pytest.approx(pc.final_f, rel=1e-4)
        assert spice.final_feas <= 1e-3*(1 + data.pi.max())
        assert np.all(np.diff(spice.to_dataframe().eta) >= 0)
