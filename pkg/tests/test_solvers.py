import numpy as np
import pytest

from sketchlab.errors import SingularSystem
from sketchlab.linalg import pseudoinverse
from sketchlab.sketch import SketchSpec, draw_sketch
from sketchlab.solvers import (
    KaczmarzState,
    LinearSystem,
    kaczmarz_run,
    kaczmarz_step,
    min_norm_vs_ridge,
    rsn_quadratic_step,
    worst_case_rate,
)
from sketchlab.spectrum import Spectrum

KAPPA_4_1_QUARTER = 0.38101307076480155510891900489


def system(m=12, n=6, seed=0):
    a = np.random.default_rng(seed).standard_normal((m, n))
    return LinearSystem.synthetic(a, seed)


class TestLinearSystem:
    def test_inconsistent_x_star(self):
        with pytest.raises(ValueError):
            LinearSystem(np.eye(2), np.ones(2), np.zeros(2))

    def test_synthetic(self):
        sys = system()
        assert np.linalg.norm(sys.a @ sys.x_star - sys.b) <= 1e-8 * np.linalg.norm(sys.b)
        assert np.array_equal(sys.x_star, system().x_star)


class TestKaczmarzStep:
    def test_fixed_point(self):
        sys = system()
        s = np.random.default_rng(1).standard_normal((3, 12))
        out = kaczmarz_step(sys, KaczmarzState.start(sys.x_star), s)
        np.testing.assert_allclose(out.iterate, sys.x_star, atol=1e-12)
        assert out.step == 1

    def test_scalar(self):
        sys = LinearSystem(np.array([[4.0]]), np.array([2.0]))
        out = kaczmarz_step(sys, KaczmarzState.start([7.0]), np.array([[-3.0]]))
        assert out.iterate[0] == pytest.approx(0.5, rel=1e-15)

    def test_full_sketch_solves(self):
        g = np.random.default_rng(2)
        sys = LinearSystem.synthetic(g.standard_normal((6, 6)), 2)
        out = kaczmarz_step(sys, KaczmarzState.start(np.zeros(6)), g.standard_normal((6, 6)))
        np.testing.assert_allclose(out.iterate, np.linalg.solve(sys.a, sys.b), atol=1e-8)

    def test_constraint_and_row_space(self):
        sys = system()
        g = np.random.default_rng(3)
        s = g.standard_normal((3, 12))
        x0 = g.standard_normal(6)
        x1 = kaczmarz_step(sys, KaczmarzState.start(x0), s).iterate
        sa = s @ sys.a
        assert np.linalg.norm(sa @ x1 - s @ sys.b) <= 1e-8 * np.linalg.norm(s @ sys.b)
        step = x1 - x0
        np.testing.assert_allclose(pseudoinverse(sa) @ sa @ step, step, atol=1e-10)

    def test_idempotent_and_non_expansive(self):
        sys = system(seed=4)
        g = np.random.default_rng(4)
        state = KaczmarzState.start(g.standard_normal(6), keep_history=True)
        for _ in range(10):
            s = g.standard_normal((2, 12))
            nxt = kaczmarz_step(sys, state, s)
            again = kaczmarz_step(sys, nxt, s)
            assert np.linalg.norm(again.iterate - nxt.iterate) <= 1e-10
            assert np.linalg.norm(nxt.iterate - sys.x_star) <= np.linalg.norm(state.iterate - sys.x_star) + 1e-12
            state = nxt
        assert len(state.history) == 11

    def test_from_zero_is_min_norm(self):
        sys = system(seed=5)
        s = np.random.default_rng(5).standard_normal((3, 12))
        x1 = kaczmarz_step(sys, KaczmarzState.start(np.zeros(6)), s).iterate
        assert np.linalg.norm(x1 - pseudoinverse(s @ sys.a) @ (s @ sys.b)) <= 1e-10


class TestKaczmarzRun:
    def test_start_at_solution(self):
        sys = system()
        run = kaczmarz_run(sys, SketchSpec("gaussian", 2, 0), sys.x_star, 4, 5)
        assert np.all(run.mean_sq_error < 1e-24)

    def test_zero_steps(self):
        sys = system()
        x0 = np.ones(6)
        run = kaczmarz_run(sys, SketchSpec("gaussian", 2, 0), x0, 0, 3)
        np.testing.assert_array_equal(run.mean_iterates[0], x0)

    def test_decreasing_and_envelope(self):
        a = np.diag(np.sqrt(np.linspace(2, 1, 20)))
        sys = LinearSystem.synthetic(a, 3)
        run = kaczmarz_run(sys, SketchSpec("gaussian", 4, 3), np.zeros(20), 6, 200)
        sd = run.std_sq_error / np.sqrt(run.trials)
        assert np.all(np.diff(run.mean_sq_error) <= 2 * sd[1:])
        rate = worst_case_rate(Spectrum(np.linspace(2, 1, 20)), 4)
        env = rate ** np.arange(7) * run.mean_sq_error[0]
        assert np.all(run.mean_sq_error <= env + 2 * sd)

    def test_threads_do_not_matter(self):
        sys = system(seed=6)
        spec = SketchSpec("rademacher", 3, 6)
        r1 = kaczmarz_run(sys, spec, np.zeros(6), 3, 9, threads=1)
        r3 = kaczmarz_run(sys, spec, np.zeros(6), 3, 9, threads=3)
        assert r1.mean_iterates.tobytes() == r3.mean_iterates.tobytes()


class TestWorstCaseRate:
    def test_flat(self):
        assert worst_case_rate(Spectrum(np.ones(10)), 4) == pytest.approx(0.6)

    def test_three_values(self):
        assert worst_case_rate(Spectrum(np.array([4.0, 1.0, 0.25])), 2) == pytest.approx(1 - KAPPA_4_1_QUARTER)

    def test_near_rank(self):
        rates = [worst_case_rate(Spectrum(np.ones(50)), k) for k in (10, 40, 49)]
        assert rates[0] > rates[1] > rates[2] > 0
        assert rates[2] == pytest.approx(1 / 50)

    def test_singular(self):
        with pytest.raises(SingularSystem):
            worst_case_rate(Spectrum(np.array([1.0, 0.0])), 1)


class TestRsn:
    def setup_method(self):
        g = np.random.default_rng(7)
        b = g.standard_normal((6, 6))
        self.h = b @ b.T + 0.1 * np.eye(6)
        self.rhs = g.standard_normal(6)
        self.x = g.standard_normal(6)
        self.g = self.h @ self.x - self.rhs

    def test_zero_gradient(self):
        s = np.random.default_rng(8).standard_normal((2, 6))
        np.testing.assert_array_equal(rsn_quadratic_step(self.h, np.zeros(6), self.x, s), self.x)

    def test_full_sketch_is_newton(self):
        s = np.random.default_rng(9).standard_normal((6, 6))
        out = rsn_quadratic_step(self.h, self.g, self.x, s)
        np.testing.assert_allclose(out, self.x - pseudoinverse(self.h) @ self.g, atol=1e-8)

    def test_span(self):
        s = np.random.default_rng(10).standard_normal((2, 6))
        d = rsn_quadratic_step(self.h, self.g, self.x, s) - self.x
        coef, *_ = np.linalg.lstsq(s.T, d, rcond=None)
        np.testing.assert_allclose(s.T @ coef, d, atol=1e-10)

    def test_identity_hessian_matches_kaczmarz(self):
        # with H = I the step is a Kaczmarz projection for the system I x = rhs
        s = np.random.default_rng(11).standard_normal((3, 6))
        x_rsn = rsn_quadratic_step(np.eye(6), self.x - self.rhs, self.x, s)
        sys = LinearSystem(np.eye(6), self.rhs)
        x_kz = kaczmarz_step(sys, KaczmarzState.start(self.x), s).iterate
        np.testing.assert_allclose(x_rsn, x_kz, atol=1e-12)

    def test_objective_does_not_increase_on_average(self):
        f = lambda x: 0.5 * x @ self.h @ x - self.rhs @ x  # noqa: E731
        spec = SketchSpec("gaussian", 2, 12)
        drops = np.array(
            [f(self.x) - f(rsn_quadratic_step(self.h, self.g, self.x, draw_sketch(spec, 6, t))) for t in range(1000)]
        )
        assert drops.mean() >= -3 * drops.std(ddof=1) / np.sqrt(1000)
        assert np.all(drops >= -1e-10)

    def test_bad_l(self):
        with pytest.raises(ValueError):
            rsn_quadratic_step(self.h, self.g, self.x, np.eye(6), 0.0)


class TestImplicitRegularization:
    def test_zero_system(self):
        sys = LinearSystem(np.random.default_rng(0).standard_normal((10, 10)), np.zeros(10), np.zeros(10))
        out = min_norm_vs_ridge(sys, SketchSpec("gaussian", 3, 0), 5)
        assert not np.any(out.mean_min_norm_bias)
        assert not np.any(out.ridge_bias)

    def test_full_rank_sketch(self):
        sys = LinearSystem.synthetic(np.random.default_rng(1).standard_normal((8, 8)), 1)
        out = min_norm_vs_ridge(sys, SketchSpec("gaussian", 8, 1), 5)
        assert np.linalg.norm(out.mean_min_norm_bias) < 1e-9
        assert out.gamma == np.inf
