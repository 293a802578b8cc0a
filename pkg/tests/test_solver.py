"""BiCGStab solver: correctness against dense LU, error semantics."""

import numpy as np
import pytest
from scipy.sparse import csr_matrix, diags, random as sprandom

from inrfem.errors import NotConverged, ZeroDiagonal
from inrfem.fem.assembly import GlobalSystem
from inrfem.solver import SolverConfig, SolveReport, solve, matvec

RNG = np.random.default_rng(11)


def _system(A, b, dim=2):
    return GlobalSystem(csr_matrix(A), np.asarray(b, dtype=float), dim)


def _random_spd_ish(n, nonsym=0.1):
    A = RNG.uniform(-1, 1, (n, n))
    A = 0.5 * (A + A.T) + nonsym * RNG.uniform(-1, 1, (n, n))
    return A + n * np.eye(n)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(tol=0.0)
        with pytest.raises(ValueError):
            SolverConfig(tol=2.0)
        with pytest.raises(ValueError):
            SolverConfig(max_iter=-1)
        with pytest.raises(ValueError):
            SolverConfig(preconditioner="amg")

    def test_default_iteration_budget(self):
        assert SolverConfig().resolved_max_iter(400) == 400
        assert SolverConfig(max_iter=7).resolved_max_iter(400) == 7


class TestSolve:
    def test_identity(self):
        b = RNG.uniform(-1, 1, 10)
        x, rep = solve(_system(np.eye(10), b),
                       SolverConfig(preconditioner="none"))
        np.testing.assert_allclose(x, b, atol=1e-10)
        assert rep.converged

    def test_zero_rhs_short_circuits(self):
        x, rep = solve(_system(np.eye(6), np.zeros(6)))
        np.testing.assert_array_equal(x, 0.0)
        assert rep.iterations == 0 and rep.converged

    @pytest.mark.parametrize("precond", ["jacobi", "ilu", "none"])
    def test_matches_dense_lu(self, precond):
        n = 60
        A = _random_spd_ish(n)
        b = RNG.uniform(-1, 1, n)
        x_ref = np.linalg.solve(A, b)
        x, rep = solve(_system(A, b), SolverConfig(tol=1e-12,
                                                   preconditioner=precond))
        assert rep.converged
        np.testing.assert_allclose(x, x_ref, atol=1e-8)

    def test_nonsymmetric_system(self):
        n = 40
        A = _random_spd_ish(n, nonsym=0.8)
        b = RNG.uniform(-1, 1, n)
        x, rep = solve(_system(A, b), SolverConfig(tol=1e-11))
        np.testing.assert_allclose(A @ x, b, atol=1e-8)

    def test_report_true_residual(self):
        n = 30
        A = _random_spd_ish(n)
        b = RNG.uniform(-1, 1, n)
        x, rep = solve(_system(A, b))
        true = np.linalg.norm(b - A @ x) / np.linalg.norm(b)
        assert rep.residual == pytest.approx(true, rel=1e-10)
        assert rep.wall_time >= 0.0

    def test_warm_start(self):
        n = 25
        A = _random_spd_ish(n)
        x_ref = RNG.uniform(-1, 1, n)
        b = A @ x_ref
        x, rep = solve(_system(A, b), SolverConfig(tol=1e-12), x0=x_ref)
        assert rep.iterations == 0
        np.testing.assert_allclose(x, x_ref, atol=1e-12)


class TestErrors:
    def test_zero_diagonal_raises_for_jacobi(self):
        A = np.eye(5)
        A[2, 2] = 0.0
        A[2, 3] = 1.0
        with pytest.raises(ZeroDiagonal):
            solve(_system(A, np.ones(5)), SolverConfig(preconditioner="jacobi"))

    def test_not_converged_carries_report(self):
        n = 50
        # stiff unpreconditioned system with a one-iteration budget
        A = diags(np.geomspace(1.0, 1e8, n)).toarray() + RNG.uniform(
            0, 1e-2, (n, n))
        b = np.ones(n)
        with pytest.raises(NotConverged) as ei:
            solve(_system(A, b), SolverConfig(max_iter=1,
                                              preconditioner="none"))
        rep = ei.value.report
        assert isinstance(rep, SolveReport)
        assert rep.iterations == 1 and not rep.converged
        assert rep.residual > SolverConfig().tol


class TestIluRobustness:
    def test_badly_scaled_rows(self):
        # rows spanning 12 orders of magnitude: equilibration keeps the
        # incomplete factorization usable
        n = 80
        scale = np.geomspace(1.0, 1e12, n)
        A = _random_spd_ish(n) * np.sqrt(np.outer(scale, scale))
        b = RNG.uniform(-1, 1, n)
        x, rep = solve(_system(A, b), SolverConfig(tol=1e-10))
        assert rep.converged
        np.testing.assert_allclose(A @ x, b, atol=1e-7 * np.abs(b).max()
                                   * scale.max() ** 0.0 + 1e-6)

    def test_sparse_system(self):
        n = 500
        S = sprandom(n, n, density=0.02, random_state=3)
        A = S + S.T + diags(np.full(n, 10.0))
        b = RNG.uniform(-1, 1, n)
        x, rep = solve(GlobalSystem(A.tocsr(), b, 2), SolverConfig(tol=1e-11))
        assert rep.converged
        np.testing.assert_allclose(A @ x, b, atol=1e-8)


def test_matvec_helper():
    A = np.arange(9.0).reshape(3, 3)
    sys_ = _system(A, np.zeros(3))
    np.testing.assert_allclose(matvec(sys_, np.ones(3)), A.sum(axis=1))
