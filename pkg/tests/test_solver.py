import numpy as np
import pytest
import scipy.sparse as sp

from conftest import dirichlet, fluid, neumann, solid
from mechforge.config import TimeParams
from mechforge.errors import NonConvergence, NonPositiveJacobian, SingularMatrix
from mechforge.formulation import ResidualSystem
from mechforge.materials import NeoHookeMaterial, NewtonianFluid
from mechforge.mesh import box_mesh, unit_cube
from mechforge.solver import (NewmarkScheme, NewmarkState, NewtonSettings, ThetaScheme,
                              full_solve, linear_solve, newmark_step, newton_solve, theta_step)


# -- linear solves ---------------------------------------------------------------------------


def test_identity_solve():
    b = np.arange(5.0)
    assert np.array_equal(linear_solve(sp.identity(5), b), b)


def test_two_by_two():
    x = linear_solve(np.array([[2.0, 1.0], [1.0, 2.0]]), np.array([3.0, 3.0]))
    assert np.allclose(x, [1.0, 1.0], rtol=0, atol=1e-14)


@pytest.mark.parametrize("method", ["lu", "gmres-ilu"])
def test_spd_against_dense(method, rng):
    A = rng.standard_normal((100, 100))
    A = A @ A.T + 100 * np.eye(100)
    A[np.abs(A) < 1.0] = 0.0
    A = 0.5 * (A + A.T) + 50 * np.eye(100)
    b = rng.standard_normal(100)
    x = linear_solve(sp.csr_matrix(A), b, method)
    ref = np.linalg.solve(A, b)
    assert np.linalg.norm(x - ref) <= 1e-10 * np.linalg.norm(ref)


def test_singular_matrix_names_dof():
    A = sp.csr_matrix(np.array([[1.0, 0, 0], [0, 0, 0], [0, 0, 2.0]]))
    with pytest.raises(SingularMatrix) as info:
        linear_solve(A, np.ones(3))
    assert info.value.dof == 1


def test_unknown_method():
    with pytest.raises(ValueError):
        linear_solve(np.eye(2), np.ones(2), "cg")


# -- Newton ------------------------------------------------------------------------------------


def _dense_system(fun, jac):
    return lambda x, nt: ResidualSystem(fun(x), jac(x))


def test_linear_problem_one_iteration():
    A = np.array([[4.0, 1.0], [1.0, 3.0]])
    b = np.array([1.0, 2.0])
    res = newton_solve(_dense_system(lambda x: A @ x - b, lambda x: A), np.zeros(2))
    assert res.iterations == 1
    assert np.allclose(A @ res.x, b, atol=1e-14)


def test_already_converged_zero_iterations():
    res = newton_solve(_dense_system(lambda x: x - 1.0, lambda x: np.eye(1)), np.ones(1))
    assert res.iterations == 0


def test_quadratic_convergence():
    res = newton_solve(_dense_system(lambda x: x ** 3 - 2.0, lambda x: np.diag(3 * x ** 2)),
                       np.array([2.0]), NewtonSettings(abs_tol=1e-15, rel_tol=1e-16))
    hist = np.array(res.history)
    rates = np.log(hist[2:-1]) / np.log(hist[1:-2])
    assert len(rates) >= 2 and rates[-1] > 1.8
    assert res.x[0] == pytest.approx(2 ** (1 / 3), rel=1e-14)


def test_non_convergence_reported():
    settings = NewtonSettings(max_iterations=2)
    with pytest.raises(NonConvergence) as info:
        newton_solve(_dense_system(lambda x: np.arctan(x), lambda x: np.diag(1 / (1 + x ** 2))),
                     np.array([3.0]), settings)
    assert info.value.iterations == 2


def test_inverting_increment_is_damped():
    # the residual only exists for x < 1 and the first full step lands at x = 9
    def system(x, nt):
        if x[0] >= 1.0:
            raise NonPositiveJacobian("element 0 inverted")
        return ResidualSystem(np.array([1 / (1 - x[0]) - 10.0]), np.diag([1 / (1 - x[0]) ** 2]))

    res = newton_solve(system, np.zeros(1))
    assert res.x[0] == pytest.approx(0.9, rel=1e-12)


def test_dirichlet_enforced():
    res = newton_solve(
        lambda x, nt: ResidualSystem(x ** 3 - 1.0, np.diag(3 * x ** 2 + 1e-30), np.array([1]),
                                     np.array([5.0])),
        np.ones(2))
    assert res.x[1] == 5.0 and res.x[0] == pytest.approx(1.0)


def test_neo_hooke_stretch_converges_fast():
    pb = solid(unit_cube(2), NeoHookeMaterial(1.0, 5.0), "p2",
               dirichlet=[dirichlet(1, ["0", None, None]), dirichlet(3, [None, "0", None]),
                          dirichlet(5, [None, None, "0"]), dirichlet(2, ["0.1", None, None])])
    rep = full_solve(pb)
    assert len(rep.steps) == 1 and rep.steps[0].iterations <= 8


# -- theta method ------------------------------------------------------------------------------


def _decay(theta, dt, T=1.0):
    y = 1.0
    for n in range(int(round(T / dt))):
        y = theta_step(ThetaScheme(theta), 1.0, lambda y, t: -y, y, n * dt, dt,
                       jac=lambda y, t: -1.0)
    return y


def test_theta_single_steps():
    assert _decay(1.0, 0.1, 0.1) == pytest.approx(1 / 1.1, rel=1e-14)
    assert _decay(0.5, 0.1, 0.1) == pytest.approx(0.95 / 1.05, rel=1e-14)


@pytest.mark.parametrize("theta, order", [(1.0, 1.0), (0.5, 2.0)])
def test_theta_convergence_order(theta, order):
    dts = [0.1, 0.05, 0.025, 0.0125]
    errs = [abs(_decay(theta, dt) - np.exp(-1.0)) for dt in dts]
    slopes = np.diff(np.log(errs)) / np.diff(np.log(dts))
    assert abs(slopes[-1] - order) < 0.1


def test_theta_fd_jacobian_default():
    y = theta_step(ThetaScheme(1.0), np.eye(2), lambda y, t: np.array([-y[0], -2 * y[1]]),
                   np.ones(2), 0.0, 0.5)
    assert np.allclose(y, [1 / 1.5, 1 / 2.0], rtol=1e-8)


@pytest.mark.parametrize("theta", [0.5, 1.0])
def test_theta_a_stable_on_stiff_decay(theta):
    y = 1.0
    for n in range(20):
        y = theta_step(ThetaScheme(theta), 1.0, lambda y, t: -1000.0 * y, y, n * 0.1, 0.1,
                       jac=lambda y, t: -1000.0)
    assert abs(y) < 1.0


def test_theta_out_of_range():
    with pytest.raises(ValueError):
        ThetaScheme(1.5)


# -- Newmark -------------------------------------------------------------------------------------


def _sho(k=4.0, m=1.0):
    def system(u, a, t, c, nt):
        return ResidualSystem(m * a + k * u, np.array([[k + c * m]]))
    return system


def _sho_energy(s, k=4.0, m=1.0):
    return 0.5 * m * s.v[0] ** 2 + 0.5 * k * s.u[0] ** 2


def test_newmark_zero_state_stays_zero():
    s = NewmarkState(np.zeros(1), np.zeros(1), np.zeros(1))
    for _ in range(10):
        s = newmark_step(NewmarkScheme(), _sho(), s, 0.1)
    assert not np.any(s.u) and not np.any(s.v)


def test_newmark_average_acceleration_conserves_energy():
    s = NewmarkState(np.array([1.0]), np.array([0.5]), np.array([-4.0]))
    e0 = _sho_energy(s)
    for _ in range(100):
        s = newmark_step(NewmarkScheme(0.25, 0.5), _sho(), s, 0.1)
        assert abs(_sho_energy(s) - e0) <= 1e-12 * e0
    assert s.t == pytest.approx(10.0)


def test_newmark_numerical_damping():
    s = NewmarkState(np.array([1.0]), np.zeros(1), np.array([-4.0]))
    e0 = _sho_energy(s)
    for _ in range(100):
        s = newmark_step(NewmarkScheme(0.3025, 0.6), _sho(), s, 0.1)
    assert _sho_energy(s) < 0.9 * e0


# -- full solve --------------------------------------------------------------------------------


def test_steady_problem_single_step():
    pb = solid(unit_cube(1), NeoHookeMaterial(1.0, 5.0), "p1",
               dirichlet=[dirichlet(1, ["0", "0", "0"])],
               neumann=[neumann(2, "traction", ["0.1", "0", "0"])])
    rep = full_solve(pb)
    assert [s.time for s in rep.steps] == [0.0]
    assert "1 steps" in rep.summary()


def test_step_halving_recovers():
    pb = solid(unit_cube(1), NeoHookeMaterial(1.0, 5.0), "p1",
               dirichlet=[dirichlet(1, ["0", "0", "0"])],
               neumann=[neumann(2, "traction", ["2*t", "0", "0"])])
    rep = full_solve(pb, TimeParams(1.0, (0.0, 1.0)), NewtonSettings(max_iterations=4))
    assert rep.halving_events > 0 and rep.steps[-1].time == 1.0
    direct = full_solve(pb, TimeParams(0.125, (0.0, 1.0)))
    assert np.allclose(rep.state.x, direct.state.x, atol=1e-8)


def test_halving_exhausted_raises_with_report():
    pb = solid(unit_cube(1), NeoHookeMaterial(1.0, 5.0), "p1",
               dirichlet=[dirichlet(1, ["0", "0", "0"])],
               neumann=[neumann(2, "traction", ["3*t", "0", "0"])])
    with pytest.raises(NonConvergence, match="halvings") as info:
        full_solve(pb, TimeParams(1.0, (0.0, 1.0)), NewtonSettings(max_iterations=1,
                                                                   max_halvings=0))
    assert info.value.report is not None


def test_incompressible_constraint_satisfied():
    pb = solid(unit_cube(2), NeoHookeMaterial(1.0, incompressible=True), "p2-p1",
               dirichlet=[dirichlet(1, ["0", None, None]), dirichlet(3, [None, "0", None]),
                          dirichlet(5, [None, None, "0"]), dirichlet(2, ["0.5*t", None, None])])
    settings = NewtonSettings()
    rep = full_solve(pb, TimeParams(0.5, (0.0, 1.0)), settings)
    R = pb.residual(rep.state.x, 1.0)
    assert np.linalg.norm(R[pb.space_u.dim:]) <= settings.abs_tol
    # homogeneous isochoric stretch: lateral contraction 1/sqrt(1.5)
    u = rep.state.x[:pb.space_u.dim].reshape(-1, 3)
    X = pb.space_u.node_coords
    assert np.allclose(u[:, 1], (1 / np.sqrt(1.5) - 1) * X[:, 1], atol=1e-10)


def test_dynamic_solid_momentum_balance():
    rho, force, T, dt = 2.0, 0.05, 1.0, 0.1
    pb = solid(box_mesh((1, 1, 1), (1.0, 1.0, 1.0)), NeoHookeMaterial(1.0, 5.0), "p1",
               density=rho, neumann=[neumann(2, "traction", [str(force), "0", "0"])])
    rep = full_solve(pb, TimeParams(dt, (0.0, T)), probe=(1, 1, 1))
    M = pb.mass_matrix(rho).tocsr()
    ex = np.tile([1.0, 0.0, 0.0], pb.space_u.num_nodes)
    com = ex @ (M @ rep.state.x) / rho
    assert com == pytest.approx(0.5 * force * T ** 2 / rho, rel=1e-8)
    assert len(rep.probe) == 10


def test_theta_fluid_reaches_poiseuille():
    pb = fluid(box_mesh((8, 2), (4.0, 1.0)), NewtonianFluid(1.0, 1.0),
               dirichlet=[dirichlet(1, ["4*y*(1-y)", "0"], field="velocity"),
                          dirichlet(3, ["0", "0"], field="velocity"),
                          dirichlet(4, ["0", "0"], field="velocity")])
    rep = full_solve(pb, TimeParams(0.5, (0.0, 5.0), theta=1.0), probe=(2.0, 0.5))
    v = rep.probe[-1][1]
    assert np.allclose(v, [1.0, 0.0], atol=1e-6)
    assert len(rep.steps) == 10
