"""Fixed-point iteration tests: closed-form iterates, contraction, oracle use."""

import numpy as np
import pytest
from scipy.interpolate import CubicHermiteSpline

import khessian as kh
from khessian import dynamics, picard, radial


@pytest.fixture(scope="module")
def laplacian_cfg():
    # k = 1 reduces both operators to classical Laplacians, where the first
    # two iterates from the constant seed have polynomial closed forms.
    return kh.ExponentConfig(N=3, k=1, m=0.0, p=2.0, q=2.0, s=0.0)


def test_first_iterate_closed_form(laplacian_cfg):
    grid = np.linspace(0.0, 0.5, 9)
    seed = picard._seed(1.0, 1.0, grid)
    one = picard.apply_map(laplacian_cfg, 1.0, 1.0, seed)
    # u1 = 1 + r^2/6, u1' = r/3, v1 = 1: the smooth quadrature factors are
    # constants, so the product rule reproduces these exactly.
    assert np.max(np.abs(one.u_vals - (1.0 + grid**2 / 6.0))) <= 1e-15
    assert np.max(np.abs(one.du_vals - grid / 3.0)) <= 1e-16
    assert np.max(np.abs(one.v_vals - 1.0)) == 0.0


def test_second_iterate_closed_form(laplacian_cfg):
    grid = np.linspace(0.0, 0.5, 9)
    seed = picard._seed(1.0, 1.0, grid)
    one = picard.apply_map(laplacian_cfg, 1.0, 1.0, seed)
    two = picard.apply_map(laplacian_cfg, 1.0, 1.0, one)
    # v2 = 1 + r^4/180 from u1' = r/3; u is unchanged because v was still 1.
    assert np.max(np.abs(two.v_vals - (1.0 + grid**4 / 180.0))) <= 1e-16
    assert np.max(np.abs(two.u_vals - one.u_vals)) == 0.0


def test_iterates_monotone_nondecreasing(bounded_cfg):
    grid = np.linspace(0.0, 0.2, 65)
    pair = picard._seed(1.0, 1.0, grid)
    for _ in range(6):
        new = picard.apply_map(bounded_cfg, 1.0, 1.0, pair)
        assert np.all(new.u_vals - pair.u_vals >= -1e-15)
        assert np.all(new.v_vals - pair.v_vals >= -1e-15)
        pair = new


def test_contraction_on_small_ball(bounded_cfg):
    res = picard.picard_solve(bounded_cfg, 1.0, 1.0, 0.1)
    assert res.iterations < 50
    assert res.change < 1e-10
    assert res.pair.u_vals[0] == 1.0 and res.pair.v_vals[0] == 1.0
    assert np.all(np.diff(res.pair.u_vals) >= 0)
    assert np.all(np.diff(res.pair.v_vals) >= 0)


def test_fixed_point_matches_integrator(bounded_cfg):
    rho = 0.1
    res = picard.picard_solve(bounded_cfg, 1.0, 1.0, rho, M=1024)
    traj = radial.integrate(bounded_cfg, 1.0, 1.0, rho)
    img = dynamics.dyn_image(bounded_cfg, traj)
    ddu = traj.du * (img.Z - (bounded_cfg.N - bounded_cfg.k)) / (bounded_cfg.k * traj.r)
    u_sp = CubicHermiteSpline(traj.r, traj.u, traj.du)
    du_sp = CubicHermiteSpline(traj.r, traj.du, ddu)
    v_sp = CubicHermiteSpline(traj.r, traj.v, traj.dv)
    mask = res.pair.grid >= traj.r[0]
    t = res.pair.grid[mask]
    assert np.max(np.abs(res.pair.u_vals[mask] - u_sp(t))) <= 1e-6
    assert np.max(np.abs(res.pair.v_vals[mask] - v_sp(t))) <= 1e-6
    assert np.max(np.abs(res.pair.du_vals[mask] - du_sp(t))) <= 1e-6


def test_grid_refinement_converges(bounded_cfg):
    coarse = picard.picard_solve(bounded_cfg, 1.0, 1.0, 0.1, M=128)
    fine = picard.picard_solve(bounded_cfg, 1.0, 1.0, 0.1, M=1024)
    u_end_gap = abs(coarse.pair.u_vals[-1] - fine.pair.u_vals[-1])
    v_end_gap = abs(coarse.pair.v_vals[-1] - fine.pair.v_vals[-1])
    assert u_end_gap < 1e-8 and v_end_gap < 1e-8


def test_zero_radius_returns_seed(bounded_cfg):
    res = picard.picard_solve(bounded_cfg, 2.0, 3.0, 0.0)
    assert res.iterations == 1 and res.change == 0.0
    assert res.pair.u_vals.tolist() == [2.0]
    assert res.pair.v_vals.tolist() == [3.0]
    assert res.pair.du_vals.tolist() == [0.0]


def test_preconditions(bounded_cfg):
    with pytest.raises(kh.PreconditionError):
        picard.picard_solve(bounded_cfg, 0.0, 1.0, 0.1)
    with pytest.raises(kh.PreconditionError):
        picard.picard_solve(bounded_cfg, 1.0, -1.0, 0.1)
    with pytest.raises(kh.PreconditionError):
        picard.picard_solve(bounded_cfg, 1.0, 1.0, -0.5)
    with pytest.raises(kh.PreconditionError):
        picard.picard_solve(bounded_cfg, 1.0, 1.0, 0.1, M=1)
    grid = np.linspace(0.0, 0.1, 8)
    no_solution = kh.validate(4, 2, 2.0, 1.0, 1.0, 0.0)  # k = m, no local solution
    with pytest.raises(kh.PreconditionError):
        picard.apply_map(no_solution, 1.0, 1.0, picard._seed(1.0, 1.0, grid))


def test_no_convergence_raises(bounded_cfg):
    with pytest.raises(kh.NoConvergenceError):
        picard.picard_solve(bounded_cfg, 1.0, 1.0, 0.1, max_iter=2)


def test_auto_shrink_past_blowup(both_cfg):
    # The solution for these central values blows up near r = 4.52, so a
    # ball of radius 10 cannot contract; the driver must halve below that.
    res, rho_used = picard.picard_solve_auto(both_cfg, 1.0, 1.0, 10.0, M=256, max_iter=60)
    assert rho_used < 4.52
    assert res.change < 1e-10


def test_auto_gives_up_eventually(both_cfg):
    with pytest.raises(kh.NoConvergenceError):
        picard.picard_solve_auto(both_cfg, 1.0, 1.0, 10.0, M=64, max_iter=1, max_halvings=2)
