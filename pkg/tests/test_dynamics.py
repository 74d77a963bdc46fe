"""Logarithmic-coordinate flow tests: images, equilibria, stability, order."""

import math

import numpy as np
import pytest

import khessian as kh
from khessian import dynamics, radial


def test_to_dyn_rational_example(bounded_cfg):
    st = radial.RadialState(r=2.0, u=3.0, v=7.0, du=5.0, dv=11.0, P=0.0, Q=0.0)
    d = dynamics.to_dyn(bounded_cfg, st)
    assert d.t == pytest.approx(math.log(2.0), rel=1e-15)
    assert d.X == pytest.approx(10.0 / 3.0, rel=1e-15)
    assert d.Y == pytest.approx(22.0 / 7.0, rel=1e-15)
    assert d.Z == pytest.approx(28.0 / 25.0, rel=1e-15)
    assert d.W == pytest.approx(20.0 / 121.0, rel=1e-15)


def test_to_dyn_rejects_degenerate_states(bounded_cfg):
    bad = radial.RadialState(r=2.0, u=3.0, v=7.0, du=0.0, dv=11.0, P=0.0, Q=0.0)
    with pytest.raises(kh.DegenerateStateError):
        dynamics.to_dyn(bounded_cfg, bad)
    neg = radial.RadialState(r=2.0, u=3.0, v=-7.0, du=5.0, dv=11.0, P=0.0, Q=0.0)
    with pytest.raises(kh.DegenerateStateError):
        dynamics.to_dyn(bounded_cfg, neg)


def test_dyn_image_matches_pointwise(bounded_cfg, reference_trajs):
    traj = reference_trajs["bounded_1e3"]
    img = dynamics.dyn_image(bounded_cfg, traj)
    for i in (0, len(traj) // 2, len(traj) - 1):
        d = dynamics.to_dyn(bounded_cfg, traj.state(i))
        assert img.X[i] == pytest.approx(d.X, rel=1e-15)
        assert img.Y[i] == pytest.approx(d.Y, rel=1e-15)
        assert img.Z[i] == pytest.approx(d.Z, rel=1e-15)
        assert img.W[i] == pytest.approx(d.W, rel=1e-15)


def test_vector_field_at_ones(bounded_cfg):
    state = dynamics.DynState(t=0.0, X=1.0, Y=1.0, Z=1.0, W=1.0)
    dX, dY, dZ, dW = dynamics.vector_field(bounded_cfg, state)
    assert dX == pytest.approx(-1.0, abs=1e-15)
    assert dY == pytest.approx(-1.0, abs=1e-15)
    assert dZ == pytest.approx(5.0, abs=1e-15)
    assert dW == pytest.approx(3.0, abs=1e-15)


def test_equilibrium_reference_values(bounded_cfg):
    eq = dynamics.equilibrium(bounded_cfg)
    assert eq.Y_inf == pytest.approx(10.0 / 3.0, rel=1e-14)
    assert eq.Z_inf == pytest.approx(25.0 / 3.0, rel=1e-14)
    assert eq.W_inf == pytest.approx(23.0 / 3.0, rel=1e-14)
    assert eq.X_inf == pytest.approx(11.0 / 3.0, rel=1e-14)
    # the rest point must annihilate the field
    d = dynamics.vector_field(
        bounded_cfg, dynamics.DynState(0.0, eq.X_inf, eq.Y_inf, eq.Z_inf, eq.W_inf)
    )
    assert max(abs(val) for val in d) < 1e-12


def test_equilibrium_requires_attractive_regime(both_cfg):
    with pytest.raises(kh.PreconditionError):
        dynamics.equilibrium(both_cfg)  # delta < 0 has no interior rest point


def test_boundary_equilibria(bounded_cfg):
    pts = dynamics.boundary_equilibria(bounded_cfg)
    assert [pt.label for pt in pts] == ["Y=0,W=0", "Y=0", "W=0"]
    assert pts[0].Y == 0.0 and pts[0].Z == pytest.approx(5.0) and pts[0].W == 0.0
    assert pts[1].W == pytest.approx(6.0)
    assert pts[2].Y == pytest.approx(-0.5) and not pts[2].admissible
    low_dim = kh.validate(3, 2, 0.0, 1.0, 1.0, 0.0)
    third = dynamics.boundary_equilibria(low_dim)[2]
    assert third.admissible
    assert third.Y == pytest.approx(0.5) and third.Z == pytest.approx(3.5)
    for pt in pts + [third]:
        d = dynamics.vector_field(bounded_cfg if pt in pts else low_dim,
                                  dynamics.DynState(0.0, 0.0, pt.Y, pt.Z, pt.W))
        assert max(abs(val) for val in d[1:]) < 1e-12


def test_stability_reference(bounded_cfg):
    rep = dynamics.stability(bounded_cfg)
    assert rep.a == pytest.approx(58.0 / 3.0, rel=1e-13)
    assert rep.b == pytest.approx(1055.0 / 9.0, rel=1e-13)
    assert rep.c == pytest.approx(5750.0 / 36.0, rel=1e-13)
    assert rep.stable and not rep.marginal and rep.ab_gt_9c
    assert rep.coefficient_residual < 1e-12
    slowest = max(ev.real for ev in rep.eigenvalues)
    assert slowest == pytest.approx(-1.8988, abs=2e-4)
    # eigenvalues must be roots of the assembled cubic
    for ev in rep.eigenvalues:
        val = ev**3 + rep.a * ev**2 + rep.b * ev + rep.c
        assert abs(val) < 1e-9 * max(1.0, abs(rep.c))


def test_linearization_trace_and_det(bounded_cfg):
    eq = dynamics.equilibrium(bounded_cfg)
    J = dynamics.linearization(bounded_cfg, eq)
    rep = dynamics.stability(bounded_cfg)
    assert -np.trace(J) == pytest.approx(rep.a, rel=1e-13)
    assert -np.linalg.det(J) == pytest.approx(rep.c, rel=1e-12)


def test_flow_converges_to_equilibrium(bounded_cfg):
    eq = dynamics.equilibrium(bounded_cfg)
    start = dynamics.DynState(0.0, 0.0, 0.5 * eq.Y_inf, 0.5 * eq.Z_inf, 0.5 * eq.W_inf)
    states = dynamics.flow_integrate(bounded_cfg, start, 200.0)
    last = states[-1]
    dist = max(
        abs(last.Y - eq.Y_inf), abs(last.Z - eq.Z_inf), abs(last.W - eq.W_inf)
    )
    assert dist < 1e-8
    assert last.X == pytest.approx(eq.X_inf, abs=1e-8)
    assert last.t == pytest.approx(200.0, rel=1e-12)


def test_flow_x_readout_optional(bounded_cfg):
    eq = dynamics.equilibrium(bounded_cfg)
    start = dynamics.DynState(0.0, 0.0, eq.Y_inf, eq.Z_inf, eq.W_inf)
    states = dynamics.flow_integrate(bounded_cfg, start, 1.0, recover_x=False)
    assert all(math.isnan(st.X) for st in states)


def test_flow_preconditions(bounded_cfg):
    with pytest.raises(kh.PreconditionError):
        dynamics.flow_integrate(bounded_cfg, dynamics.DynState(0.0, 0.0, math.nan, 1.0, 1.0), 1.0)
    with pytest.raises(kh.PreconditionError):
        dynamics.flow_integrate(bounded_cfg, dynamics.DynState(0.0, 0.0, 1.0, 1.0, 1.0), -1.0)


def test_flow_order_preserved(bounded_cfg):
    eq = dynamics.equilibrium(bounded_cfg)
    base = np.array([eq.Y_inf, eq.Z_inf, eq.W_inf])
    for seed in range(3):
        rng = np.random.default_rng(seed)
        lo = base * rng.uniform(0.3, 1.0, size=(10, 3))
        hi = lo * (1.0 + rng.uniform(0.0, 0.8, size=(10, 3)))
        assert dynamics.flow_order_preserved(bounded_cfg, lo, hi, 50.0)


def test_flow_order_rejects_bad_batches(bounded_cfg):
    lo = np.ones((4, 3))
    with pytest.raises(kh.PreconditionError):
        dynamics.flow_order_preserved(bounded_cfg, lo, np.ones((3, 3)), 1.0)
    with pytest.raises(kh.PreconditionError):
        dynamics.flow_order_preserved(bounded_cfg, lo, 0.5 * lo, 1.0)


def test_cooperativity(bounded_cfg):
    rng = np.random.default_rng(7)
    samples = rng.uniform(0.01, 50.0, size=(1000, 3))
    rep = dynamics.cooperativity_check(bounded_cfg, samples)
    assert rep.cooperative and rep.irreducible
    decoupled = kh.validate(5, 2, 0.0, 0.0, 1.0, 0.0)  # p = 0 breaks the Y -> Z edge
    rep0 = dynamics.cooperativity_check(decoupled, samples)
    assert rep0.cooperative and not rep0.irreducible
    with pytest.raises(kh.PreconditionError):
        dynamics.cooperativity_check(bounded_cfg, -samples)


def test_trajectory_bounds_hold(bounded_cfg, reference_trajs):
    img = dynamics.dyn_image(bounded_cfg, reference_trajs["bounded_1e3"])
    assert dynamics.check_trajectory_bounds(bounded_cfg, img) == []


def test_trajectory_bounds_flag_violations(bounded_cfg):
    eq = dynamics.equilibrium(bounded_cfg)
    fake = dynamics.DynTrajectory(
        t=np.array([0.0, 1.0]),
        X=np.array([1.0, 1.0]),
        Y=np.array([1.0, eq.Y_inf * 2.0]),
        Z=np.array([6.0, 6.0]),
        W=np.array([6.0, 6.0]),
    )
    hits = dynamics.check_trajectory_bounds(bounded_cfg, fake)
    assert [h.name for h in hits] == ["Y-upper"]
    assert hits[0].t == 1.0 and hits[0].bound == pytest.approx(eq.Y_inf)


def test_chain_rule_defect_small(bounded_cfg, reference_trajs):
    defect = dynamics.chain_rule_defect(
        bounded_cfg, reference_trajs["bounded_1e3"], math.log(1.0), math.log(100.0)
    )
    assert defect < 1e-6


def test_early_time_limits(bounded_cfg, reference_trajs):
    lims = dynamics.early_time_limits(bounded_cfg)
    assert lims == {"X": 0.0, "Y": 0.0, "Z": 5.0, "W_plateau": 6.0}
    img = dynamics.dyn_image(bounded_cfg, reference_trajs["bounded_1e3"])
    head = slice(0, 5)
    assert np.all(np.abs(img.X[head]) < 1e-4)
    assert np.all(np.abs(img.Y[head]) < 1e-4)
    assert np.max(np.abs(img.Z[head] - lims["Z"])) < 1e-4
    assert np.max(np.abs(img.W[head] - lims["W_plateau"])) < 1e-4
    no_limits = kh.validate(4, 2, 2.0, 1.0, 1.0, 0.0)
    with pytest.raises(kh.PreconditionError):
        dynamics.early_time_limits(no_limits)
