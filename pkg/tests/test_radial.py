import dataclasses

import numpy as np
import pytest

import khessian as kh
from khessian import radial
from khessian.errors import NotABlowupError, PreconditionError


def test_rhs_oracle_values(bounded_cfg):
    # Hand-computed at r=2, u=3, v=7, u'=5, v'=11:
    #   dP/dr = (km/k) r^(k+L-1) v^p = 1 * 2^4 * 7 = 112
    #   dQ/dr = r^(N-1) u'^q v^s   = 2^4 * 5    = 80
    st = kh.RadialState(r=2.0, u=3.0, v=7.0, du=5.0, dv=11.0,
                        P=2.0**3 * 5.0**2, Q=2.0**3 * 11.0**2)
    dP, dQ, du, dv = radial.rhs(bounded_cfg, st)
    assert dP == pytest.approx(112.0, rel=1e-15)
    assert dQ == pytest.approx(80.0, rel=1e-15)
    assert du == pytest.approx(5.0, rel=1e-12)
    assert dv == pytest.approx(11.0, rel=1e-12)


def test_startup_series_closed_forms():
    # N=3, k=1, m=0: u'(r0) = b^p r0 / 3
    cfg = kh.validate(3, 1, 0, 2, 2, 0)
    st = kh.startup(cfg, 1.0, 2.0, 1e-6)
    assert st.du == pytest.approx(2.0**2 * 1e-6 / 3.0, rel=1e-14)
    # N=5, k=2, b=1: u'(r0) = (1/5)^(1/2) r0
    st = kh.startup(kh.validate(5, 2, 0, 1, 1, 0), 1.0, 1.0, 1e-6)
    assert st.du == pytest.approx((1.0 / 5.0) ** 0.5 * 1e-6, rel=1e-14)
    # the v increment at r0 sits below one ulp of 1.0
    assert st.u > 1.0 and st.v >= 1.0 and st.dv > 0.0


def test_startup_matches_vector_field_consistency(bounded_cfg):
    # P and Q at the startup state must reproduce du, dv when inverted.
    st = kh.startup(bounded_cfg, 1.0, 1.0, 1e-5)
    _, _, du, dv = radial.rhs(bounded_cfg, st)
    assert du == pytest.approx(st.du, rel=1e-12)
    assert dv == pytest.approx(st.dv, rel=1e-12)


def test_startup_preconditions():
    with pytest.raises(PreconditionError):
        kh.startup(kh.validate(5, 2, 2.5, 1, 1, 0), 1.0, 1.0, 1e-6)
    with pytest.raises(PreconditionError):
        kh.startup(kh.validate(5, 2, 0, 1, 1, 0), -1.0, 1.0, 1e-6)
    with pytest.raises(PreconditionError):
        kh.startup(kh.validate(5, 2, 0, 1, 1, 0), 1.0, 1.0, 0.0)


def test_integrate_reaches_rmax_and_grows(reference_trajs):
    traj = reference_trajs["bounded_1e3"]
    assert traj.terminal.kind == kh.REACHED_RMAX
    assert traj.r[-1] == pytest.approx(1e3, rel=1e-12)
    assert np.all(np.diff(traj.r) > 0)
    # u, v increments near r0 fall below one ulp, so allow ties there but
    # demand strict growth once r is past the startup region.
    for col in (traj.u, traj.v, traj.du, traj.dv, traj.P, traj.Q):
        assert np.all(np.diff(col) >= 0)
        late = col[traj.r > 1.0]
        assert np.all(np.diff(late) > 0)
    assert traj.startup_error < 1e-8
    assert traj.clamp_events == 0


def test_integrate_blowup_terminals(reference_trajs):
    both = reference_trajs["both_blowup"]
    assert both.terminal.kind == kh.BLOWUP_DETECTED
    assert both.terminal.r_blowup == pytest.approx(4.5227650, rel=1e-6)
    assert max(both.u[-1], both.v[-1]) > 1e11
    ufin = reference_trajs["u_finite_blowup"]
    assert ufin.terminal.kind == kh.BLOWUP_DETECTED
    assert ufin.u[-1] < 11.0  # u parks on a finite value
    assert ufin.dv[-1] > 1e15


def test_blowup_radius_estimate_tracks_terminal(both_cfg, reference_trajs):
    traj = reference_trajs["both_blowup"]
    est = radial.blowup_radius_estimate(both_cfg, traj.state(len(traj) - 1))
    assert est == pytest.approx(traj.terminal.r_blowup, rel=1e-9)


def test_rate_report_reference_values(both_cfg, ufin_cfg, reference_trajs):
    rep = kh.estimate_blowup_rate(both_cfg, reference_trajs["both_blowup"])
    assert rep.predicted_rate == pytest.approx(5.0 / 3.0, rel=1e-15)
    assert rep.rate_u == pytest.approx(rep.predicted_rate, rel=5e-2)
    assert not rep.u_finite
    assert rep.n_tail >= 20
    assert rep.psi_band_max / rep.psi_band_min < 10.0

    rep = kh.estimate_blowup_rate(ufin_cfg, reference_trajs["u_finite_blowup"])
    assert rep.predicted_rate == pytest.approx(7.0 / 8.0, rel=1e-15)
    assert rep.rate_u == pytest.approx(rep.predicted_rate, rel=5e-2)
    assert rep.u_finite


def test_rate_report_requires_blowup(bounded_cfg, reference_trajs):
    with pytest.raises(NotABlowupError):
        kh.estimate_blowup_rate(bounded_cfg, reference_trajs["bounded_1e3"])


def test_threshold_crossing_on_power_law(bounded_cfg):
    # The default cap fires on the power law itself around r = 5.9e3;
    # the terminal must still record a consistent radius estimate hint.
    traj = kh.integrate(bounded_cfg, 1.0, 1.0, 1e4)
    assert traj.terminal.kind == kh.BLOWUP_DETECTED
    assert traj.v[-1] > 1e12 or traj.u[-1] > 1e12
    # sigma < 1 here, so the rate estimator refuses
    with pytest.raises(NotABlowupError):
        kh.estimate_blowup_rate(bounded_cfg, traj)


def test_grid_refinement_consistency(bounded_cfg):
    coarse = kh.integrate(bounded_cfg, 1.0, 1.0, 10.0,
                          radial.IntegrateOptions(rtol=1e-7))
    fine = kh.integrate(bounded_cfg, 1.0, 1.0, 10.0,
                        radial.IntegrateOptions(rtol=1e-10))
    for col in ("u", "v"):
        a = getattr(coarse, col)[-1]
        b = getattr(fine, col)[-1]
        assert abs(a - b) / abs(b) < 1e-6


def test_uniqueness_under_startup_radius(bounded_cfg):
    base = kh.integrate(bounded_cfg, 1.0, 1.0, 1.0)
    small = kh.integrate(bounded_cfg, 1.0, 1.0, 1.0,
                         radial.IntegrateOptions(r0=base.r0 / 10.0))
    assert abs(base.u[-1] - small.u[-1]) / base.u[-1] < 1e-6
    assert abs(base.v[-1] - small.v[-1]) / base.v[-1] < 1e-6


def test_estimates_hold_on_references(reference_trajs):
    for name, traj in reference_trajs.items():
        bad = kh.check_estimates(traj.config, traj)
        assert bad == [], f"{name}: {bad[:3]}"


def test_estimates_catch_corrupted_data(bounded_cfg, reference_trajs):
    traj = reference_trajs["bounded_1e3"]
    corrupted = dataclasses.replace(traj, du=traj.du * 1.5)
    assert len(kh.check_estimates(bounded_cfg, corrupted)) > 0


def test_scaling_exactness_and_endpoints(bounded_cfg):
    traj = kh.integrate(bounded_cfg, 1.0, 1.0, 10.0)
    for lam in (0.5, 2.0):
        scaled = kh.scale_solution(bounded_cfg, traj, lam)
        assert kh.scaling_residual(bounded_cfg, traj, scaled, lam) <= 1e-8
        assert scaled.r[-1] == pytest.approx(lam * traj.r[-1], rel=1e-15)
        gu = kh.derived(bounded_cfg).gamma_u
        assert scaled.u[0] == pytest.approx(lam**gu * traj.u[0], rel=1e-12)


def test_scaling_residual_discriminates(bounded_cfg):
    traj = kh.integrate(bounded_cfg, 1.0, 1.0, 10.0)
    scaled = kh.scale_solution(bounded_cfg, traj, 2.0)
    bad_v = dataclasses.replace(scaled, v=scaled.v * 1.01)
    assert kh.scaling_residual(bounded_cfg, traj, bad_v, 2.0) > 1e-3
    bad_du = dataclasses.replace(scaled, du=scaled.du * 1.01)
    assert kh.scaling_residual(bounded_cfg, traj, bad_du, 2.0) > 1e-3
    assert kh.scaling_residual(bounded_cfg, traj, scaled, 2.0 * 1.01) > 1e-3


def test_integrate_rejects_bad_range(bounded_cfg):
    with pytest.raises(PreconditionError):
        kh.integrate(bounded_cfg, 1.0, 1.0, 1e-9)
