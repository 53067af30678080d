import math

import numpy as np
import pytest

from bousspec import analysis, model, semidiscrete, timestep
from bousspec.jacobi import build_basis
from bousspec.timestep import IntegrationPlan, SdirkScheme


def test_presets():
    assert SdirkScheme.midpoint().order == 2
    o3 = SdirkScheme.order3()
    assert o3.order == 3
    assert o3.gamma == pytest.approx((3 + math.sqrt(3)) / 6, rel=1e-15)
    assert SdirkScheme.from_gamma(0.5).order == 2


def test_zero_field_is_fixed_point():
    y0 = np.array([1.0, -2.0])
    f = lambda t, y: np.zeros_like(y)
    y1 = timestep.sdirk_step(f, 0.0, y0, 0.3, SdirkScheme.midpoint())
    assert np.array_equal(y1, y0)


def test_midpoint_scalar_amplification():
    # one step of y' = -y multiplies by R(-k) = (1 - k/2)/(1 + k/2)
    y = timestep.sdirk_step(lambda t, v: -v, 0.0, np.array([1.0]), 0.1, SdirkScheme.midpoint())
    assert y[0] == pytest.approx(0.95 / 1.05, rel=1e-12)


def test_plan_validation():
    with pytest.raises(ValueError):
        IntegrationPlan(k=-0.1, t_end=1.0)
    with pytest.raises(ValueError):
        IntegrationPlan(k=0.1, t_end=1.0, snapshot_times=(2.0,))
    with pytest.raises(ValueError):
        IntegrationPlan(k=0.3, t_end=1.0).n_steps
    assert IntegrationPlan(k=0.1, t_end=1.0).n_steps == 10


def test_integrate_zero_time():
    y0 = np.array([2.0])
    tf, y, snaps, stats = timestep.integrate(
        lambda t, v: -v, y0, SdirkScheme.midpoint(), IntegrationPlan(k=0.1, t_end=0.0)
    )
    assert tf == 0.0 and np.array_equal(y, y0) and stats.steps == 0


def test_snapshots_at_step_boundaries():
    plan = IntegrationPlan(k=0.1, t_end=1.0, snapshot_times=(0.0, 0.5, 1.0))
    _, _, snaps, _ = timestep.integrate(
        lambda t, v: -v, np.array([1.0]), SdirkScheme.midpoint(), plan
    )
    times = [t for t, _ in snaps]
    assert times == pytest.approx([0.0, 0.5, 1.0])
    assert snaps[1][1][0] == pytest.approx(math.exp(-0.5), rel=1e-3)


def test_step_doubling_consistency_midpoint():
    # two half steps agree with one step to the local order O(k^3)
    f = lambda t, v: -v
    y0 = np.array([1.0])
    k = 0.1
    one = timestep.sdirk_step(f, 0.0, y0, k, SdirkScheme.midpoint())
    half = timestep.sdirk_step(f, 0.0, y0, k / 2, SdirkScheme.midpoint())
    two = timestep.sdirk_step(f, k / 2, half, k / 2, SdirkScheme.midpoint())
    assert abs(one[0] - two[0]) < k**3


@pytest.mark.parametrize("scheme", [SdirkScheme.midpoint(), SdirkScheme.order3()])
def test_scalar_convergence_order(scheme):
    errs = []
    for k in (0.02, 0.01, 0.005):
        _, y, _, _ = timestep.integrate(
            lambda t, v: -v, np.array([1.0]), scheme, IntegrationPlan(k=k, t_end=1.0)
        )
        errs.append(abs(y[0] - math.exp(-1.0)))
    rate = math.log2(errs[1] / errs[2])
    assert rate == pytest.approx(scheme.order, abs=0.05)


def test_stage_divergence_detection():
    # Lipschitz constant far above 1/(gamma k): fixed point cannot contract
    stiff = lambda t, v: -1e9 * v
    with pytest.raises(timestep.StageDivergenceError):
        timestep.sdirk_step(stiff, 0.0, np.array([1.0]), 0.1, SdirkScheme.midpoint())


# --- stability function and dispersion --------------------------------------

def test_stability_function_basics():
    mid = SdirkScheme.midpoint()
    assert timestep.stability_function(mid, 0.0) == 1.0
    zs = [0.3 + 0.2j, -1.0 + 0.7j, 2.4j]
    for z in zs:
        ref = (1 + z / 2) / (1 - z / 2)
        assert timestep.stability_function(mid, z) == pytest.approx(ref, rel=1e-14)
    with pytest.raises(ZeroDivisionError):
        timestep.stability_function(mid, 2.0)


@pytest.mark.parametrize("scheme", [SdirkScheme.midpoint(), SdirkScheme.order3()])
def test_stability_function_series_order(scheme):
    # R(z) - e^z = O(z^{p+1}): halving z shrinks the defect by ~2^{p+1}
    h = 0.02
    d1 = abs(timestep.stability_function(scheme, h) - math.exp(h))
    d2 = abs(timestep.stability_function(scheme, h / 2) - math.exp(h / 2))
    assert math.log2(d1 / d2) == pytest.approx(scheme.order + 1, abs=0.05)


def test_midpoint_nondissipative_on_imaginary_axis():
    mid = SdirkScheme.midpoint()
    for y in np.linspace(-10.0, 10.0, 201):
        assert abs(abs(timestep.stability_function(mid, 1j * y)) - 1.0) <= 1e-13


def test_order3_scheme_is_dissipative_but_a_stable():
    # |R(iy)| < 1 for y != 0: numerator y^4 coefficient alpha^2 is below
    # the denominator's gamma^4, so the order-3 member damps on the
    # imaginary axis (it is not nondissipative).
    o3 = SdirkScheme.order3()
    assert o3._alpha**2 < o3.gamma**4
    mods = np.array(
        [abs(timestep.stability_function(o3, 1j * y)) for y in np.linspace(-10, 10, 401)]
    )
    assert np.all(mods <= 1.0 + 1e-14)
    assert abs(timestep.stability_function(o3, 1j * 1.0)) < 0.97


def test_dispersion_error_basics():
    assert timestep.dispersion_error(SdirkScheme.midpoint(), 0.0) == 0.0
    # midpoint: Phi(y) = y^3/12 + O(y^5)
    y = 1e-2
    got = timestep.dispersion_error(SdirkScheme.midpoint(), y)
    assert got == pytest.approx(y**3 / 12, rel=1e-3)


def test_dispersion_error_is_odd():
    o3 = SdirkScheme.order3()
    ys = np.linspace(-0.5, 0.5, 11)
    phi = timestep.dispersion_error(o3, ys)
    assert np.abs(phi + phi[::-1]).max() < 1e-16


def test_dispersion_slopes_true_orders():
    # phase error is odd in y, so slopes are odd: 3 for the second-order
    # member (q = 2) and 5 for the third-order member (q = 4).
    assert timestep.dispersion_slope(SdirkScheme.midpoint()) == pytest.approx(3.0, abs=0.1)
    assert timestep.dispersion_slope(SdirkScheme.order3()) == pytest.approx(5.0, abs=0.1)


def test_order3_dispersion_leading_coefficient():
    # Phi(y) = (5 sqrt(3) + 9)/180 * y^5 + O(y^7) up to sign
    o3 = SdirkScheme.order3()
    y = 1e-2
    coeff = abs(timestep.dispersion_error(o3, y)) / y**5
    assert coeff == pytest.approx((5 * math.sqrt(3) + 9) / 180, rel=1e-3)


# --- stage-time handling with time-dependent boundary data -------------------

@pytest.fixture(scope="module")
def truncated_solitary():
    sol = model.solitary_bona_smith(9 / 11)
    imap = model.IntervalMap(-5.0, 5.0)
    bdata = model.BoundaryData.from_exact(sol, -5.0, 5.0)
    basis = build_basis(0.0, 64)
    sys_ = semidiscrete.assemble(basis, sol.params, imap)
    state0 = semidiscrete.initial_state(
        basis, imap, lambda x: sol.eta(x, 0.0), lambda x: sol.u(x, 0.0), bdata
    )
    field = semidiscrete.make_vector_field(sys_, bdata)
    return sol, imap, basis, bdata, state0, field


def _run_with_mode(fixture, k, mode):
    sol, imap, basis, bdata, state0, field = fixture
    scheme = SdirkScheme.order3()
    y = state0.vector.copy()
    n = round(1.0 / k)
    for step in range(n):
        tn = step * k
        f = field if mode == "stage" else (lambda t, v, tn=tn: field(tn, v))
        y = timestep.sdirk_step(f, tn, y, k, scheme)
    bc = semidiscrete.BoundaryValues.at_time(bdata, 1.0)
    ns = analysis.NodalSolution.from_state(basis, imap, state0.with_vector(y, 1.0, bc))
    return analysis.error_vs_exact(ns, sol, 1.0, analysis.NormSpec(1, 1))


def test_stage_times_preserve_third_order(truncated_solitary):
    errs = [_run_with_mode(truncated_solitary, k, "stage") for k in (0.1, 0.05, 0.025)]
    rates = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(rates) > 2.8


def test_frozen_stage_times_degrade_order(truncated_solitary):
    errs = [_run_with_mode(truncated_solitary, k, "frozen") for k in (0.1, 0.05, 0.025)]
    rates = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert max(rates) < 2.0
    stage_err = _run_with_mode(truncated_solitary, 0.025, "stage")
    assert errs[-1] > 50 * stage_err
