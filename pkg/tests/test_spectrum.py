"""Bound states, continuum coefficients, threshold scaling, universality."""

import math

import numpy as np
import pytest

from invsq import specfun as sf
from invsq import spectrum as sp
from invsq.core import derived_constants, fixed_points, linear_well, generic_well, square_well
from invsq.numerics import fit_loglog, quad_gk

BINDING_C_316 = 0.7975240094170116  # [2^{2w-2}(1+alpha/g_-)Gamma(w)/Gamma(1-w)]^{1/w}
MEAN_X_C_316 = 0.5890486225480862   # pi (1/4 - w^2) tan(pi w)/(4 w) at w = 1/4
E0_GM_PLUS_01 = -5.84430194146e-05  # arbitrary-precision matching root, g = g_- + 0.1


def test_threshold_none_below(params316, gfix):
    _, g_minus = gfix
    assert sp.bound_state(params316, square_well(g_minus)) is None
    assert sp.bound_state(params316, square_well(g_minus - 1e-6)) is None
    assert sp.bound_state(params316, square_well(0.5)) is None
    assert sp.bound_state(params316, square_well(g_minus + 1e-6)) is not None


def test_threshold_straddle_other_alphas():
    for alpha in (-0.1, -0.24):
        p = derived_constants(alpha)
        _, g_minus = fixed_points(p)
        for d in (1e-4, 1e-3):
            assert sp.bound_state(p, square_well(g_minus - d)) is None
            assert sp.bound_state(p, square_well(g_minus + d)) is not None


def test_threshold_independent_of_b(params316, gfix):
    _, g_minus = gfix
    for b in (0.25, 2.0):
        assert sp.bound_state(params316, square_well(g_minus - 1e-5, b)) is None
        assert sp.bound_state(params316, square_well(g_minus + 1e-4, b)) is not None


def test_near_threshold_energy_matches_binding_law(params316, gfix):
    _, g_minus = gfix
    c = sp.binding_constant(params316)
    st = sp.bound_state(params316, square_well(g_minus + 1e-3))
    assert st.energy == pytest.approx(-c * 1e-12, rel=1e-2)
    # frozen high-precision value at g = g_- + 0.1
    st2 = sp.bound_state(params316, square_well(g_minus + 0.1))
    assert st2.energy == pytest.approx(E0_GM_PLUS_01, rel=1e-9)


def test_binding_constant(params316):
    assert sp.binding_constant(params316) == pytest.approx(BINDING_C_316, rel=1e-12)
    for alpha in (-0.05, -0.12, -0.2, -0.24):
        assert sp.binding_constant(derived_constants(alpha)) > 0.0
    # dimensionless: independent of x0
    assert sp.binding_constant(derived_constants(-0.1875, x0=3.7)) == pytest.approx(
        BINDING_C_316, rel=1e-12)


def test_deep_well_state_and_matching(params316):
    reg = square_well(4.0)
    st = sp.bound_state(params316, reg)
    assert st.energy < 0.0 and 0.0 < st.xi < 2.0
    # log-derivative continuity at the cutoff with analytic derivatives
    w_in = math.sqrt(reg.g - st.xi ** 2)
    left = w_in * math.cos(w_in) / math.sin(w_in)
    kappa = st.xi
    u = lambda z: math.sqrt(z) * sf.kv(params316.omega, z)
    up = 0.5 / math.sqrt(st.xi) * sf.kv(params316.omega, st.xi) \
        + math.sqrt(st.xi) * sf.kvp(params316.omega, st.xi)
    right = kappa * up / u(st.xi)
    assert left == pytest.approx(right, rel=1e-9)


def test_wavefunction_value_continuity_and_norm(params316):
    reg = square_well(4.0)
    st = sp.bound_state(params316, reg)
    w_in = math.sqrt(reg.g - st.xi ** 2)
    inside = st.A * math.sin(w_in * 1.0)
    outside = st.C * math.sqrt(st.xi) * sf.kv(params316.omega, st.xi)
    assert inside == pytest.approx(outside, rel=1e-11)
    kappa = st.xi
    norm_in = quad_gk(lambda x: (st.A * np.sin(w_in * x)) ** 2, 0.0, 1.0, rtol=1e-10).value
    norm_out = quad_gk(lambda u: u * sf.kv(params316.omega, u) ** 2, st.xi, st.xi + 45.0,
                       rtol=1e-10).value * st.C ** 2 / kappa
    assert norm_in + norm_out == pytest.approx(1.0, rel=1e-9)


def test_energy_invariant_under_b_scaling(params316, gfix):
    # E is invariant when g - g_- scales as b^{2 omega}
    _, g_minus = gfix
    w = params316.omega
    energies = []
    for b in (1.0, 0.5, 0.25):
        st = sp.bound_state(params316, square_well(g_minus + 1e-3 * b ** (2 * w), b))
        energies.append(st.energy)
    for e in energies[1:]:
        assert e == pytest.approx(energies[0], rel=1e-2)


def test_continuum_ratio_limits(params316, gfix):
    g_plus, g_minus = gfix
    # small b: pure J_omega at g_+ (ratio diverges), pure J_-omega at g_- (ratio -> 0)
    st_plus = sp.continuum_coefficients(params316, square_well(g_plus, 1e-6), 1.0)
    st_minus = sp.continuum_coefficients(params316, square_well(g_minus, 1e-6), 1.0)
    assert abs(st_plus.ratio_CpCm) > 1e6
    assert abs(st_minus.ratio_CpCm) < 1e-6
    assert st_plus.B > 0.0 and st_minus.B > 0.0


def test_continuum_ratio_scales_as_E_to_minus_omega(params316):
    # C+/C- at E and 4E: ratio of ratios = 4^{-omega}
    reg = square_well(1.2, 0.05)
    e = 0.04
    r1 = sp.continuum_coefficients(params316, reg, e).ratio_CpCm
    r2 = sp.continuum_coefficients(params316, reg, 4.0 * e).ratio_CpCm
    assert r2 / r1 == pytest.approx(4.0 ** -params316.omega, rel=1e-3)


def test_cm_over_a_matches_asymptote(params316):
    # C-/A ~ Gamma(-w)/2^{1+w} sin(sqrt g)(gamma - nu_+)/xi^{nu_-} as xi -> 0
    from invsq.core import gamma_cot
    g = 1.2
    w = params316.omega
    reg = square_well(g, 1e-5)
    e = 1.0
    st = sp.continuum_coefficients(params316, reg, e)
    gam = gamma_cot(g)
    gamma_minus_w = -sf.gamma(1.0 - w) / w  # Gamma(-w) by reflection of the recurrence
    asym = gamma_minus_w / 2.0 ** (1.0 + w) * math.sin(math.sqrt(g)) \
        * (gam - params316.nu_plus) / st.xi ** params316.nu_minus
    norm = st.c_minus / st.ratio_CmA  # the A-amplitude of the normalized state
    assert st.ratio_CmA / norm == pytest.approx(asym / norm, rel=2e-3)


def test_b_normalization_power_law(params316, gfix):
    # B(g, xi) vanishes like xi^{2 nu_pm} at the fixed points; the
    # combination B xi^{-2 nu} tends to a finite constant
    g_plus, _ = gfix
    nu = 2.0 * params316.nu_plus
    vals = []
    for b in (1e-4, 1e-5, 1e-6):
        st = sp.continuum_coefficients(params316, square_well(g_plus, b), 1.0)
        vals.append(st.B / st.xi ** nu)
    assert vals[0] == pytest.approx(vals[1], rel=1e-3)
    assert vals[1] == pytest.approx(vals[2], rel=1e-3)


def test_closure_delta_sequence(params316):
    # windowed closure against the absorbed-wall heat kernel at small t
    from invsq.classical import absorbed_kernel
    reg = square_well(0.0, 2.0)
    for (x, y, t) in ((0.8, 1.0, 0.02), (0.5, 0.6, 0.01)):
        d = sp.closure_delta(params316, reg, x, y, t)
        assert d == pytest.approx(absorbed_kernel(x, y, t), rel=2e-2)


def test_mean_position_constant_and_divergence(params316, gfix):
    _, g_minus = gfix
    w = params316.omega
    cw = sp.mean_position_constant(params316)
    assert cw == pytest.approx(MEAN_X_C_316, rel=1e-12)
    ratios = []
    for d in (1e-2, 1e-3):
        st = sp.bound_state(params316, square_well(g_minus + d))
        mx = sp.mean_position(params316, square_well(g_minus + d))
        assert mx * math.sqrt(-st.energy) == pytest.approx(cw, rel=1e-3)
        ratios.append(mx * d ** (1.0 / (2.0 * w)))
    # <x> ~ (g - g_-)^{-1/2w}: rescaled values agree across a decade
    assert ratios[0] == pytest.approx(ratios[1], rel=2e-2)


def test_mean_position_deep_well_localized(params316):
    mx = sp.mean_position(params316, square_well(9.0))
    assert 0.0 < mx < 3.0  # O(b x0) for a deep well


def test_mean_position_requires_bound_state(params316, gfix):
    _, g_minus = gfix
    with pytest.raises(ValueError):
        sp.mean_position(params316, square_well(g_minus - 0.1))


def test_generic_path_reproduces_square_well_threshold(params316, gfix):
    _, g_minus = gfix
    g_star = sp.generic_threshold_g(params316, square_well(1.0))
    assert g_star == pytest.approx(g_minus, abs=1e-9)


def test_generic_energy_matches_exact_matching(params316, gfix):
    _, g_minus = gfix
    g = g_minus + 5e-3
    eps = sp.generic_bound_energy(params316, square_well(1.0), g)
    st = sp.bound_state(params316, square_well(g))
    assert eps == pytest.approx(-st.energy, rel=1e-6)


def test_linear_well_universal_exponent(params316):
    fit = sp.generic_bound_threshold(params316, linear_well(1.0))
    assert fit.exponent == pytest.approx(4.0, rel=1e-2)
    assert fit.g_star > 1.9412  # weaker well binds later than the square well


def test_generic_profile_universality(params316, gfix):
    # small deformation of the square profile: same exponent, shifted g_*
    _, g_minus = gfix
    xs = np.linspace(0.0, 1.0, 21)
    reg = generic_well(1.0, xs, 1.0 - 0.2 * xs ** 2)
    fit = sp.generic_bound_threshold(params316, reg, n_points=12)
    assert fit.exponent == pytest.approx(4.0, rel=2e-2)
    assert fit.g_star > g_minus
    assert abs(fit.g_star - g_minus) > 1e-3


def test_existence_bounds_bracket(params316, gfix):
    _, g_minus = gfix
    # f == 1: variational bound uses int x^2 e^-x = 2 - 5/e and the
    # comparison bound is exactly g_-
    ub, lb = sp.existence_bounds(params316, square_well(1.0))
    moment = 2.0 - 5.0 / math.e
    assert ub == pytest.approx((0.5 + params316.alpha / math.e) / moment, rel=1e-10)
    assert lb == pytest.approx(g_minus, rel=1e-12)
    assert lb < ub  # and g_* = g_- sits inside [lb, ub)

    ub_lin, lb_lin = sp.existence_bounds(params316, linear_well(1.0))
    moment_lin = 6.0 - 16.0 / math.e
    assert ub_lin == pytest.approx((0.5 + params316.alpha / math.e) / moment_lin, rel=1e-10)
    fit_g_star = 2.6989686016  # frozen from the threshold solve
    assert lb_lin < fit_g_star < ub_lin
