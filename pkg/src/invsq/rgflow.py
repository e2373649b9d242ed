"""Renormalization-group flow in the space of regulated Hamiltonians.

The beta function b dgamma/db = -(gamma - nu_-)(gamma - nu_+) integrates in
closed form because (gamma - nu_-)/(gamma - nu_+) scales as b^{2 omega}.
Fixed points carry RG eigenvalue y = beta'(gamma_*) = 1 - 2 gamma_* = -+ 2
omega; u = gamma - nu_- is irrelevant at the infrared fixed point and
u = nu_+ - gamma relevant at the ultraviolet one.

Constant-C_+/C_- contours in the (xi, g)-plane come from inverting the
exact coefficient ratio, which is closed-form linear in gamma(g + xi^2).

For alpha < -1/4 the flow never settles: the shallow-binding matching
condition sqrt(g) cot sqrt(g) = 1/2 - |omega| tan(|omega| log b +
|omega| log(eps)/2 + phi) is log-periodic (a limit cycle), with the phase
phi fixed by the normalizable outer solution, not fitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun as sf
from .core import (MODE_LIMIT_CYCLE, ModelParams, PI_SQ, fixed_points,
                   gamma_cot)
from .numerics import NumericalError, brent, rk45

__all__ = [
    "FlowState",
    "FixedPointInfo",
    "LimitCycleState",
    "beta",
    "beta_prime",
    "fixed_point_info",
    "flow",
    "invert_gamma",
    "contour_constant_ratio",
    "scaling_variable_step",
    "limit_cycle_phase",
    "limit_cycle",
]

IR = "IR-attractive"
UV = "UV-attractive"


@dataclass(frozen=True)
class FlowState:
    b: float
    gamma: float
    g: float
    u: float
    exited: bool = False


@dataclass(frozen=True)
class FixedPointInfo:
    gamma_star: float
    g_star: float
    rg_eigenvalue: float
    stability: str


@dataclass(frozen=True)
class LimitCycleState:
    abs_omega: float
    b: float
    eps: float
    phi: float
    g_branches: tuple


def beta(params: ModelParams, gamma: float) -> float:
    """b dgamma/db = -(gamma - nu_-)(gamma - nu_+)."""
    params.require_main()
    return -(gamma - params.nu_minus) * (gamma - params.nu_plus)


def beta_prime(params: ModelParams, gamma: float) -> float:
    """Slope 1 - 2 gamma of the beta function."""
    params.require_main()
    return 1.0 - 2.0 * gamma


def fixed_point_info(params: ModelParams, which: str) -> FixedPointInfo:
    """which = 'IR' (gamma = nu_-, g = g_minus) or 'UV' (gamma = nu_+, g = g_plus)."""
    g_plus, g_minus = fixed_points(params)
    if which.upper().startswith("IR"):
        return FixedPointInfo(params.nu_minus, g_minus, 2.0 * params.omega, IR)
    if which.upper().startswith("UV"):
        return FixedPointInfo(params.nu_plus, g_plus, -2.0 * params.omega, UV)
    raise ValueError("which must be 'IR' or 'UV'")


def invert_gamma(gamma_value: float) -> float:
    """g on the first branch (0, pi^2) with sqrt(g) cot sqrt(g) = gamma_value."""
    if gamma_value >= 1.0:
        raise ValueError(f"gamma={gamma_value} not attained on the first branch (max 1 at g=0)")
    return brent(lambda g: gamma_cot(g) - gamma_value, 1e-14, PI_SQ - 1e-11, xtol=1e-14)


def flow(params: ModelParams, gamma0: float, b0: float, b1: float) -> FlowState:
    """Integrate the RG equation exactly from (b0, gamma0) to cutoff b1.

    (gamma - nu_-)/(gamma - nu_+) = r0 (b1/b0)^{2 omega}; the infrared
    limit b1 -> 0 inside the branch lands on nu_-.  gamma leaving
    (nu_-, nu_+) is reported via the exited flag, never clamped.
    """
    params.require_main()
    if b0 <= 0.0 or b1 <= 0.0:
        raise ValueError("cutoff factors must be positive")
    nm, np_ = params.nu_minus, params.nu_plus
    if gamma0 == nm or gamma0 == np_:
        g0 = invert_gamma(gamma0)
        u = 0.0
        return FlowState(b1, gamma0, g0, u, False)
    r0 = (gamma0 - nm) / (gamma0 - np_)
    r1 = r0 * (b1 / b0) ** (2.0 * params.omega)
    if r1 == 1.0:
        raise NumericalError("flow passed through the gamma = infinity pole")
    gamma1 = (nm - np_ * r1) / (1.0 - r1)
    exited = not (nm < gamma1 < np_)
    try:
        g1 = invert_gamma(gamma1)
    except ValueError:
        g1 = math.nan
    # reduced coupling in the infrared convention u = gamma - nu_-
    return FlowState(b1, gamma1, g1, gamma1 - nm, exited)


def flow_ode_check(params: ModelParams, gamma0: float, b0: float, b1: float) -> float:
    """gamma(b1) by direct adaptive integration of the RG equation.

    Oracle companion to flow(); integrates d gamma / d ln b = beta(gamma).
    """
    s0, s1 = math.log(b0), math.log(b1)
    y = rk45(lambda s, y: np.array([beta(params, y[0])]), s0, [gamma0], s1,
             rtol=1e-11, atol=1e-13)
    return float(y[0])


def scaling_variable_step(u: float, epsilon: float, fp: FixedPointInfo) -> float:
    """One infinitesimal cutoff reduction b -> b(1 - epsilon): u' = u (1-eps)^y."""
    return u * (1.0 - epsilon) ** fp.rg_eigenvalue


# ---------------------------------------------------------------------------
# Contours of constant C_+/C_- (the flow diagram data)
# ---------------------------------------------------------------------------

def contour_constant_ratio(params: ModelParams, ratio_target: float, xi_grid):
    """Points (xi, g) where the exact C_+/C_- equals ratio_target.

    Inverting the matching formula gives gamma(g + xi^2) = 1/2 +
    xi (rho J'_omega + J'_-omega)/(rho J_omega + J_-omega) in closed form,
    so each xi costs one root inversion of gamma.  Points with no g on
    the first branch are omitted.
    """
    params.require_main()
    if ratio_target <= 0.0:
        raise ValueError("ratio_target must be positive (g between the fixed points)")
    w = params.omega
    out = []
    for xi in np.asarray(xi_grid, dtype=float):
        jw = sf.jv(w, xi)
        jmw = sf.jv(-w, xi)
        jw_p = 0.5 * (sf.jv(w - 1.0, xi) - sf.jv(w + 1.0, xi))
        jmw_p = 0.5 * (sf.jv(-w - 1.0, xi) - sf.jv(-w + 1.0, xi))
        denom = ratio_target * jw + jmw
        if denom == 0.0:
            continue
        gamma_target = 0.5 + xi * (ratio_target * jw_p + jmw_p) / denom
        if gamma_target >= 1.0:
            continue
        z = invert_gamma(gamma_target)
        g = z - xi * xi
        if 0.0 < g < PI_SQ:
            out.append((float(xi), float(g)))
    return out


# ---------------------------------------------------------------------------
# alpha < -1/4: the limit cycle
# ---------------------------------------------------------------------------

def limit_cycle_phase(params: ModelParams, eps: float = 1e-6) -> float:
    """Matching phase phi of the shallow-binding log-periodic condition.

    Determined, not fitted: integrate the outer equation psi'' =
    (alpha/x^2 + eps) psi inward from deep in the exponential tail
    (where the normalizable solution is imposed), then read the phase of
    the near-origin oscillation psi ~ sqrt(x) sin(|omega| ln x + theta)
    from the logarithmic derivative; phi = theta - |omega| ln(sqrt(eps))
    + pi/2, folded to [0, pi).
    """
    if params.mode != MODE_LIMIT_CYCLE:
        raise ValueError("limit cycle requires alpha < -1/4")
    aw = params.omega
    kap = math.sqrt(eps)
    x_far = 25.0 / kap
    x_read = 1e-3 / kap

    def rhs(x, y):
        return np.array([y[1], (params.alpha / (x * x) + eps) * y[0]])

    y = rk45(rhs, x_far, [1.0, -kap], x_read, rtol=1e-11, atol=0.0)
    psi, dpsi = float(y[0]), float(y[1])
    # x psi'/psi = 1/2 + |w| cot(|w| ln x + theta)
    cot_val = (x_read * dpsi / psi - 0.5) / aw
    theta = math.atan2(1.0, cot_val) - aw * math.log(x_read)
    phi = theta - aw * math.log(kap) + 0.5 * math.pi
    return phi % math.pi


def limit_cycle(params: ModelParams, b: float, eps: float,
                phi: float | None = None) -> LimitCycleState:
    """Roots g of the shallow-binding condition at cutoff b and eps = -E x0^2.

    Solves sqrt(g) cot sqrt(g) = 1/2 - |omega| tan(|omega| ln b +
    |omega| ln(eps)/2 + phi) on the first branch.  The root set is
    invariant under eps -> e^{-2 pi/|omega|} eps and under
    ln b -> ln b - pi/|omega| (the discrete scale symmetry).
    """
    if params.mode != MODE_LIMIT_CYCLE:
        raise ValueError("limit cycle requires alpha < -1/4")
    if b <= 0.0 or eps <= 0.0:
        raise ValueError("need b > 0 and eps > 0")
    aw = params.omega
    if phi is None:
        phi = limit_cycle_phase(params)
    theta = aw * math.log(b) + 0.5 * aw * math.log(eps) + phi
    rhs = 0.5 - aw * math.tan(theta)
    branches: list[float] = []
    if rhs < 1.0:
        branches.append(invert_gamma(rhs))
    return LimitCycleState(abs_omega=aw, b=b, eps=eps, phi=phi,
                           g_branches=tuple(branches))
