"""Classical faces of the regulated inverse-square problem.

Brownian motion: W(x, t; y) is the Wiener expectation of exp(-int V) over
variance-2dt Brownian bridges absorbed at the origin; it solves the same
heat equation as the imaginary-time propagator and is estimated here by
Monte Carlo with a per-step bridge crossing correction (factor
1 - exp(-x_j x_{j+1}/eps) for the absorbed measure), which removes the
O(sqrt(eps)) discrete-absorption bias.

Chain: the same kernel read as a transfer matrix gives the partition
function of a one-dimensional chain of N coupled coordinates in the
background potential; the free-energy density per unit "volume" t = N eps
is f = -(1/eps) log lambda_max.  A bound state makes f ~ E0 < 0 (the
extensive phase); without one f -> 0, and the crossover in g is governed
by the same exponent 1/omega as the quantum binding energy.

Transfer-matrix numerics: uniform grid with a cell edge exactly at the
well boundary (the near-threshold energy is violently sensitive to the
effective well width, so the edge must not be grid-quantized), Gaussian
step applied by FFT with the image (absorbed-wall) term, leading
eigenvalue by Lanczos with Sturm bisection on the tridiagonal - the
spectral gap e^{-eps E0} - 1 is far too small for power iteration.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import ModelParams, Regulator, fixed_points
from .numerics import NumericalError
from .spectrum import bound_state

__all__ = [
    "PathEnsembleSpec",
    "ChainSpec",
    "FreeEnergyResult",
    "feynman_kac",
    "feynman_kac_batch",
    "scaling_check_W",
    "chain_partition",
    "free_energy_density",
    "free_kernel",
]

CHUNK_SAMPLES = 4096

PHASE_EXTENSIVE = "extensive"
PHASE_NONEXTENSIVE = "nonextensive"


@dataclass(frozen=True)
class PathEnsembleSpec:
    """Brownian-bridge ensemble pinned at (y, 0) -> (x, t), N steps."""

    y: float
    x: float
    t: float
    n_steps: int
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.x <= 0.0 or self.y <= 0.0:
            raise ValueError("endpoints must be positive")
        if self.t <= 0.0 or self.n_steps < 2 or self.n_samples < 1:
            raise ValueError("bad ensemble shape")


@dataclass(frozen=True)
class ChainSpec:
    """Finite chain: N inner coordinates, coupling eps, ends pinned to (y, x)."""

    y: float
    x: float
    n_links: int
    epsilon: float
    x_max: float
    n_grid: int


@dataclass(frozen=True)
class FreeEnergyResult:
    f_xy: float
    E0: float
    phase: str
    eps_used: tuple
    f_raw: tuple
    order: float
    n_grid: int = 0


def free_kernel(x: float, y: float, t: float) -> float:
    """Variance-2t heat kernel (4 pi t)^{-1/2} e^{-(x-y)^2/4t}."""
    return math.exp(-((x - y) ** 2) / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)


def absorbed_kernel(x: float, y: float, t: float) -> float:
    """Heat kernel with an absorbing wall at the origin (method of images)."""
    return free_kernel(x, y, t) - free_kernel(x, -y, t)


# ---------------------------------------------------------------------------
# Feynman-Kac Monte Carlo
# ---------------------------------------------------------------------------

def _potential_on_paths(params: ModelParams, reg: Regulator, pts: np.ndarray) -> np.ndarray:
    """V on path nodes; dead (nonpositive) nodes land in the bounded branch."""
    cut = reg.b * params.x0
    if reg.kind == "SquareWell":
        inner = -reg.g / cut ** 2
    else:
        inner = -reg.g * reg.profile(np.clip(pts / params.x0, 0.0, 1.0))
    return np.where(pts < cut, inner, params.alpha / np.maximum(pts, cut) ** 2)


def _chunk_weights(params, regs, spec: PathEnsembleSpec, mode: str, chunk_index: int,
                   n_in_chunk: int):
    """Path weights for one deterministic chunk, one column per regulator.

    Paths are built in float32 (position precision far below the Monte
    Carlo noise), sums accumulate in float64.  Square wells sharing one
    cutoff are charged via the trapezoid well occupancy and the common
    inverse-square tail action, so extra depths cost O(n_samples).
    """
    n = spec.n_steps
    eps = spec.t / n
    bitgen = np.random.Philox(key=(spec.seed & 0xFFFFFFFFFFFFFFFF) + (chunk_index << 64))
    rng = np.random.Generator(bitgen)
    path = rng.standard_normal((n_in_chunk, n), dtype=np.float32)
    path *= np.float32(math.sqrt(2.0 * eps))
    np.cumsum(path, axis=1, out=path)
    frac = (np.arange(1, n + 1) / n).astype(np.float32)
    path -= path[:, -1:] * frac
    path += np.float32(spec.y) + np.float32(spec.x - spec.y) * frac
    if mode == "free":
        return [np.ones(n_in_chunk)]
    first = np.full((n_in_chunk, 1), spec.y, dtype=np.float32)
    nodes = np.concatenate([first, path], axis=1)
    pair = nodes[:, :-1] * nodes[:, 1:]
    pair *= np.float32(-1.0 / eps)
    factors = np.exp(pair)
    np.subtract(1.0, factors, out=factors)
    # 1 - e^{-q} instead of -expm1(-q): the difference only matters for
    # factors below f32 resolution, i.e. steps that already kill the path
    np.maximum(factors, 0.0, out=factors)
    surv = np.prod(factors, axis=1).astype(np.float64)
    if mode == "barrier":
        return [surv]
    cut = regs[0].b * params.x0
    if any(r.kind != "SquareWell" or r.b != regs[0].b for r in regs):
        raise ValueError("batched paths require square wells with a common width")
    trapz_w = np.ones(n + 1, dtype=np.float32)
    trapz_w[0] = trapz_w[-1] = 0.5
    inside = nodes < np.float32(cut)
    well_time = eps * (inside.astype(np.float32) @ trapz_w).astype(np.float64)
    clipped = np.maximum(nodes, np.float32(cut))
    np.multiply(clipped, clipped, out=clipped)
    tail = np.float32(params.alpha) / clipped
    tail[inside] = 0.0
    tail_action = eps * (tail @ trapz_w).astype(np.float64)
    alive = surv > 0.0
    out = []
    for reg in regs:
        action = tail_action - (reg.g / cut ** 2) * well_time
        weight = np.where(alive, surv * np.exp(np.where(alive, -action, 0.0)), 0.0)
        out.append(weight)
    return out


def feynman_kac_batch(params: ModelParams, regs, spec: PathEnsembleSpec,
                      mode: str = "regulated", threads: int = 1):
    """(W, stderr) per regulator, all regulators sharing one path ensemble.

    Deterministic for fixed seed regardless of thread count: chunking is
    fixed at CHUNK_SAMPLES and the reduction runs in chunk order.
    """
    if mode not in ("regulated", "barrier", "free"):
        raise ValueError("mode must be regulated, barrier, or free")
    n_regs = len(regs) if mode == "regulated" else 1
    chunks = []
    remaining, idx = spec.n_samples, 0
    while remaining > 0:
        take = min(CHUNK_SAMPLES, remaining)
        chunks.append((idx, take))
        remaining -= take
        idx += 1

    def work(args):
        ci, cn = args
        return _chunk_weights(params, regs, spec, mode, ci, cn)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, chunks))
    else:
        results = [work(c) for c in chunks]
    kern = free_kernel(spec.x, spec.y, spec.t)
    out = []
    for j in range(n_regs):
        s1 = 0.0
        s2 = 0.0
        for res in results:
            w = res[j]
            s1 += float(np.sum(w))
            s2 += float(np.sum(w * w))
        n = spec.n_samples
        mean = s1 / n
        var = max(s2 / n - mean * mean, 0.0)
        out.append((kern * mean, kern * math.sqrt(var / n)))
    return out


def feynman_kac(params: ModelParams, reg: Regulator, spec: PathEnsembleSpec,
                mode: str = "regulated", threads: int = 1):
    """Monte Carlo estimate (W, stderr) of the absorbed path expectation.

    mode "regulated" weighs paths by exp(-int V) with the full regulated
    potential; "barrier" keeps only absorption (V = 0 on x > 0); "free"
    turns absorption off too (returns the free kernel, a pipeline check).
    """
    return feynman_kac_batch(params, [reg], spec, mode, threads)[0]


def scaling_check_W(params: ModelParams, b: float, sign: int,
                    x: float, y: float, t: float, lam: float, lam_prime: float,
                    n_steps: int = 4096, n_samples: int = 100000, seed: int = 20260808,
                    threads: int = 1):
    """Measured ratio W(lam x, t; lam' y)/W(x, t; y) at the fixed-point coupling.

    Returns (ratio, stderr, target) with target (lam lam')^{nu_pm}; at
    long times the ratio tends to the target, and lam' = 1/lam gives
    asymptotic equivalence (target 1).
    """
    from .core import square_well
    g_plus, g_minus = fixed_points(params)
    g = g_plus if sign == +1 else g_minus
    nu = params.nu_plus if sign == +1 else params.nu_minus
    reg = square_well(g, b)
    num_spec = PathEnsembleSpec(y=lam_prime * y, x=lam * x, t=t, n_steps=n_steps,
                                n_samples=n_samples, seed=seed)
    den_spec = PathEnsembleSpec(y=y, x=x, t=t, n_steps=n_steps,
                                n_samples=n_samples, seed=seed + 1)
    w_num, e_num = feynman_kac(params, reg, num_spec, threads=threads)
    w_den, e_den = feynman_kac(params, reg, den_spec, threads=threads)
    ratio = w_num / w_den
    rel = math.sqrt((e_num / w_num) ** 2 + (e_den / w_den) ** 2)
    return ratio, abs(ratio) * rel, (lam * lam_prime) ** nu


# ---------------------------------------------------------------------------
# Transfer matrix
# ---------------------------------------------------------------------------

class TransferOperator:
    """One eps-step of the chain on a uniform midpoint grid.

    T(x, x') = (4 pi eps)^{-1/2} exp(-(x-x')^2 / 4 eps) e^{-eps(V(x)+V(x'))/2},
    applied by FFT; with image=True the Gaussian is replaced by its
    absorbed-wall (image-subtracted) version, the exact free half-line
    step.  The grid pitch divides the unit length so the well edge falls
    on a cell boundary.
    """

    def __init__(self, params: ModelParams, reg: Regulator, eps: float,
                 x_max: float, n_grid: int, image: bool = True):
        cells_per_unit = max(1, round(n_grid / x_max))
        self.h = params.x0 / cells_per_unit
        self.n = n_grid
        self.x_max = self.n * self.h
        self.eps = eps
        self.x = (np.arange(self.n) + 0.5) * self.h
        v = _potential_on_paths(params, reg, self.x)
        self.halfweight = np.exp(-0.5 * eps * v)
        m = 2 * self.n
        self.m = m
        pref = self.h / math.sqrt(4.0 * math.pi * eps)
        d = np.arange(self.n) * self.h
        gk = pref * np.exp(-d * d / (4.0 * eps))
        kern = np.zeros(m)
        kern[:self.n] = gk
        kern[m - self.n + 1:] = gk[1:][::-1]
        self._fk = np.fft.rfft(kern)
        if image:
            dall = np.arange(m) * self.h
            self._fim = np.fft.rfft(pref * np.exp(-dall * dall / (4.0 * eps)))
        else:
            self._fim = None

    def gauss_apply(self, u: np.ndarray) -> np.ndarray:
        pad = np.zeros(self.m)
        pad[:self.n] = u
        direct = np.fft.irfft(np.fft.rfft(pad) * self._fk, self.m)[:self.n]
        if self._fim is None:
            return direct
        padr = np.zeros(self.m)
        padr[:self.n] = u[::-1]
        image = np.fft.irfft(np.fft.rfft(padr) * self._fim, self.m)[self.n:2 * self.n]
        return direct - image

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return self.halfweight * self.gauss_apply(self.halfweight * psi)


def _sturm_max_eig(diag: np.ndarray, off: np.ndarray, tol: float = 1e-15) -> float:
    """Largest eigenvalue of a symmetric tridiagonal matrix by bisection
    on the Sturm sequence count."""
    spread = 2.0 * (float(np.max(np.abs(off))) if len(off) else 0.0)
    lo = float(np.min(diag)) - spread
    hi = float(np.max(diag)) + spread
    n = len(diag)

    def count_below(lam: float) -> int:
        cnt = 0
        d = diag[0] - lam
        if d < 0:
            cnt += 1
        for i in range(1, n):
            denom = d if d != 0.0 else 1e-300
            d = (diag[i] - lam) - off[i - 1] ** 2 / denom
            if d < 0:
                cnt += 1
        return cnt

    for _ in range(240):
        mid = 0.5 * (lo + hi)
        if count_below(mid) >= n:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def lanczos_lambda_max(apply_op, n: int, max_iter: int = 30000,
                       tol: float = 1e-14, check_every: int = 200,
                       seed: int = 7) -> tuple[float, int]:
    """Largest eigenvalue of a symmetric operator from the Lanczos
    tridiagonal; the Ritz value converges to lambda_max from below, so
    loss of orthogonality cannot inflate it."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    alphas: list[float] = []
    betas: list[float] = []
    v_prev = np.zeros(n)
    beta = 0.0
    est_prev = -np.inf
    stall = 0
    for j in range(max_iter):
        w = apply_op(v)
        a = float(v @ w)
        alphas.append(a)
        w -= a * v + beta * v_prev
        beta = float(np.linalg.norm(w))
        v_prev = v
        if beta < 1e-300:
            break
        v = w / beta
        betas.append(beta)
        if (j + 1) % check_every == 0:
            est = _sturm_max_eig(np.array(alphas), np.array(betas[:-1]))
            if est_prev > -np.inf and est - est_prev < tol * max(abs(est), 1.0):
                stall += 1
                if stall >= 3:
                    break
            else:
                stall = 0
            est_prev = est
    lam = _sturm_max_eig(np.array(alphas), np.array(betas[:len(alphas) - 1]))
    return lam, len(alphas)


def chain_partition(params: ModelParams, reg: Regulator, spec: ChainSpec,
                    image: bool = False) -> float:
    """Z as the N-fold composition of the transfer kernel from y to x.

    Normalized with the (4 pi eps)^{-1/2} Gaussian factor per link, so Z
    approximates W(x, t=N eps; y) in the double-scaling limit.  image
    defaults to the literal chain (absorption only at the sites).
    """
    op = TransferOperator(params, reg, spec.epsilon, spec.x_max, spec.n_grid, image=image)
    vy = float(_potential_on_paths(params, reg, np.array([spec.y]))[0])
    vx = float(_potential_on_paths(params, reg, np.array([spec.x]))[0])
    pref = 1.0 / math.sqrt(4.0 * math.pi * spec.epsilon)
    col = pref * np.exp(-(op.x - spec.y) ** 2 / (4.0 * spec.epsilon))
    if image:
        col = col - pref * np.exp(-(op.x + spec.y) ** 2 / (4.0 * spec.epsilon))
    u = col * math.exp(-0.5 * spec.epsilon * vy) * op.halfweight
    for _ in range(spec.n_links - 1):
        u = op.apply(u)  # each application carries one grid weight h
    colx = pref * np.exp(-(op.x - spec.x) ** 2 / (4.0 * spec.epsilon))
    if image:
        colx = colx - pref * np.exp(-(op.x + spec.x) ** 2 / (4.0 * spec.epsilon))
    tail = colx * math.exp(-0.5 * spec.epsilon * vx) * op.halfweight
    return float(np.sum(u * tail) * op.h)


def free_energy_density(params: ModelParams, reg: Regulator,
                        eps_list=(0.1, 0.05, 0.025),
                        box_kappa: float = 7.0, min_box: float = 60.0,
                        resolve: float = 4.5, max_n: int = 1 << 16,
                        threads: int = 1, order: float | None = None) -> FreeEnergyResult:
    """f = -(1/eps) log lambda_max(T), Richardson-extrapolated in eps.

    The box extends box_kappa decay lengths of the bound state (or
    min_box when there is none); the grid resolves the smallest Gaussian
    step width sigma = sqrt(2 eps) by the factor `resolve`.  The
    extrapolation order is measured from the three-point differences
    unless `order` pins it (the well-edge discontinuity makes the leading
    family eps^{3/2}).
    """
    e0 = None
    if reg.kind == "SquareWell":
        st = bound_state(params, reg)
        if st is not None:
            e0 = st.energy
    else:
        from .spectrum import generic_bound_energy
        try:
            e0 = -generic_bound_energy(params, reg, reg.g)
        except ValueError:
            e0 = None
    if e0 is not None:
        x_max = max(box_kappa / math.sqrt(-e0), 4.0 * reg.b * params.x0, 8.0)
    else:
        x_max = min_box
    sigma_min = math.sqrt(2.0 * min(eps_list))
    n = 1
    while n * sigma_min / resolve < x_max and n < max_n:
        n *= 2
    eps_sorted = tuple(sorted(eps_list, reverse=True))

    def f_at(eps: float) -> float:
        op = TransferOperator(params, reg, eps, x_max, n, image=True)
        lam, _ = lanczos_lambda_max(op.apply, op.n)
        if lam <= 0.0:
            raise NumericalError("transfer matrix lost positivity")
        return -math.log(lam) / eps

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            fs = list(pool.map(f_at, eps_sorted))
    else:
        fs = [f_at(e) for e in eps_sorted]
    ratio = eps_sorted[-2] / eps_sorted[-1] if len(eps_sorted) >= 2 else 2.0
    if order is not None and len(fs) >= 2:
        f_star = fs[-1] + (fs[-1] - fs[-2]) / (ratio ** order - 1.0)
    elif len(fs) >= 3:
        d1, d2 = fs[-2] - fs[-3], fs[-1] - fs[-2]
        if d1 * d2 > 0 and abs(d2) < abs(d1):
            order = math.log(d1 / d2) / math.log(ratio)
            f_star = fs[-1] + d2 / (ratio ** order - 1.0)
        else:
            order = 1.0
            f_star = fs[-1] + (fs[-1] - fs[-2]) / (ratio - 1.0)
    elif len(fs) == 2:
        order = 1.0
        f_star = fs[-1] + (fs[-1] - fs[-2]) / (ratio - 1.0)
    else:
        order = math.nan
        f_star = fs[-1]
    phase = PHASE_EXTENSIVE if e0 is not None else PHASE_NONEXTENSIVE
    return FreeEnergyResult(f_xy=f_star, E0=e0 if e0 is not None else 0.0, phase=phase,
                            eps_used=eps_sorted, f_raw=tuple(fs), order=order,
                            n_grid=n)
