"""EM learning of the Gaussian-mixture prior and noise variance around GAMP.

Each EM pass runs GAMP under the current parameters, then updates them one at
a time from GAMP's approximate posterior: sparsity rate, per-component means
and variances, mixture weights, and finally the noise variance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import norm

from .channels import PSI_FLOOR, GmPrior, NoiseModel, PosteriorStats, clamp_lambda
from .gamp import GampConfig, GampState, gamp_run
from .operator import LinearOperator
from .uniform_fit import uniform_gm

MODES = ("sparse", "heavy_tailed")
DEFAULT_L = {"sparse": 3, "heavy_tailed": 4}
# responsibility mass below which a component is frozen for the iteration
DEGENERATE_MASS = 1e-12
# parameter floors, relative to the energy scale of the data
REL_PSI_FLOOR = PSI_FLOOR
REL_PHI_FLOOR = 1e-12


@dataclass(frozen=True)
class EmConfig:
    mode: str = "sparse"
    L: Optional[int] = None
    i_max: int = 20
    tol: float = 1e-5
    snr0: float = 100.0
    warm_start: bool = True
    learn_psi: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.L is None:
            object.__setattr__(self, "L", DEFAULT_L[self.mode])
        if self.L < 1:
            raise ValueError("L must be >= 1")
        if self.i_max < 1 or not self.tol > 0:
            raise ValueError("need i_max >= 1 and tol > 0")
        if not self.snr0 > 0:
            raise ValueError("snr0 must be positive")


def _lasso_ratio(c, delta):
    g = (1.0 + c * c) * norm.cdf(-c) - c * norm.pdf(c)
    return (1.0 - 2.0 / delta * g) / (1.0 + c * c - 2.0 * g)


def rho_se(delta: float) -> float:
    """Noiseless LASSO phase transition: largest K/M recoverable at M/N = delta."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    grid = np.linspace(1e-3, 10.0, 2000)
    vals = _lasso_ratio(grid, delta)
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(lambda c: -_lasso_ratio(c, delta), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-10})
    return float(max(-res.fun, vals[i]))


def em_init(y, op: LinearOperator, cfg: EmConfig) -> tuple[GmPrior, NoiseModel]:
    """Data-driven starting point for (lambda, omega, theta, phi, psi)."""
    y = np.asarray(y, dtype=float)
    M, N = op.m, op.n
    energy = float(y @ y)
    if energy <= 0.0:
        raise ValueError("measurements have zero energy; nothing to initialise from")
    # the LASSO curve is only defined for M < N
    delta = min(M / N, 0.999)
    lam0 = clamp_lambda(delta * rho_se(delta))
    psi0 = energy / ((cfg.snr0 + 1.0) * M)
    var0 = (energy - M * psi0) / (op.frobenius_sq() * lam0)
    L = cfg.L
    if cfg.mode == "sparse":
        omega, theta, phi = uniform_gm(L)
        theta = theta * np.sqrt(12.0 * var0)
        phi = phi * 12.0 * var0
    else:
        omega = np.full(L, 1.0 / L)
        theta = np.zeros(L)
        phi = np.arange(1, L + 1) / np.sqrt(L) * var0
    noise = NoiseModel(psi0, floor=REL_PSI_FLOOR * energy / M)
    return GmPrior(lam0, omega, theta, phi), noise


def component_mass(stats: PosteriorStats) -> np.ndarray:
    """sum_n pi_n beta_bar_{n,k}: expected number of coefficients from component k."""
    return stats.pi @ stats.beta_bar


def em_update_psi(y, z_hat, mu_z, floor: float = PSI_FLOOR) -> float:
    y = np.asarray(y, dtype=float)
    psi = float(np.mean((y - z_hat) ** 2 + mu_z))
    return max(psi, floor)


def em_update_lambda(stats: PosteriorStats) -> float:
    return clamp_lambda(float(np.mean(stats.pi)))


def em_update_theta(stats: PosteriorStats, prior: GmPrior, k: int) -> float:
    w = stats.pi * stats.beta_bar[:, k]
    mass = w.sum()
    if mass < DEGENERATE_MASS:
        return float(prior.theta[k])
    return float(w @ stats.gamma[:, k] / mass)


def em_update_phi(stats: PosteriorStats, prior: GmPrior, k: int, floor: float = 0.0) -> float:
    """Variance update; uses the *previous* mean ``prior.theta[k]``."""
    w = stats.pi * stats.beta_bar[:, k]
    mass = w.sum()
    if mass < DEGENERATE_MASS:
        return float(prior.phi[k])
    spread = (prior.theta[k] - stats.gamma[:, k]) ** 2 + stats.nu[:, k]
    return max(float(w @ spread / mass), floor)


def em_update_omega(stats: PosteriorStats, prior: Optional[GmPrior] = None) -> np.ndarray:
    total = stats.pi.sum()
    if not total > 0:
        if prior is None:
            raise ValueError("all-zero activity probabilities and no previous weights")
        return prior.omega.copy()
    omega = component_mass(stats) / total
    return omega / omega.sum()


def em_step(stats: PosteriorStats, prior: GmPrior, y, z_hat, mu_z, mode: str = "sparse",
            psi_floor: float = PSI_FLOOR, phi_floor: float = 0.0) -> tuple[GmPrior, float, list]:
    """One incremental EM update of every parameter. Returns (prior, psi, frozen)."""
    lam = em_update_lambda(stats)
    theta = prior.theta.copy()
    phi = prior.phi.copy()
    mass = component_mass(stats)
    frozen = [k for k in range(prior.L) if mass[k] < DEGENERATE_MASS]
    for k in range(prior.L):
        theta[k] = em_update_theta(stats, prior, k) if mode == "sparse" else 0.0
        phi[k] = em_update_phi(stats, prior, k, floor=phi_floor)
    omega = em_update_omega(stats, prior)
    psi = em_update_psi(y, z_hat, mu_z, floor=psi_floor)
    return GmPrior(lam, omega, theta, phi), psi, frozen


@dataclass
class EmResult:
    x_hat: np.ndarray
    mu_x: np.ndarray
    pi: np.ndarray
    prior: GmPrior
    noise: NoiseModel
    stats: PosteriorStats
    state: GampState
    trace: list = field(default_factory=list)
    converged: bool = False

    @property
    def n_iter(self) -> int:
        return len(self.trace)


def em_gm_amp(
    y,
    op: LinearOperator,
    cfg: EmConfig = EmConfig(),
    gamp_cfg: GampConfig = GampConfig(),
    init: Optional[tuple[GmPrior, NoiseModel]] = None,
    x_true=None,
    psi_init: Optional[float] = None,
) -> EmResult:
    """EM-GM-AMP at fixed mixture order.

    ``init`` overrides the default initialisation with a given (prior, noise);
    its order then sets L. ``psi_init`` replaces only the starting noise
    variance, which together with ``cfg.learn_psi=False`` runs with known
    noise. ``x_true`` only adds NMSE to the trace.
    """
    y = np.asarray(y, dtype=float)
    energy = float(y @ y)
    if init is None:
        prior, noise = em_init(y, op, cfg)
    else:
        prior, noise = init[0].copy(), NoiseModel(init[1].psi, init[1].floor)
    if psi_init is not None:
        noise = NoiseModel(psi_init, floor=noise.floor)
    psi_floor = noise.floor
    phi_floor = REL_PHI_FLOOR * energy / max(op.frobenius_sq(), 1e-300)
    xt = None if x_true is None else np.asarray(x_true, dtype=float)

    x_prev = np.zeros(op.n)
    state = None
    trace = []
    converged = False
    for i in range(1, cfg.i_max + 1):
        state, stats, gamp_conv = gamp_run(op, y, prior, noise, gamp_cfg,
                                           state=state if cfg.warm_start else None)
        x_hat = state.x_hat
        diff = float(np.sum((x_hat - x_prev) ** 2))
        ref = float(np.sum(x_prev**2))
        rec = {
            "i": i,
            "lam": prior.lam,
            "omega": prior.omega.tolist(),
            "theta": prior.theta.tolist(),
            "phi": prior.phi.tolist(),
            "psi": noise.psi,
            "gamp_iters": state.t,
            "gamp_converged": gamp_conv,
            "residual": diff / ref if ref > 0 else float("inf"),
        }
        if xt is not None:
            rec["nmse"] = float(np.sum((x_hat - xt) ** 2) / np.sum(xt**2))
        trace.append(rec)
        if diff < cfg.tol * ref:
            converged = True
            break
        prior, psi, frozen = em_step(stats, prior, y, state.z_hat, state.mu_z, cfg.mode,
                                     psi_floor=psi_floor, phi_floor=phi_floor)
        rec["frozen"] = frozen
        if cfg.learn_psi:
            noise = NoiseModel(psi, floor=psi_floor)
        x_prev = x_hat

    return EmResult(x_hat=state.x_hat, mu_x=state.mu_x, pi=stats.pi, prior=prior, noise=noise,
                    stats=stats, state=state, trace=trace, converged=converged)
