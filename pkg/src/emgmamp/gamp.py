"""GAMP iterations for a Gaussian-mixture input channel and AWGN output."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .channels import GmPrior, NoiseModel, PosteriorStats, input_moments, input_posterior, output_moments
from .operator import LinearOperator


class GampDivergence(FloatingPointError):
    """Raised when a GAMP variance or residual becomes non-finite."""


@dataclass(frozen=True)
class GampConfig:
    t_max: int = 20
    tol: float = 1e-5
    variance_floor: float = 1e-30
    damping: float = 1.0  # 1.0 = undamped

    def __post_init__(self):
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")


@dataclass
class GampState:
    x_hat: np.ndarray
    mu_x: np.ndarray
    s_hat: np.ndarray
    mu_s: Optional[np.ndarray] = None
    p_hat: Optional[np.ndarray] = None
    mu_p: Optional[np.ndarray] = None
    z_hat: Optional[np.ndarray] = None
    mu_z: Optional[np.ndarray] = None
    r_hat: Optional[np.ndarray] = None
    mu_r: Optional[np.ndarray] = None
    t: int = 0


def gamp_init(prior: GmPrior, n: int, m: int) -> GampState:
    """Initial state: prior mean and variance for every coefficient, s_hat = 0."""
    mean = prior.mean()
    var = max(prior.second_moment() - mean**2, 0.0)
    return GampState(x_hat=np.full(n, mean), mu_x=np.full(n, var), s_hat=np.zeros(m))


def _check_finite(t, **arrays):
    # one summed reduction on the fast path; a nan or inf anywhere poisons it
    if np.isfinite(sum(float(np.sum(a)) for a in arrays.values())):
        return
    for name, a in arrays.items():
        if not np.all(np.isfinite(a)):
            raise GampDivergence(f"GAMP diverged at iteration {t}: non-finite values in {name}")


def gamp_run(
    op: LinearOperator,
    y,
    prior: GmPrior,
    noise: NoiseModel,
    cfg: GampConfig = GampConfig(),
    state: Optional[GampState] = None,
    callback: Optional[Callable[[int, float, Optional[float]], None]] = None,
    x_true=None,
) -> tuple[GampState, PosteriorStats, bool]:
    """Run GAMP until the relative-change test passes or ``cfg.t_max`` is hit.

    A warm ``state`` (x_hat, mu_x, s_hat) may be passed in; otherwise the prior
    moments are used. Returns the final state, the posterior statistics of the
    last input-channel evaluation and whether the stopping test was met.

    ``callback(t, residual, nmse)`` is invoked once per iteration; ``nmse`` is
    only computed when ``x_true`` is given.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (op.m,):
        raise ValueError(f"y must have length {op.m}, got shape {y.shape}")
    if state is None:
        state = gamp_init(prior, op.n, op.m)
    floor = cfg.variance_floor
    damp = cfg.damping

    x_hat = state.x_hat.astype(float, copy=True)
    mu_x = np.maximum(state.mu_x, floor)
    s_hat = state.s_hat.astype(float, copy=True)
    xt_norm = None if x_true is None else float(np.sum(np.asarray(x_true) ** 2))

    converged = False
    stats = None
    t = 0
    for t in range(1, cfg.t_max + 1):
        # output side
        mu_p = np.maximum(op._squared_forward(mu_x), floor)
        p_hat = op._forward(x_hat) - mu_p * s_hat
        z_hat, mu_z = output_moments(y, p_hat, mu_p, noise)
        mu_s_new = np.maximum((1.0 - mu_z / mu_p) / mu_p, floor)
        s_new = (z_hat - p_hat) / mu_p
        if damp == 1.0 or t == 1:
            s_hat, mu_s, x_bar = s_new, mu_s_new, x_hat
        else:
            s_hat = damp * s_new + (1.0 - damp) * s_hat
            mu_s = damp * mu_s_new + (1.0 - damp) * mu_s
            x_bar = damp * x_hat + (1.0 - damp) * x_bar

        # input side
        mu_r = 1.0 / np.maximum(op._squared_adjoint(mu_s), floor)
        mu_r = np.maximum(mu_r, floor)
        r_hat = x_bar + mu_r * op._adjoint(s_hat)
        _check_finite(t, mu_p=mu_p, p_hat=p_hat, mu_s=mu_s, s_hat=s_hat, mu_r=mu_r, r_hat=r_hat)

        stats = input_posterior(r_hat, mu_r, prior)
        x_new, mu_x_new = input_moments(stats)
        _check_finite(t, x_hat=x_new, mu_x=mu_x_new)

        diff = float(np.sum((x_new - x_hat) ** 2))
        ref = float(np.sum(x_hat**2))
        x_hat = x_new
        mu_x = np.maximum(mu_x_new, floor)
        if callback is not None:
            nmse = None
            if xt_norm:
                nmse = float(np.sum((x_hat - x_true) ** 2)) / xt_norm
            callback(t, diff / ref if ref > 0 else np.inf, nmse)
        if diff < cfg.tol * ref:
            converged = True
            break

    out = GampState(
        x_hat=x_hat, mu_x=mu_x, s_hat=s_hat, mu_s=mu_s,
        p_hat=p_hat, mu_p=mu_p, z_hat=z_hat, mu_z=mu_z,
        r_hat=r_hat, mu_r=mu_r, t=t,
    )
    return out, stats, converged

