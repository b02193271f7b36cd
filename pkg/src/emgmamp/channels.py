"""Scalar input (Gaussian-mixture prior) and output (AWGN) channels.

Everything here is closed form. Mixture likelihoods are evaluated in the
log domain so that large ``|r_hat|`` does not underflow the Dirac term.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logsumexp

LAMBDA_MIN = 1e-12
LAMBDA_MAX = 1.0 - 1e-12
PSI_FLOOR = 1e-12

_LOG2PI = np.log(2.0 * np.pi)


def log_normal_pdf(x, mean, var):
    """log N(x; mean, var), broadcasting."""
    x = np.asarray(x, dtype=float)
    return -0.5 * (_LOG2PI + np.log(var) + (x - mean) ** 2 / var)


def clamp_lambda(lam: float) -> float:
    return float(np.clip(lam, LAMBDA_MIN, LAMBDA_MAX))


@dataclass
class GmPrior:
    """Bernoulli / Gaussian-mixture prior

        p(x) = (1 - lam) delta(x) + lam * sum_l omega_l N(x; theta_l, phi_l)

    ``lam`` is clamped into ``[1e-12, 1 - 1e-12]`` on construction.
    """

    lam: float
    omega: np.ndarray
    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        self.omega = np.atleast_1d(np.asarray(self.omega, dtype=float)).copy()
        self.theta = np.atleast_1d(np.asarray(self.theta, dtype=float)).copy()
        self.phi = np.atleast_1d(np.asarray(self.phi, dtype=float)).copy()
        if not (self.omega.shape == self.theta.shape == self.phi.shape) or self.omega.ndim != 1:
            raise ValueError("omega, theta, phi must be 1-D and of equal length")
        if self.omega.size == 0:
            raise ValueError("need at least one mixture component")
        if np.any(self.omega < 0) or abs(self.omega.sum() - 1.0) > 1e-12:
            raise ValueError(f"mixture weights must be a pmf, got {self.omega}")
        if np.any(~(self.phi > 0)):
            raise ValueError(f"mixture variances must be positive, got {self.phi}")
        if not np.isfinite(self.lam):
            raise ValueError("sparsity rate must be finite")
        self.lam = clamp_lambda(self.lam)

    @property
    def L(self) -> int:
        return self.omega.size

    def mean(self) -> float:
        return self.lam * float(self.omega @ self.theta)

    def second_moment(self) -> float:
        return self.lam * float(self.omega @ (self.phi + self.theta**2))

    def variance(self) -> float:
        return self.second_moment() - self.mean() ** 2

    def active_logpdf(self, x):
        """log f_X(x) of the active (mixture) part, elementwise in x."""
        x = np.asarray(x, dtype=float)[..., None]
        with np.errstate(divide="ignore"):
            logw = np.log(self.omega)
        return logsumexp(logw + log_normal_pdf(x, self.theta, self.phi), axis=-1)

    def copy(self) -> "GmPrior":
        return GmPrior(self.lam, self.omega, self.theta, self.phi)

    def to_dict(self) -> dict:
        return {
            "lam": self.lam,
            "omega": self.omega.tolist(),
            "theta": self.theta.tolist(),
            "phi": self.phi.tolist(),
        }

    @classmethod
    def bernoulli_gaussian(cls, lam, theta=0.0, phi=1.0) -> "GmPrior":
        return cls(lam, [1.0], [theta], [phi])


@dataclass
class NoiseModel:
    """AWGN with variance ``psi``, floored at ``floor``. ``inf`` is allowed."""

    psi: float
    floor: float = PSI_FLOOR

    def __post_init__(self):
        if not self.psi >= 0:
            raise ValueError(f"noise variance must be >= 0, got {self.psi}")
        self.psi = float(max(self.psi, self.floor))


@dataclass
class PosteriorStats:
    """Per-coefficient quantities of the GM-GAMP approximate posterior.

    ``pi`` has shape (n,); ``beta_bar``, ``gamma``, ``nu`` have shape (n, L).
    ``log_zeta`` is the log normaliser, kept in log form since it underflows.
    """

    pi: np.ndarray
    beta_bar: np.ndarray
    gamma: np.ndarray
    nu: np.ndarray
    log_zeta: np.ndarray = field(repr=False)

    @property
    def zeta(self) -> np.ndarray:
        return np.exp(self.log_zeta)

    @property
    def n(self) -> int:
        return self.pi.size

    @property
    def L(self) -> int:
        return self.beta_bar.shape[1]


def gaussian_product(a, A, b, B):
    """N(x; a, A) N(x; b, B) = exp(log_scale) N(x; mean, var).

    Returns ``(mean, var, log_scale)`` with ``log_scale = log N(0; a - b, A + B)``.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if np.any(~(A > 0)) or np.any(~(B > 0)):
        raise ValueError("variances must be positive")
    var = A * B / (A + B)
    mean = (a * B + b * A) / (A + B)
    log_scale = log_normal_pdf(0.0, np.asarray(a) - b, A + B)
    return mean, var, log_scale


def input_posterior(r_hat, mu_r, prior: GmPrior) -> PosteriorStats:
    r_hat = np.asarray(r_hat, dtype=float)
    mu_r = np.asarray(mu_r, dtype=float)
    if not np.all(mu_r > 0):
        raise ValueError("mu_r must be strictly positive")
    # work in (L, n) layout, where reductions over the components are cheap,
    # and hand back transposed (n, L) views
    r = r_hat[None, :]
    v = mu_r[None, :]
    theta, phi = prior.theta[:, None], prior.phi[:, None]
    var = phi + v

    with np.errstate(divide="ignore"):
        log_w = np.log(prior.lam) + np.log(prior.omega)
    # log beta_{l,n}; zero-weight components come out as -inf and drop away
    log_beta = log_w[:, None] + log_normal_pdf(r, theta, var)
    # log-sum-exp by hand: this runs every GAMP iteration and the shifted
    # exponentials double as the unnormalised beta_bar
    peak = log_beta.max(axis=0)
    shifted = np.exp(log_beta - peak)
    total = shifted.sum(axis=0)
    log_active = peak + np.log(total)
    log_inactive = np.log1p(-prior.lam) + log_normal_pdf(r_hat, 0.0, mu_r)

    pi = expit(log_active - log_inactive)
    beta_bar = shifted / total
    gain = phi / var
    gamma = theta + gain * (r - theta)
    nu = gain * v
    log_zeta = np.logaddexp(log_inactive, log_active)
    return PosteriorStats(pi=pi, beta_bar=beta_bar.T, gamma=gamma.T, nu=nu.T, log_zeta=log_zeta)


def input_moments(stats: PosteriorStats) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance of each coefficient.

    The variance ``pi * sum_l beta_bar (nu + gamma^2) - x_hat^2`` is evaluated
    as a sum of nonnegative terms (total variance over the Dirac and the L
    components), which avoids cancellation when ``nu`` is tiny.
    """
    pi, bb, gamma = stats.pi, stats.beta_bar, stats.gamma
    x_hat = pi * (bb * gamma).sum(axis=1)
    spread = (bb * (stats.nu + (gamma - x_hat[:, None]) ** 2)).sum(axis=1)
    mu_x = pi * spread + (1.0 - pi) * x_hat**2
    return x_hat, mu_x


def output_moments(y, p_hat, mu_p, noise: NoiseModel) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance of z = a^T x under AWGN."""
    mu_p = np.asarray(mu_p, dtype=float)
    if np.any(~(mu_p > 0)):
        raise ValueError("mu_p must be strictly positive")
    psi = noise.psi
    if np.isinf(psi):
        return np.asarray(p_hat, dtype=float).copy(), mu_p.copy()
    gain = mu_p / (mu_p + psi)
    z_hat = p_hat + gain * (y - p_hat)
    mu_z = gain * psi
    return z_hat, mu_z
