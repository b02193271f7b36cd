"""Gaussian-mixture fits to the Uniform[-1/2, 1/2] density.

Sparse-mode initialisation places L means evenly on
``[-(L-1)/(2L), (L-1)/(2L)]`` and needs weights and variances that make the
mixture look uniform. Those are fitted once, offline, by EM on samples with
the means held fixed (``scripts/fit_uniform_gm.py``), and stored in
``UNIFORM_GM_FITS``. Variances are then rescaled by a common factor so that
the mixture variance is exactly 1/12, the variance of the uniform density.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .channels import log_normal_pdf


def uniform_means(L: int) -> np.ndarray:
    half = (L - 1) / (2 * L)
    return np.linspace(-half, half, L)


def raw_uniform_fit(L: int, n_samples: int = 10**6, n_iter: int = 500, seed: int = 0):
    """EM fit of (omega, phi) to Uniform[-1/2, 1/2] samples, means held fixed."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(-0.5, 0.5, n_samples)[:, None]
    theta = uniform_means(L)
    omega = np.full(L, 1.0 / L)
    phi = np.full(L, 1.0 / (12.0 * L * L)) if L > 1 else np.array([1.0 / 12.0])
    for _ in range(n_iter):
        logr = np.log(omega) + log_normal_pdf(u, theta, phi)
        resp = np.exp(logr - logsumexp(logr, axis=1, keepdims=True))
        mass = resp.sum(axis=0)
        omega = mass / n_samples
        phi = (resp * (u - theta) ** 2).sum(axis=0) / mass
    return omega / omega.sum(), phi


def fit_uniform_gm(L: int, n_samples: int = 10**6, n_iter: int = 500, seed: int = 0):
    """``raw_uniform_fit`` followed by the variance normalisation."""
    omega, phi = raw_uniform_fit(L, n_samples, n_iter, seed)
    theta = uniform_means(L)
    return omega, theta, normalize_variance(omega, theta, phi)


def normalize_variance(omega, theta, phi) -> np.ndarray:
    """Scale ``phi`` so that sum omega (phi + theta^2) == 1/12."""
    target = 1.0 / 12.0 - float(omega @ theta**2)
    return phi * (target / float(omega @ phi))


# Output of scripts/fit_uniform_gm.py (10^6 samples, 500 EM iterations, seed 0),
# before variance normalisation; weights and variances per L.
_RAW_FITS = {
    1: ([1.], [0.08340135927913431]),
    2: ([0.49991712557226464, 0.5000828744277354], [0.024924727332528207, 0.02494083112292244]),
    3: ([0.29961322034452215, 0.40004159608257345, 0.30034518357290446], [0.010505073249738877, 0.021247609519307747, 0.010520487405323332]),
    4: ([0.23139352715987158, 0.2678523640658565, 0.26966779593559337, 0.2310863128386785], [0.00607008026391927, 0.011297763482965, 0.011538679818236874, 0.006105206651009104]),
    5: ([0.17588930260076735, 0.24240689646908364, 0.16446416927145263, 0.23960356236607752, 0.17763606929261885], [0.003802090428917986, 0.008866778777076957, 0.006206228898956207, 0.008522157619615231, 0.003818626108752965]),
    6: ([0.15091613124116243, 0.18681225651783379, 0.16151398190617128, 0.16346814897332512, 0.18565158100943197, 0.15163790035207536], [0.0026732069628044976, 0.005605820972714479, 0.005358428891670064, 0.0055705101188636905, 0.005531477103253036, 0.0026839634011725567]),
    7: ([0.12596787501967965, 0.17098275999089216, 0.11398125383105417, 0.17812867727360734, 0.11220216208924748, 0.1733099902613067, 0.12542728153421248], [0.001941221959262604, 0.004542385490271751, 0.0036692457918217243, 0.0058639522754387425, 0.0036636620841312465, 0.004664632534472791, 0.0019483501213425295]),
    8: ([0.11168372166635812, 0.1442857547350987, 0.11280193031938178, 0.13256724640845224, 0.1276000757816919, 0.11510270530957709, 0.1439510621211491, 0.11200750365829111], [0.0014975349039452438, 0.0033549604003948394, 0.0030571373826742076, 0.0037678790391434173, 0.0036822198660860744, 0.003052990339006895, 0.003363796106203839, 0.0015077526395718432]),
}


def uniform_gm(L: int):
    """Stored (omega, theta, phi) for ``1 <= L <= 8``; fitted on demand above that."""
    if L < 1:
        raise ValueError("L must be >= 1")
    return tuple(a.copy() for a in _uniform_gm(L))


@lru_cache(maxsize=None)
def _uniform_gm(L: int):
    if L in _RAW_FITS:
        omega, phi = (np.array(v, dtype=float) for v in _RAW_FITS[L])
        omega = omega / omega.sum()
        theta = uniform_means(L)
        return omega, theta, normalize_variance(omega, theta, phi)
    return fit_uniform_gm(L, n_samples=10**5, n_iter=300)
