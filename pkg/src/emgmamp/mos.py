"""Selection of the mixture order L by a BIC-penalised likelihood bound.

The bound is evaluated from the posterior statistics of the current fit
(order L^j) against each candidate prior fitted at order L, with the
posterior Gaussians collapsed onto their means.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .channels import GmPrior, PosteriorStats
from .em import DEFAULT_L, EmConfig, EmResult, em_gm_amp
from .gamp import GampConfig
from .operator import LinearOperator


class InsufficientSupport(ValueError):
    """The effective sample size sum(pi) is below 2, so the BIC term is undefined."""


def n_free_params(L: int, mode: str) -> int:
    """Real parameters that depend on L: weights, variances and (sparse mode) means."""
    return 3 * L - 1 if mode == "sparse" else 2 * L - 1


def bic_penalty(L: int, U: float, mode: str) -> float:
    return n_free_params(L, mode) * np.log(U)


@dataclass(frozen=True)
class MosConfig:
    L0: Optional[int] = None
    j_max: int = 5
    L_max: int = 8
    # penalty(L, U, mode) -> float; BIC when None
    penalty: Optional[Callable[[int, float, str], float]] = None

    def __post_init__(self):
        if self.L0 is not None and self.L0 < 1:
            raise ValueError("L0 must be >= 1")
        if self.j_max < 1 or self.L_max < 1:
            raise ValueError("j_max and L_max must be >= 1")


@dataclass
class MosMetric:
    L: int
    loglik: float
    penalty: float
    score: float
    U: float


def mos_loglik(stats: PosteriorStats, candidate: GmPrior) -> float:
    """sum_n pi_n sum_l beta_bar_{n,l} log f_X(gamma_{n,l}; candidate)."""
    logf = candidate.active_logpdf(stats.gamma)
    return float(stats.pi @ np.sum(stats.beta_bar * logf, axis=1))


def mos_metric(stats_prev: PosteriorStats, candidate: GmPrior, mode: str = "sparse",
               penalty: Optional[Callable] = None) -> MosMetric:
    U = float(np.sum(stats_prev.pi))
    if not U >= 2.0:
        raise InsufficientSupport(f"effective support sum(pi) = {U:.3g} < 2")
    ll = mos_loglik(stats_prev, candidate)
    pen = (penalty or bic_penalty)(candidate.L, U, mode)
    return MosMetric(L=candidate.L, loglik=ll, penalty=float(pen), score=ll - pen, U=U)


def split_component(prior: GmPrior, mode: str = "sparse") -> GmPrior:
    """Order L+1 prior from order L by splitting the heaviest component.

    Sparse mode moves the two halves to theta +- sqrt(phi)/2 with variance
    3 phi / 4, which keeps the component's mean and variance. Heavy-tailed
    mode keeps the means at zero and splits the variance into phi/2 and 3phi/2.
    """
    k = int(np.argmax(prior.omega))
    w, th, ph = prior.omega[k], prior.theta[k], prior.phi[k]
    omega = np.r_[np.delete(prior.omega, k), w / 2, w / 2]
    if mode == "sparse":
        d = np.sqrt(ph) / 2
        theta = np.r_[np.delete(prior.theta, k), th - d, th + d]
        phi = np.r_[np.delete(prior.phi, k), 0.75 * ph, 0.75 * ph]
    else:
        theta = np.zeros(prior.L + 1)
        phi = np.r_[np.delete(prior.phi, k), 0.5 * ph, 1.5 * ph]
    order = np.lexsort((phi, theta))
    return GmPrior(prior.lam, omega[order] / omega.sum(), theta[order], phi[order])


@dataclass
class MosResult:
    L: int
    result: EmResult
    trace: list = field(default_factory=list)
    fits: dict = field(default_factory=dict, repr=False)

    @property
    def n_iter(self) -> int:
        return len(self.trace)


def _nmse(x_true, x_hat):
    if x_true is None:
        return None
    return float(np.sum((x_hat - x_true) ** 2) / np.sum(x_true**2))


def mos_select(
    y,
    op: LinearOperator,
    cfg: EmConfig = EmConfig(),
    mos_cfg: MosConfig = MosConfig(),
    gamp_cfg: GampConfig = GampConfig(),
    x_true=None,
) -> MosResult:
    """Iterated order selection: at each j, sweep L = 1, 2, ... until the
    penalised score stops increasing, move to the best L, and stop once the
    order repeats or ``j_max`` sweeps have run.

    Candidate fits are cached per L: order 1 starts from the usual
    initialisation and order L from the order L-1 fit with one component split.
    """
    x_true = None if x_true is None else np.asarray(x_true, dtype=float)
    fits: dict[int, EmResult] = {}

    def fit(L):
        if L not in fits:
            if L == 1:
                fits[1] = em_gm_amp(y, op, replace(cfg, L=1), gamp_cfg)
            else:
                prev = fit(L - 1)
                init = (split_component(prev.prior, cfg.mode), prev.noise)
                fits[L] = em_gm_amp(y, op, replace(cfg, L=L), gamp_cfg, init=init)
        return fits[L]

    L_cur = mos_cfg.L0 if mos_cfg.L0 is not None else DEFAULT_L[cfg.mode]
    L_cur = min(L_cur, mos_cfg.L_max)
    trace = [{"j": 0, "L": L_cur, "candidates": [], "nmse": _nmse(x_true, fit(L_cur).x_hat)}]

    for j in range(1, mos_cfg.j_max + 1):
        stats_prev = fit(L_cur).stats
        cands = []
        try:
            best = None
            for L in range(1, mos_cfg.L_max + 1):
                m = mos_metric(stats_prev, fit(L).prior, cfg.mode, mos_cfg.penalty)
                cands.append({"L": L, "loglik": m.loglik, "penalty": m.penalty, "score": m.score,
                              "U": m.U, "nmse": _nmse(x_true, fit(L).x_hat)})
                # ties keep the smaller order
                if best is not None and m.score <= best.score:
                    break
                best = m
        except InsufficientSupport as err:
            trace.append({"j": j, "L": L_cur, "candidates": cands, "stopped": str(err),
                          "nmse": _nmse(x_true, fit(L_cur).x_hat)})
            break
        L_new = best.L
        trace.append({"j": j, "L": L_new, "candidates": cands, "nmse": _nmse(x_true, fit(L_new).x_hat)})
        if L_new == L_cur:
            break
        L_cur = L_new

    return MosResult(L=L_cur, result=fit(L_cur), trace=trace, fits=fits)
