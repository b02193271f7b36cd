"""Random signals, measurement-matrix ensembles and AWGN for the experiments.

Every generator takes a seed (anything ``np.random.default_rng`` accepts) and
is deterministic given it.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .operator import DenseOperator, LinearOperator, RowSampledDCT

SIGNAL_KINDS = (
    "bernoulli_gaussian",
    "bernoulli",
    "bernoulli_rademacher",
    "triangular_mixture",
    "students_t",
    "log_normal",
)
MATRIX_KINDS = (
    "iid_gaussian",
    "iid_uniform",
    "iid_cauchy",
    "iid_bernoulli",
    "iid_bernoulli_rademacher",
    "row_sampled_dct",
)

# short names accepted by the CLI and config files
SIGNAL_ALIASES = {
    "bg": "bernoulli_gaussian",
    "b": "bernoulli",
    "bernoulli": "bernoulli",
    "br": "bernoulli_rademacher",
    "tri": "triangular_mixture",
    "st": "students_t",
    "t": "students_t",
    "ln": "log_normal",
}


@dataclass(frozen=True)
class SignalSpec:
    """Sparse signal of length ``n``.

    Give ``k`` for an exactly k-sparse signal with a uniformly drawn support,
    or ``lam`` for an i.i.d Bernoulli(lam) activity pattern. Neither means
    every coefficient is active.

    Amplitude parameters: ``mean``/``var`` for the Gaussian slab, ``q`` for the
    Student's-t rate, ``mu``/``sigma2`` for the log-normal, ``centers`` and
    ``half_width`` for the two-triangle mixture.
    """

    kind: str
    n: int
    k: Optional[int] = None
    lam: Optional[float] = None
    mean: float = 0.0
    var: float = 1.0
    q: float = 1.67
    mu: float = 0.0
    sigma2: float = 1.0
    centers: tuple = (-1.0, 1.0)
    half_width: float = 0.5

    def __post_init__(self):
        kind = SIGNAL_ALIASES.get(self.kind, self.kind)
        object.__setattr__(self, "kind", kind)
        if kind not in SIGNAL_KINDS:
            raise ValueError(f"unknown signal kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.k is not None and self.lam is not None:
            raise ValueError("give k or lam, not both")
        if self.k is not None and not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        if self.lam is not None and not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")
        if kind == "students_t" and not self.q > 0:
            raise ValueError("Student's-t rate q must be positive")
        if self.var <= 0 or self.sigma2 <= 0 or self.half_width <= 0:
            raise ValueError("scale parameters must be positive")
        object.__setattr__(self, "centers", tuple(float(c) for c in self.centers))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["centers"] = list(self.centers)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SignalSpec":
        d = dict(d)
        if "centers" in d:
            d["centers"] = tuple(d["centers"])
        return cls(**d)


@dataclass(frozen=True)
class MatrixSpec:
    kind: str
    m: int
    n: int
    lam_a: float = 1.0

    def __post_init__(self):
        if self.kind not in MATRIX_KINDS:
            raise ValueError(f"unknown matrix kind {self.kind!r}")
        if not (1 <= self.m and 1 <= self.n):
            raise ValueError("matrix dimensions must be positive")
        if self.kind == "row_sampled_dct" and self.m > self.n:
            raise ValueError("row-sampled DCT needs m <= n")
        if not 0.0 < self.lam_a <= 1.0:
            raise ValueError("lam_a must lie in (0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MatrixSpec":
        return cls(**d)


def _amplitudes(spec: SignalSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    kind = spec.kind
    if kind == "bernoulli_gaussian":
        return spec.mean + np.sqrt(spec.var) * rng.standard_normal(size)
    if kind == "bernoulli":
        return np.ones(size)
    if kind == "bernoulli_rademacher":
        return rng.choice([-1.0, 1.0], size=size)
    if kind == "triangular_mixture":
        centers = np.asarray(spec.centers)
        c = centers[rng.integers(0, centers.size, size=size)]
        # sum of two uniforms is triangular on [-1, 1]
        tri = rng.random(size) + rng.random(size) - 1.0
        return c + spec.half_width * tri
    if kind == "students_t":
        # density proportional to (1 + x^2)^(-(q+1)/2): a t_q variate over sqrt(q)
        return rng.standard_t(spec.q, size=size) / np.sqrt(spec.q)
    if kind == "log_normal":
        return rng.lognormal(spec.mu, np.sqrt(spec.sigma2), size=size)
    raise AssertionError(kind)


def gen_signal(spec: SignalSpec, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = np.zeros(spec.n)
    if spec.k is not None:
        support = rng.choice(spec.n, size=spec.k, replace=False)
    elif spec.lam is not None:
        support = np.flatnonzero(rng.random(spec.n) < spec.lam)
    else:
        support = np.arange(spec.n)
    x[support] = _amplitudes(spec, support.size, rng)
    return x


def _dedupe_columns(A: np.ndarray, draw, rng) -> np.ndarray:
    # redraw any column identical to an earlier one
    for _ in range(1000):
        _, first = np.unique(A, axis=1, return_index=True)
        dup = np.setdiff1d(np.arange(A.shape[1]), first)
        if dup.size == 0:
            return A
        A[:, dup] = draw((A.shape[0], dup.size), rng)
    raise RuntimeError("could not draw a matrix with distinct columns")


def gen_matrix(spec: MatrixSpec, seed) -> LinearOperator:
    rng = np.random.default_rng(seed)
    m, n = spec.m, spec.n
    kind = spec.kind
    if kind == "row_sampled_dct":
        rows = np.sort(rng.choice(n, size=m, replace=False))
        return RowSampledDCT(n, rows)
    if kind == "iid_gaussian":
        A = rng.standard_normal((m, n)) / np.sqrt(m)
    elif kind == "iid_uniform":
        A = rng.uniform(-0.5, 0.5, size=(m, n))
    elif kind == "iid_cauchy":
        A = rng.standard_cauchy((m, n))
    elif kind == "iid_bernoulli":
        def draw(shape, r):
            return (r.random(shape) < spec.lam_a).astype(float)
        A = _dedupe_columns(draw((m, n), rng), draw, rng)
    elif kind == "iid_bernoulli_rademacher":
        def draw(shape, r):
            active = r.random(shape) < spec.lam_a
            return active * r.choice([-1.0, 1.0], size=shape)
        A = _dedupe_columns(draw((m, n), rng), draw, rng)
    else:
        raise AssertionError(kind)
    return DenseOperator(A)


def add_noise(z, snr_db: float, seed) -> tuple[np.ndarray, float]:
    """AWGN at ``snr_db`` = 10 log10(||z||^2 / (M psi)). ``inf`` means noiseless."""
    z = np.asarray(z, dtype=float)
    energy = float(z @ z)
    if np.isinf(snr_db) and snr_db > 0:
        return z.copy(), 0.0
    if energy == 0.0:
        raise ValueError("cannot set an SNR for an all-zero signal")
    psi = energy / (z.size * 10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(seed)
    return z + np.sqrt(psi) * rng.standard_normal(z.size), psi
