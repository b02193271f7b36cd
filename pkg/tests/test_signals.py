import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize
from scipy.special import gammaln

from emgmamp.operator import RowSampledDCT
from emgmamp.signals import (
    SIGNAL_KINDS,
    MatrixSpec,
    SignalSpec,
    add_noise,
    gen_matrix,
    gen_signal,
)


def test_bernoulli_exact_support():
    x = gen_signal(SignalSpec("bernoulli", 20, k=3), 0)
    assert np.count_nonzero(x) == 3
    np.testing.assert_array_equal(x[x != 0], 1.0)


def test_bernoulli_rademacher_moments():
    n = 10**5
    x = gen_signal(SignalSpec("br", n, k=n), 1)
    assert set(np.unique(x)) == {-1.0, 1.0}
    assert abs(x.mean()) < 3 / np.sqrt(n)
    assert abs(x.var() - 1.0) < 3 / np.sqrt(n)


def students_t_pdf(x, q):
    return np.exp(gammaln((q + 1) / 2) - gammaln(q / 2) - 0.5 * np.log(np.pi)
                  - (q + 1) / 2 * np.log1p(x * x))


def test_students_t_median_abs():
    q = 1.67
    x = gen_signal(SignalSpec("students_t", 2 * 10**5, q=q), 2)

    def central_mass(m):
        return 2 * integrate.quad(students_t_pdf, 0, m, args=(q,))[0] - 0.5

    med = optimize.brentq(central_mass, 1e-6, 100)
    assert np.median(np.abs(x)) == pytest.approx(med, rel=0.02)


def test_triangular_mixture_shape():
    x = gen_signal(SignalSpec("tri", 10**5), 3)
    assert np.all((np.abs(np.abs(x) - 1) <= 0.5))
    # equal weights on the two triangles, each symmetric about its centre
    assert abs(np.mean(x > 0) - 0.5) < 0.01
    assert abs(np.mean(np.abs(x)) - 1.0) < 0.01


def test_log_normal_parameters():
    x = gen_signal(SignalSpec("ln", 10**5, mu=0.0, sigma2=1.0), 4)
    assert np.all(x > 0)
    assert abs(np.mean(np.log(x))) < 0.01
    assert np.var(np.log(x)) == pytest.approx(1.0, rel=0.02)


def test_iid_activity_rate():
    x = gen_signal(SignalSpec("bg", 10**5, lam=0.1), 5)
    assert np.count_nonzero(x) / x.size == pytest.approx(0.1, abs=3 * np.sqrt(0.09 / x.size))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SIGNAL_KINDS), st.integers(1, 300), st.data())
def test_exact_sparsity_and_determinism(kind, n, data):
    k = data.draw(st.integers(0, n))
    seed = data.draw(st.integers(0, 2**32 - 1))
    spec = SignalSpec(kind, n, k=k)
    x = gen_signal(spec, seed)
    assert np.count_nonzero(x) == k
    np.testing.assert_array_equal(x, gen_signal(spec, seed))


def test_signal_spec_validation():
    with pytest.raises(ValueError):
        SignalSpec("bg", 10, k=11)
    with pytest.raises(ValueError):
        SignalSpec("bg", 10, k=1, lam=0.1)
    with pytest.raises(ValueError):
        SignalSpec("laplace", 10)


def test_spec_round_trip():
    s = SignalSpec("tri", 50, lam=0.1, centers=(-2, 2))
    assert SignalSpec.from_dict(s.to_dict()) == s
    m = MatrixSpec("iid_bernoulli", 10, 20, lam_a=0.15)
    assert MatrixSpec.from_dict(m.to_dict()) == m


# matrices ---------------------------------------------------------------------

def test_gaussian_column_norms():
    A = gen_matrix(MatrixSpec("iid_gaussian", 100, 200), 6).to_dense()
    norms = np.sum(A**2, axis=0)
    # each column norm^2 ~ chi2_100 / 100: mean 1, variance 0.02
    assert abs(norms.mean() - 1.0) < 3 * np.sqrt(0.02 / 200)


def test_dct_rows_distinct():
    op = gen_matrix(MatrixSpec("row_sampled_dct", 64, 256), 7)
    assert isinstance(op, RowSampledDCT)
    assert np.unique(op.rows).size == 64


def test_bernoulli_activity_fraction():
    A = gen_matrix(MatrixSpec("iid_bernoulli", 100, 200, lam_a=0.15), 8).to_dense()
    frac = np.count_nonzero(A) / A.size
    assert abs(frac - 0.15) < 3 * np.sqrt(0.15 * 0.85 / A.size)


@pytest.mark.parametrize("kind,lam_a", [("iid_bernoulli", 0.15), ("iid_bernoulli_rademacher", 0.1)])
def test_bernoulli_columns_distinct(kind, lam_a):
    # sparse short columns collide often enough that the redraw path is exercised
    A = gen_matrix(MatrixSpec(kind, 10, 60, lam_a=lam_a), 9).to_dense()
    assert np.unique(A, axis=1).shape[1] == 60


@pytest.mark.parametrize("kind", ["iid_uniform", "iid_cauchy", "iid_bernoulli_rademacher"])
def test_other_ensembles_deterministic(kind):
    spec = MatrixSpec(kind, 20, 40, lam_a=1.0)
    np.testing.assert_array_equal(gen_matrix(spec, 3).to_dense(), gen_matrix(spec, 3).to_dense())


def test_matrix_spec_validation():
    with pytest.raises(ValueError):
        MatrixSpec("iid_gaussian", 0, 5)
    with pytest.raises(ValueError):
        MatrixSpec("row_sampled_dct", 10, 5)
    with pytest.raises(ValueError):
        MatrixSpec("iid_bernoulli", 5, 5, lam_a=0.0)


# noise --------------------------------------------------------------------------

def test_noiseless_path():
    z = np.array([1.0, -2.0, 3.0])
    y, psi = add_noise(z, np.inf, 0)
    np.testing.assert_array_equal(y, z)
    assert psi == 0.0


def test_unit_energy_zero_db():
    _, psi = add_noise(np.ones(50), 0.0, 0)
    assert psi == pytest.approx(1.0)


def test_realized_snr():
    z = gen_signal(SignalSpec("bg", 1000), 1)
    snrs = []
    for s in range(100):
        y, _ = add_noise(z, 25.0, s)
        snrs.append(10 * np.log10(np.sum(z**2) / np.sum((y - z) ** 2)))
    assert abs(np.mean(snrs) - 25.0) < 0.5


def test_zero_signal_rejected():
    with pytest.raises(ValueError):
        add_noise(np.zeros(4), 10.0, 0)
