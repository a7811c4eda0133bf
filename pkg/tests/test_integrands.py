import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sftquad.integrands import (
    bernoulli_b4,
    eval_f1,
    eval_f2,
    eval_f3,
    make_integrand,
    synth_sparse,
    tent_transform,
    trig_sum,
)

GL_X, GL_W = np.polynomial.legendre.leggauss(64)
GL_X01 = (GL_X + 1) / 2
GL_W01 = GL_W / 2


def quad01(g, pieces=1):
    """Composite Gauss-Legendre on [0, 1] with equal sub-intervals."""
    total = 0.0
    for i in range(pieces):
        a = i / pieces
        total += np.sum(GL_W01 * g(a + GL_X01 / pieces)) / pieces
    return total


def test_bernoulli_values():
    assert bernoulli_b4(0.0) == pytest.approx(-1 / 30, abs=1e-16)
    assert bernoulli_b4(1.0) == pytest.approx(-1 / 30, abs=1e-16)
    x = np.linspace(0, 1, 11)
    assert np.allclose(bernoulli_b4(x), x**4 - 2 * x**3 + x**2 - 1 / 30, atol=1e-15)
    assert quad01(bernoulli_b4) == pytest.approx(0.0, abs=1e-15)


def test_f1_values():
    assert eval_f1(np.array([[0.0]]))[0] == pytest.approx(29 / 30, rel=1e-15)
    assert eval_f1(np.zeros((1, 2)))[0] == pytest.approx((29 / 30) * (1 - 1 / (30 * 16)), rel=1e-15)


def test_f1_integral_mc_oracle():
    rng = np.random.default_rng(0)
    x = rng.random((400_000, 3))
    vals = eval_f1(x)
    assert abs(vals.mean() - 1.0) < 4 * vals.std() / np.sqrt(len(vals))


def test_f2_values_and_integral():
    assert eval_f2(np.array([[0.5]]))[0] == pytest.approx(-1.0)
    assert eval_f2(np.array([[0.0]]))[0] == pytest.approx(1.0)
    # kink at 1/2: integrate each half exactly
    factor = quad01(lambda x: np.abs(4 * x - 2) - 1, pieces=2)
    assert factor == pytest.approx(0.0, abs=1e-15)


def test_f3_boundary_and_values():
    assert eval_f3(np.array([[0.5, 0.5]]))[0] == 1.0
    assert eval_f3(np.array([[0.49]]))[0] == 0.0


def test_f3_integral_symmetry():
    rng = np.random.default_rng(1)
    x = rng.random((200_000, 7))
    # x -> 1 - x maps {sum >= d/2} onto {sum <= d/2}
    assert np.mean(eval_f3(x) + eval_f3(1 - x)) == pytest.approx(1.0, abs=1e-12)


def test_tent():
    assert tent_transform(0.25) == 0.5
    assert tent_transform(0.0) == 0.0
    assert tent_transform(0.5) == 1.0


def test_tent_preserves_integrals():
    for g in (np.exp, lambda u: np.cos(3 * u) + u**5, bernoulli_b4):
        assert quad01(lambda x: g(tent_transform(x)), pieces=2) == pytest.approx(quad01(g), rel=1e-13, abs=1e-15)


def test_corpus_exact_values():
    assert make_integrand("f1", 20).exact == 1.0
    assert make_integrand("f2", 20).exact == 0.0
    assert make_integrand("f3", 500).exact == 0.5
    assert make_integrand("f3-tent", 500).exact == 0.5
    with pytest.raises(ValueError):
        make_integrand("f9", 2)


@given(st.integers(0, 2**32 - 1), st.sampled_from(["f1", "f2", "f3", "f3-tent"]), st.integers(1, 60))
@settings(max_examples=100)
def test_corpus_finite_real(seed, name, d):
    x = np.random.default_rng(seed).random((16, d))
    x[0] = 0.0
    vals = make_integrand(name, d)(x)
    assert vals.shape == (16,) and np.all(np.isfinite(vals)) and np.isrealobj(vals)
    if name.startswith("f3"):
        assert set(np.unique(vals)) <= {0.0, 1.0}


def test_trig_sum_evaluation():
    f = trig_sum([[1, 0], [0, -2]], [1.0, 0.5j], a0=0.25)
    x = np.array([[0.1, 0.3]])
    expected = 0.25 + np.exp(2j * np.pi * 0.1) + 0.5j * np.exp(-2j * np.pi * 0.6)
    assert f(x)[0] == pytest.approx(expected)
    assert f.exact == 0.25


def test_synth_sparse_degenerate():
    f = synth_sparse(0, 3, 1.0, 4, np.random.default_rng(0), a0=2.5)
    assert np.allclose(f(np.random.default_rng(1).random((5, 4))), 2.5)


@given(st.integers(1, 20), st.integers(1, 5), st.floats(0.1, 10), st.integers(1, 4), st.integers(0, 1000))
@settings(max_examples=100)
def test_synth_sparse_class_constraints(K, Mfreq, l1, d, seed):
    available = (2 * Mfreq - 1) ** d - 1
    rng = np.random.default_rng(seed)
    if K > available:
        with pytest.raises(ValueError):
            synth_sparse(K, Mfreq, l1, d, rng)
        return
    f = synth_sparse(K, Mfreq, l1, d, rng)
    freqs, coeffs = f.func.freqs, f.func.coeffs
    assert len({tuple(w) for w in freqs}) == K
    assert np.all(np.abs(freqs) < Mfreq) and np.all(np.any(freqs != 0, axis=1))
    assert np.sum(np.abs(coeffs)) == pytest.approx(l1, rel=1e-12)
    assert np.sum(np.abs(coeffs)) <= l1 * (1 + 1e-12)


def test_sparse_by_name():
    f = make_integrand("sparse:K=3,M=4,l1=1.5,seed=9", 2)
    g = make_integrand("sparse:K=3,M=4,l1=1.5,seed=9", 2)
    x = np.random.default_rng(0).random((4, 2))
    assert np.array_equal(f(x), g(x))
    assert f.exact == 1.0
    with pytest.raises(ValueError):
        make_integrand("sparse:K=3", 2)
