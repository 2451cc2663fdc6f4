import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klr_hopfield.kernel import (
    KernelParams,
    PatternSet,
    as_bipolar,
    gram_matrix,
    hamming,
    overlap,
    rbf_kernel,
    squared_distance,
)

# exp(-0.4) and exp(-4.0) from mpmath at 30 digits
EXP_M04 = 0.670320046035639285860337945617
EXP_M4 = 0.0183156388887341802937180212732

bipolar_pairs = st.integers(1, 64).flatmap(
    lambda n: st.tuples(
        st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n),
        st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n),
    )
)


def flip(x, idx):
    y = np.array(x, copy=True)
    y[list(idx)] *= -1
    return y


def test_squared_distance_basic(rng):
    xi = 2 * rng.integers(0, 2, 50) - 1
    assert squared_distance(xi, xi) == 0
    assert squared_distance(xi, -xi) == 200
    assert squared_distance(xi, flip(xi, [3, 17, 40])) == 12


@given(bipolar_pairs)
def test_squared_distance_matches_coordinate_sum(pair):
    x, y = (np.array(v) for v in pair)
    brute = sum((a - b) ** 2 for a, b in zip(x.tolist(), y.tolist()))
    assert squared_distance(x, y) == brute == 4 * hamming(x, y)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        squared_distance([1, -1], [1, -1, 1])
    with pytest.raises(ValueError):
        rbf_kernel([1], [1, 1], KernelParams())
    with pytest.raises(ValueError):
        overlap([1, 1], [1])


def test_rbf_values(rng):
    p = KernelParams(0.1)
    x = 2 * rng.integers(0, 2, 50) - 1
    assert rbf_kernel(x, x, p) == 1.0
    assert rbf_kernel(x, flip(x, [7]), p) == pytest.approx(EXP_M04, rel=1e-14)
    assert rbf_kernel(x, flip(x, range(10)), p) == pytest.approx(EXP_M4, rel=1e-14)


@given(bipolar_pairs, st.floats(1e-3, 5.0))
def test_rbf_bounded(pair, gamma):
    k = rbf_kernel(pair[0], pair[1], KernelParams(gamma))
    assert 0.0 <= k <= 1.0  # strict positivity can underflow for large gamma * d
    if gamma * 4 * len(pair[0]) < 700:
        assert k > 0


@pytest.mark.parametrize("gamma", [0.0, -0.1, float("nan"), float("inf")])
def test_gamma_must_be_positive(gamma):
    with pytest.raises(ValueError):
        KernelParams(gamma)


def test_as_bipolar_rejects_zero():
    with pytest.raises(ValueError):
        as_bipolar([1, 0, -1])
    with pytest.raises(ValueError):
        PatternSet(np.zeros((0, 3)))


def test_gram_single_pattern():
    ps = PatternSet([[1, -1, 1]])
    assert gram_matrix(ps, KernelParams()).tolist() == [[1.0]]


@pytest.mark.parametrize("d", [0, 1, 3, 10, 25])
def test_gram_two_patterns(d, rng):
    a = 2 * rng.integers(0, 2, 50) - 1
    ps = PatternSet(np.stack([a, flip(a, range(d))]))
    gram = gram_matrix(ps, KernelParams(0.1))
    assert gram[0, 1] == gram[1, 0]
    assert gram[0, 1] == pytest.approx(np.exp(-0.4 * d), rel=1e-14)


def test_gram_symmetric_psd(rng):
    for p in (2, 10, 50):
        ps = PatternSet.random(20, p, rng)
        gram = gram_matrix(ps, KernelParams(0.1))
        assert np.array_equal(gram, gram.T)
        assert np.all(np.diag(gram) == 1.0)
        assert np.linalg.eigvalsh(gram).min() > -1e-8
        brute = np.array([[rbf_kernel(x, y, KernelParams(0.1)) for y in ps.patterns] for x in ps.patterns])
        np.testing.assert_allclose(gram, brute, rtol=1e-15, atol=0)


def test_table_matches_kernel(rng):
    p = KernelParams(0.37)
    x = 2 * rng.integers(0, 2, 30) - 1
    table = p.table(30)
    for d in range(31):
        assert table[d] == rbf_kernel(x, flip(x, range(d)), p)


def test_overlap_cases(rng):
    x = 2 * rng.integers(0, 2, 40) - 1
    assert overlap(x, x) == 1.0
    assert overlap(x, -x) == -1.0
    for d in (1, 5, 13):
        assert overlap(x, flip(x, range(d))) == pytest.approx(1 - 2 * d / 40)


@settings(max_examples=50)
@given(st.integers(1, 20), st.integers(1, 15), st.integers(0, 2**32 - 1))
def test_hamming_to_all_patterns(n, p, seed):
    r = np.random.default_rng(seed)
    ps = PatternSet.random(n, p, r)
    s = 2 * r.integers(0, 2, n) - 1
    assert ps.hamming_to(s).tolist() == [hamming(s, x) for x in ps.patterns]
