from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latsurj.ensembles import (
    Distribution,
    EnsembleSpec,
    alpha_min,
    alpha_mod_p,
    derive_seed,
    parse_distribution,
    sample_array,
    sample_matrix,
    sparse_bernoulli,
    symmetrize,
)

U01 = Distribution.uniform([0, 1])


# small strategy: random rational distributions on values in [-5, 5]
@st.composite
def distributions(draw):
    values = draw(st.lists(st.integers(-5, 5), min_size=1, max_size=4, unique=True))
    numers = draw(
        st.lists(st.integers(1, 6), min_size=len(values), max_size=len(values))
    )
    total = sum(numers)
    return Distribution(tuple((v, Fraction(c, total)) for v, c in zip(values, numers)))


def test_distribution_validation():
    with pytest.raises(ValueError):
        Distribution(((0, Fraction(1, 2)), (0, Fraction(1, 2))))  # duplicate value
    with pytest.raises(ValueError):
        Distribution(((0, Fraction(1, 2)),))  # does not sum to 1
    with pytest.raises(ValueError):
        Distribution(((0, Fraction(3, 2)), (1, Fraction(-1, 2))))


def test_alpha_mod_p_examples():
    assert alpha_mod_p(U01, 2) == Fraction(1, 2)
    point = Distribution(((0, Fraction(1)),))
    assert alpha_mod_p(point, 2) == 0
    assert alpha_mod_p(point, 7) == 0
    assert alpha_mod_p(Distribution.uniform([-1, 0, 1]), 3) == Fraction(2, 3)


def test_alpha_min_examples():
    assert alpha_min(U01) == Fraction(1, 2)
    assert alpha_min(Distribution.uniform([0, 2])) == 0  # p=2 merges both atoms
    assert alpha_min(Distribution.uniform([0, 1, 2, 3])) == Fraction(1, 2)
    assert alpha_min(Distribution(((5, Fraction(1)),))) == 0  # degenerate


@given(distributions())
@settings(max_examples=50, deadline=None)
def test_alpha_min_is_global_minimum(dist):
    a = alpha_min(dist)
    assert 0 <= a <= 1 - dist.max_weight
    for p in (2, 3, 5, 7, 11, 13):
        assert alpha_mod_p(dist, p) >= a


def test_alpha_mod_p_large_prime_equals_single_weight_bound():
    dist = Distribution(((0, Fraction(2, 5)), (3, Fraction(2, 5)), (7, Fraction(1, 5))))
    for p in (11, 13, 101):  # beyond the support diameter
        assert alpha_mod_p(dist, p) == 1 - dist.max_weight


def test_sparse_bernoulli():
    assert sparse_bernoulli(Fraction(1, 2)) == U01
    d = sparse_bernoulli(Fraction(1, 10))
    assert d.atoms == ((0, Fraction(9, 10)), (1, Fraction(1, 10)))
    assert alpha_mod_p(d, 2) == Fraction(1, 10)
    with pytest.raises(ValueError):
        sparse_bernoulli(Fraction(0))
    with pytest.raises(ValueError):
        sparse_bernoulli(Fraction(3, 2))


def test_symmetrize_examples():
    point = Distribution(((4, Fraction(1)),))
    assert symmetrize(point).atoms == ((0, Fraction(1)),)
    sym = symmetrize(U01)
    assert sym.atoms == (
        (-1, Fraction(1, 4)),
        (0, Fraction(1, 2)),
        (1, Fraction(1, 4)),
    )
    assert symmetrize(Distribution.uniform([0, 1, 2])).weight_of(0) == Fraction(1, 3)


@given(distributions())
@settings(max_examples=60, deadline=None)
def test_symmetrize_weight_identities(dist):
    sym = symmetrize(dist)
    assert sym.weight_of(0) == sum(w * w for w in dist.weights)
    alpha = 1 - dist.max_weight
    alpha_sym = 1 - sym.weight_of(0)
    assert alpha <= alpha_sym <= 2 * alpha


# -- literals ---------------------------------------------------------------


def test_parse_distribution_forms():
    assert parse_distribution("uniform01") == U01
    assert parse_distribution("uniform-1,0,1") == Distribution.uniform([-1, 0, 1])
    assert parse_distribution("bernoulli(1/10)") == sparse_bernoulli(Fraction(1, 10))
    assert parse_distribution("0:9/10,1:1/10") == sparse_bernoulli(Fraction(1, 10))
    with pytest.raises(ValueError):
        parse_distribution("nonsense")


def test_literal_round_trip():
    d = parse_distribution("0:9/10,1:1/10")
    assert parse_distribution(d.literal()) == d


# -- sampling ----------------------------------------------------------------


def test_point_mass_sampling():
    spec = EnsembleSpec("iid_rect", 2, Distribution(((1, Fraction(1)),)), 9, m=2)
    assert sample_matrix(spec).entries == (1, 1, 1, 1)


def test_sampler_determinism():
    spec = EnsembleSpec("iid_rect", 3, U01, 42, m=3)
    assert sample_matrix(spec) == sample_matrix(spec)
    assert (sample_array(spec) == sample_array(spec)).all()


def test_symmetric_plus_structure():
    spec = EnsembleSpec("symmetric_plus", 5, U01, 7, u=3)
    a = sample_array(spec)
    assert a.shape == (5, 8)
    assert (a[:, :5] == a[:, :5].T).all()


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec("iid_rect", 4, U01, 0, m=3)  # m < n
    with pytest.raises(ValueError):
        EnsembleSpec("symmetric_plus", 4, U01, 0, u=-1)
    with pytest.raises(ValueError):
        EnsembleSpec("other", 4, U01, 0)


def test_derive_seed_stability_and_spread():
    a = derive_seed(123, 0)
    assert a == derive_seed(123, 0)
    assert len({derive_seed(123, i) for i in range(100)}) == 100
    assert derive_seed(123, 1) != derive_seed(124, 1)


def test_empirical_frequencies_match_weights():
    dist = parse_distribution("0:9/10,1:1/10")
    spec = EnsembleSpec("iid_rect", 100, dist, 2024, m=1000)
    draws = sample_array(spec).ravel()
    n = draws.size
    assert n == 100_000
    for value, weight in dist.atoms:
        freq = float((draws == value).sum()) / n
        w = float(weight)
        se = (w * (1 - w) / n) ** 0.5
        assert abs(freq - w) <= 4 * se


def test_sampling_respects_negative_values():
    dist = Distribution.uniform([-1, 0, 1])
    spec = EnsembleSpec("iid_rect", 10, dist, 5, m=10)
    vals = set(sample_array(spec).ravel().tolist())
    assert vals <= {-1, 0, 1}
