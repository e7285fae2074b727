import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from latsurj.fq import (
    CyclicGroup,
    FieldTable,
    FqDistribution,
    additive_subgroups,
    balance_alpha,
    check_level_set_nesting,
    cosine_inequality_check,
    cosine_sweep,
    exact_dot_distribution,
    field,
    field_for_order,
    kneser_exhaustive,
    level_set_sweep,
    lo_bound_check,
    lo_exhaustive_grid,
    mu_hat,
    mu_hat_all,
    psi_level_set,
    spec_set,
    spectrum_subgroup_check,
    sumset,
    sym_set,
)


# -- field construction -------------------------------------------------


@pytest.mark.parametrize("p,f", [(2, 1), (3, 1), (5, 1), (2, 2), (2, 3), (3, 2), (3, 3), (5, 2), (7, 3)])
def test_field_table_axioms(p, f):
    fld = field(p, f)
    q = fld.q
    assert q == p**f
    rng = random.Random(q)
    sample = [rng.randrange(q) for _ in range(12)] + [0, 1, q - 1]
    for a in sample:
        assert fld.add(a, 0) == a
        assert fld.add(a, fld.neg(a)) == 0
        assert fld.mul(a, 1) == a
        if a:
            assert fld.mul(a, fld.inv(a)) == 1
    for a, b in itertools.product(sample[:6], repeat=2):
        assert fld.add(a, b) == fld.add(b, a)
        assert fld.mul(a, b) == fld.mul(b, a)
    for a, b, c in itertools.product(sample[:4], repeat=3):
        assert fld.mul(a, fld.add(b, c)) == fld.add(fld.mul(a, b), fld.mul(a, c))


@pytest.mark.parametrize("p,f", [(2, 2), (2, 3), (3, 2), (5, 2)])
def test_multiplicative_group_cyclic(p, f):
    fld = field(p, f)
    powers = set()
    x = 1
    for _ in range(fld.q - 1):
        powers.add(x)
        x = fld.mul(x, fld.generator)
    assert powers == set(range(1, fld.q))


@pytest.mark.parametrize("p,f", [(2, 1), (3, 1), (2, 2), (2, 3), (3, 2), (5, 2)])
def test_trace_is_linear_onto_prime_field(p, f):
    fld = field(p, f)
    for x in fld.elements():
        assert 0 <= fld.trace(x) < p
        if f == 1:
            assert fld.trace(x) == x
    for x, y in itertools.product(range(min(fld.q, 9)), repeat=2):
        assert fld.trace(fld.add(x, y)) == (fld.trace(x) + fld.trace(y)) % p
    for c in range(p):  # F_p-homogeneity
        for x in range(min(fld.q, 9)):
            cx = fld.mul(c, x)
            assert fld.trace(cx) == (c * fld.trace(x)) % p
    # trace is onto (not identically zero)
    assert any(fld.trace(x) for x in fld.elements())


def test_modulus_polynomials_are_fixed_irreducibles():
    # the deterministic picks, coefficients low degree first
    assert field(2, 2).modulus_poly == (1, 1, 1)  # x^2 + x + 1
    assert field(2, 3).modulus_poly == (1, 0, 1, 1)  # x^3 + x^2 + 1
    assert field(3, 2).modulus_poly == (1, 0, 1)  # x^2 + 1
    assert field(2, 4).modulus_poly == (1, 0, 0, 1, 1)  # x^4 + x^3 + 1


def test_field_rejects_bad_parameters():
    with pytest.raises(ValueError):
        FieldTable(4, 1)
    with pytest.raises(ValueError):
        FieldTable(2, 13)  # q over the table limit
    with pytest.raises(ValueError):
        field_for_order(12)


# -- Fourier transform -----------------------------------------------------


def test_mu_hat_at_zero_is_one():
    fld = field(3, 1)
    mu = FqDistribution.from_pairs(fld, [(0, Fraction(1, 3)), (1, Fraction(2, 3))])
    assert mu_hat(mu, 0) == pytest.approx(1.0)


def test_mu_hat_uniform_vanishes():
    for q_params in [(2, 1), (3, 1), (2, 2), (5, 1)]:
        fld = field(*q_params)
        mu = FqDistribution.uniform(fld)
        for x in range(1, fld.q):
            assert abs(mu_hat(mu, x)) <= 1e-12


def test_mu_hat_point_mass_modulus_one():
    fld = field(5, 1)
    mu = FqDistribution.point_mass(fld, 0)
    for x in fld.elements():
        assert mu_hat(mu, x) == pytest.approx(1.0)
    assert all(abs(abs(z)) <= 1 + 1e-12 for z in mu_hat_all(mu))


def test_mu_hat_all_matches_pointwise():
    fld = field(2, 3)
    rng = random.Random(1)
    numer = [rng.randint(0, 4) for _ in range(fld.q)]
    numer[0] += 1
    d = sum(numer)
    mu = FqDistribution(fld, tuple(Fraction(c, d) for c in numer))
    vec = mu_hat_all(mu)
    for x in fld.elements():
        assert vec[x] == pytest.approx(mu_hat(mu, x), abs=1e-12)


def test_parseval_identity():
    rng = random.Random(3)
    for p, f in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2)]:
        fld = field(p, f)
        numer = [rng.randint(0, 5) for _ in range(fld.q)]
        numer[rng.randrange(fld.q)] += 1
        d = sum(numer)
        mu = FqDistribution(fld, tuple(Fraction(c, d) for c in numer))
        lhs = float(np.sum(np.abs(mu_hat_all(mu)) ** 2))
        rhs = fld.q * float(sum(w * w for w in mu.weights))
        assert abs(lhs - rhs) <= 1e-10


# -- spectra ---------------------------------------------------------------


def test_spec_set_extremes():
    fld = field(3, 1)
    mu = FqDistribution.uniform(fld)
    assert spec_set(mu, 1.0).members == frozenset(fld.elements())
    assert spec_set(mu, 0.5).members == frozenset({0})
    pm = FqDistribution.point_mass(fld, 1)
    assert spec_set(pm, 0.0).members == frozenset(fld.elements())


# -- exact dot distributions -------------------------------------------------


def test_exact_dot_zero_vector():
    fld = field(5, 1)
    mu = FqDistribution.from_pairs(fld, [(0, Fraction(1, 2)), (1, Fraction(1, 2))])
    law = exact_dot_distribution(mu, [0, 0, 0])
    assert law[0] == 1


def test_exact_dot_single_coordinate_pushforward():
    fld = field(5, 1)
    mu = FqDistribution.from_pairs(fld, [(1, Fraction(1, 3)), (2, Fraction(2, 3))])
    law = exact_dot_distribution(mu, [3])
    assert law[fld.mul(3, 1)] == Fraction(1, 3)
    assert law[fld.mul(3, 2)] == Fraction(2, 3)


def test_exact_dot_f2_pair():
    fld = field(2, 1)
    mu = FqDistribution.from_pairs(fld, [(0, Fraction(1, 2)), (1, Fraction(1, 2))])
    law = exact_dot_distribution(mu, [1, 1])
    assert law == (Fraction(1, 2), Fraction(1, 2))


def test_exact_dot_sums_to_one_and_permutation_invariant():
    fld = field(7, 1)
    rng = random.Random(9)
    numer = [rng.randint(0, 3) for _ in range(7)]
    numer[0] += 1
    d = sum(numer)
    mu = FqDistribution(fld, tuple(Fraction(c, d) for c in numer))
    w = [rng.randrange(7) for _ in range(4)]
    law = exact_dot_distribution(mu, w)
    assert sum(law) == 1
    rng.shuffle(w)
    assert exact_dot_distribution(mu, w) == law


def test_exact_dot_agrees_with_brute_enumeration():
    fld = field(3, 1)
    mu = FqDistribution.from_pairs(fld, [(0, Fraction(1, 4)), (1, Fraction(3, 4))])
    w = [1, 2, 1]
    law = exact_dot_distribution(mu, w)
    brute = [Fraction(0)] * 3
    for xs in itertools.product(range(3), repeat=3):
        prob = Fraction(1)
        for x in xs:
            prob *= mu.weights[x]
        s = 0
        for x, wl in zip(xs, w):
            s = fld.add(s, fld.mul(wl, x))
        brute[s] += prob
    assert law == tuple(brute)


# -- balance and the LO bound ---------------------------------------------


def test_balance_alpha_prime_field_is_max_weight_complement():
    fld = field(5, 1)
    mu = FqDistribution.from_pairs(fld, [(0, Fraction(2, 3)), (1, Fraction(1, 3))])
    assert balance_alpha(mu) == Fraction(1, 3)


def test_balance_alpha_detects_coset_concentration():
    f4 = field(2, 2)
    # any two-element support {0, x} spans an F_2-line, so alpha = 0
    for x in (1, 2, 3):
        mu = FqDistribution.from_pairs(f4, [(0, Fraction(1, 2)), (x, Fraction(1, 2))])
        assert balance_alpha(mu) == 0
    # spreading mass over three elements balances every line coset
    mu3 = FqDistribution.from_pairs(
        f4, [(0, Fraction(1, 2)), (1, Fraction(1, 4)), (2, Fraction(1, 4))]
    )
    assert balance_alpha(mu3) == Fraction(1, 4)


def test_lo_bound_uniform_lhs_zero():
    fld = field(3, 1)
    mu = FqDistribution.uniform(fld)
    res = lo_bound_check(mu, [1, 1], 0)
    assert res.lhs == pytest.approx(0.0, abs=1e-12)
    assert res.holds


def test_lo_bound_worked_example():
    fld = field(3, 1)
    mu = FqDistribution.from_pairs(fld, [(0, Fraction(1, 2)), (1, Fraction(1, 2))])
    res = lo_bound_check(mu, [1, 1, 1, 1], 0)
    assert res.probability == Fraction(5, 16)
    assert res.lhs == pytest.approx(abs(5 / 16 - 1 / 3), abs=1e-12)
    assert res.rhs == pytest.approx(2 / math.sqrt(2), abs=1e-12)
    assert res.holds and not res.vacuous


def test_lo_bound_rejects_zero_support():
    fld = field(3, 1)
    mu = FqDistribution.uniform(fld)
    with pytest.raises(ValueError):
        lo_bound_check(mu, [0, 0], 0)


def test_lo_bound_vacuous_when_degenerate():
    f4 = field(2, 2)
    mu = FqDistribution.from_pairs(f4, [(0, Fraction(1, 2)), (1, Fraction(1, 2))])
    res = lo_bound_check(mu, [1], 0)
    assert res.vacuous and res.holds


# -- level sets --------------------------------------------------------------


def test_level_set_contains_zero_and_everything_at_large_v():
    fld = field(5, 1)
    mu = FqDistribution.from_pairs(fld, [(0, Fraction(1, 2)), (2, Fraction(1, 2))])
    w = [1, 3, 4]
    assert 0 in psi_level_set(mu, w, 0.0)
    assert psi_level_set(mu, w, len(w)).members == frozenset(fld.elements())


def test_level_set_uniform_collapses_to_zero():
    fld = field(5, 1)
    mu = FqDistribution.uniform(fld)
    w = [1, 1, 1]
    t = psi_level_set(mu, w, 2.9)
    assert t.members == frozenset({0})


def test_level_set_membership_recomputable():
    fld = field(7, 1)
    mu = FqDistribution.from_pairs(fld, [(0, Fraction(1, 3)), (1, Fraction(2, 3))])
    w = [1, 2]
    v = 0.7
    t = psi_level_set(mu, w, v)
    hat = [abs(mu_hat(mu, x)) ** 2 for x in fld.elements()]
    for x in fld.elements():
        f_x = sum(1 - hat[fld.mul(wl, x)] for wl in w)
        assert (x in t) == (f_x <= v + 1e-9)


# -- sumsets, Sym, Kneser ------------------------------------------------------


def test_sumset_examples():
    g5 = CyclicGroup(5)
    full = set(range(5))
    assert sumset(g5, full, full) == frozenset(full)
    assert sumset(g5, {2}, {3}) == frozenset({0})
    assert sumset(g5, {0, 1}, {0, 1}) == frozenset({0, 1, 2})
    assert sym_set(g5, sumset(g5, {0, 1}, {0, 1})) == frozenset({0})
    with pytest.raises(ValueError):
        sumset(g5, set(), {1})


def test_sym_set_is_subgroup():
    rng = random.Random(12)
    for n in (4, 6, 9, 12):
        g = CyclicGroup(n)
        for _ in range(20):
            x = {v for v in range(n) if rng.random() < 0.5} or {0}
            s = sym_set(g, x)
            assert 0 in s
            for a, b in itertools.product(s, repeat=2):
                assert g.add(a, b) in s
            for a in s:
                assert g.neg(a) in s


def test_kneser_inequality_naive_small():
    for n in range(1, 7):
        g = CyclicGroup(n)
        subsets = [
            {i for i in range(n) if mask >> i & 1}
            for mask in range(1, 1 << n)
        ]
        for a, b in itertools.product(subsets, repeat=2):
            x = sumset(g, a, b)
            assert len(x) + len(sym_set(g, x)) >= len(a) + len(b)


def test_kneser_fast_matches_naive_counts():
    rep = kneser_exhaustive(6)
    assert rep.cases == (2**6 - 1) ** 2
    assert rep.ok


def test_level_set_nesting_examples():
    fld = field(5, 1)
    mu = FqDistribution.from_pairs(fld, [(0, Fraction(1, 2)), (1, Fraction(1, 2))])
    w = [1, 2, 3]
    assert check_level_set_nesting(mu, w, 0.8, 1)  # k = 1 trivially
    uniform = FqDistribution.uniform(fld)
    assert check_level_set_nesting(uniform, [1, 1], 1.9, 3)  # T(v) = {0}
    for v in (0.0, 0.3, 0.9, 2.0):
        for k in (1, 2, 3):
            assert check_level_set_nesting(mu, w, v, k)


def test_cosine_inequality_examples():
    res = cosine_inequality_check([0.0, 0.0, 0.0])
    assert res.holds and res.lhs == pytest.approx(res.rhs)
    res = cosine_inequality_check([1.234])
    assert res.holds and res.lhs == pytest.approx(res.rhs)  # k = 1 equality
    rng = random.Random(5)
    for _ in range(2000):
        k = rng.randint(1, 6)
        betas = [rng.uniform(-math.pi, math.pi) for _ in range(k)]
        assert cosine_inequality_check(betas).holds


# -- spectrum vs subgroups ------------------------------------------------------


def test_spectrum_subgroup_prime_field():
    fld = field(5, 1)
    mu = FqDistribution.from_pairs(fld, [(0, Fraction(1, 2)), (1, Fraction(1, 2))])
    res = spectrum_subgroup_check(mu)
    assert res.hypothesis_ok and res.holds


def test_spectrum_subgroup_uniform_f4():
    f4 = field(2, 2)
    res = spectrum_subgroup_check(FqDistribution.uniform(f4))
    assert res.holds


def test_spectrum_subgroup_reports_hypothesis_violation():
    f4 = field(2, 2)
    line = FqDistribution.from_pairs(f4, [(0, Fraction(1, 2)), (1, Fraction(1, 2))])
    res = spectrum_subgroup_check(line)
    assert not res.hypothesis_ok
    assert res.holds is None


def test_spectrum_subgroup_randomized_f8():
    f8 = field(2, 3)
    rng = random.Random(21)
    checked = 0
    for _ in range(40):
        numer = [rng.randint(0, 4) for _ in range(8)]
        numer[rng.randrange(8)] += 1
        d = sum(numer)
        mu = FqDistribution(f8, tuple(Fraction(c, d) for c in numer))
        res = spectrum_subgroup_check(mu)
        if res.hypothesis_ok:
            checked += 1
            assert res.holds, (numer, res.witness)
    assert checked > 10


def test_additive_subgroup_counts():
    f8 = field(2, 3)
    subs = additive_subgroups(f8)
    assert sorted(len(s) for s in subs) == [1] + [2] * 7 + [4] * 7 + [8]
    for s in subs:  # closed under addition
        for a, b in itertools.product(s, repeat=2):
            assert f8.add(a, b) in s


# -- library sweeps -----------------------------------------------------------


def test_lo_grid_small_clean_and_cross_checked():
    rep = lo_exhaustive_grid(3, max_m=3, max_den=4)
    assert rep.ok and rep.cases > 0
    # cross-check the vectorized law against the exact convolution
    fld = field(3, 1)
    mu = FqDistribution(fld, (Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)))
    for w in ([1], [1, 1], [1, 2, 2]):
        law = exact_dot_distribution(mu, w)
        res = lo_bound_check(mu, w, 0)
        assert res.probability == law[0]
        assert res.holds


def test_cosine_sweep_clean():
    rep = cosine_sweep(instances=5000, seed=3)
    assert rep.cases == 5000 and rep.ok


def test_full_rank_frequency_bound():
    """Sampled n x (n-k) matrices over F_p have independent columns with
    frequency at least 1 - n(1-alpha)^k, up to 4 standard errors."""
    from latsurj.ensembles import Distribution, EnsembleSpec, derive_seed, sample_array
    from latsurj.modp import rank_of_array

    u01 = Distribution.uniform([0, 1])
    for p, n, k, trials in ((2, 20, 8, 300), (3, 15, 9, 300)):
        alpha = 1 - 1 / p
        bound = 1 - n * (1 - alpha) ** k
        hits = 0
        for i in range(trials):
            # n-k iid vectors in F_p^n, laid out as the rows of a wide draw
            spec = EnsembleSpec("iid_rect", n - k, u01, derive_seed(4242 + p, i), m=n)
            arr = sample_array(spec)
            if rank_of_array(arr, p) == n - k:
                hits += 1
        freq = hits / trials
        se = math.sqrt(max(bound * (1 - bound), 0.25 / trials) / trials)
        assert freq >= bound - 4 * se


def test_level_set_sweep_clean():
    rep = level_set_sweep(pairs=30, seed=4)
    assert rep.ok and rep.cases == 30 * 13 * 4
