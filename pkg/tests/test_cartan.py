from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import A2, AFFINE, B2, G2, RANK_TWO, field, suite_jobs
from tpoisson.actiondata import analyze
from tpoisson.cartan import (GCM, CartanJob, bott_samelson_c, build_datum, cartan_weights, check_cgl,
                             find_symmetrizer, pi_i_c, theta_from_word, validate_gcm)
from tpoisson.errors import NotSymmetrizable, ValidationError
from tpoisson.logcan import log_canonical_bivector
from tpoisson.multivec import Multivector, schouten

BAD_CYCLE = [[2, -1, -2], [-1, 2, -1], [-1, -2, 2]]


def test_validate_gcm_examples():
    assert validate_gcm(GCM.of(A2)).valid
    report = validate_gcm(GCM.of([[1, -1], [-1, 2]]))
    assert not report.valid and "a_11" in report.diagnostics[0]
    assert not validate_gcm(GCM.of([[2, 1], [1, 2]])).valid
    report = validate_gcm(GCM.of(BAD_CYCLE))
    assert not report.valid and "inconsistent" in report.diagnostics[0]
    with pytest.raises(ValidationError):
        GCM.of([[2, -1]])


def test_symmetrizers():
    assert find_symmetrizer(GCM.of(A2)) == (1, 1)
    assert find_symmetrizer(GCM.of(B2)) == (1, 2)
    assert find_symmetrizer(GCM.of(G2)) == (1, 3)
    assert find_symmetrizer(GCM.of(AFFINE)) == (1, 1)
    # two components, each scaled separately
    blocks = [[2, -2, 0, 0], [-1, 2, 0, 0], [0, 0, 2, -1], [0, 0, -3, 2]]
    assert find_symmetrizer(GCM.of(blocks)) == (1, 2, 3, 1)
    with pytest.raises(NotSymmetrizable):
        find_symmetrizer(GCM.of(BAD_CYCLE))
    with pytest.raises(NotSymmetrizable):
        find_symmetrizer(GCM.of([[2, -1], [0, 2]]))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4).flatmap(lambda r: st.lists(st.integers(1, 4), min_size=r, max_size=r)),
       st.randoms(use_true_random=False))
def test_symmetrizer_recovers_a_planted_one(d, rnd):
    r = len(d)
    # symmetric B with even diagonal 2 d_i and nonpositive entries divisible by both d's
    A = [[2 if i == j else 0 for j in range(r)] for i in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            if rnd.random() < 0.6:
                b = -rnd.randint(1, 3) * d[i] * d[j]
                A[i][j], A[j][i] = b // d[i], b // d[j]
    found = find_symmetrizer(GCM.of(A))
    assert all(found[i] * A[i][j] == found[j] * A[j][i] for i in range(r) for j in range(r))
    assert all(x >= 1 for x in found)
    if r == 1 or all(A[i][j] for i in range(r) for j in range(r)):
        assert found == tuple(x // gcd(*d) for x in d)


def test_job_validation():
    with pytest.raises(ValidationError):
        CartanJob.create(A2, (1, 3))
    with pytest.raises(ValidationError):
        CartanJob.create(B2, (1, 2), d=(1, 1))
    with pytest.raises(ValidationError):
        CartanJob.create([[1, 0], [0, 2]], (1,))


def test_build_datum_examples():
    a1 = build_datum(CartanJob.create([[2]], (1, 1)))
    assert a1.betas.columns() == [(1,), (-1,)]
    assert a1.structure().lam[0, 1] == 2
    a2 = build_datum(CartanJob.create(A2, (1, 2, 1)))
    assert a2.betas.columns() == [(1, 0), (1, 1), (0, 1)]
    assert build_datum(CartanJob.create(G2, (2,))).betas.columns() == [(0, 1)]


def test_bott_samelson_preset():
    assert bott_samelson_c(CartanJob.create([[2]], (1, 1))) == {1: -2}
    assert bott_samelson_c(CartanJob.create(B2, (2, 1, 2))) == {1: -4}
    assert bott_samelson_c(CartanJob.create(A2, (1, 2))) == {}


def test_pi_examples():
    a1 = pi_i_c(CartanJob.create([[2]], (1, 1))).total
    assert a1 == Multivector.monomial(2, (1, 1), (1, 2), 2) - 2 * field(2, 1, 2)
    job = CartanJob.create(A2, (1, 2, 1))
    L = build_datum(job).structure()
    expected = log_canonical_bivector(L) - 2 * Multivector.monomial(3, (0, 1, 0), (1, 3))
    assert pi_i_c(job).total == expected
    assert not schouten(expected, expected)
    with pytest.raises(ValidationError):
        pi_i_c(CartanJob.create(A2, (1, 2, 1), c={2: 1}))
    with pytest.raises(ValidationError):
        pi_i_c(CartanJob.create(A2, (1, 2, 1, 2), c={1: 1}))


def test_word_formula_matches_the_analysis():
    for _, job in suite_jobs():
        an = analyze(build_datum(job))
        assert an.J == an.J_int == job.repeated_positions()
        for j in an.J:
            assert tuple(an.theta(j)) == theta_from_word(job, j)
    with pytest.raises(ValueError):
        theta_from_word(CartanJob.create(A2, (1, 2)), 1)


def test_first_order_term_matches_the_word():
    job = CartanJob.create(G2, (1, 2, 1, 2), c={1: 3, 2: 5})
    d = pi_i_c(job)
    # c_j prod_{j<k<j+} x_k^{-a_{i_k, i_j}} d/dx_j ^ d/dx_{j+}; here -a_21 = 1 and -a_12 = 3
    expected = (3 * Multivector.monomial(4, (0, 1, 0, 0), (1, 3))
                + 5 * Multivector.monomial(4, (0, 0, 3, 0), (2, 4)))
    assert d.orders[1] == expected


def test_cgl_examples():
    job = CartanJob.create(A2, (1, 2, 1))
    datum = build_datum(job)
    pi0 = log_canonical_bivector(datum.structure())
    report = check_cgl(datum, pi0)
    assert report.passes and report.failures == ()
    assert len(report.h_vectors) == 3
    broken = pi0 + Multivector.monomial(3, (0, 0, 2), (1, 2))
    report = check_cgl(datum, broken)
    assert not report.passes
    assert (3, (1, 2, "x3^2")) in report.failures
    with pytest.raises(ValidationError):
        check_cgl(datum, field(3, 1))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(RANK_TWO)), st.lists(st.integers(1, 2), min_size=1, max_size=7),
       st.randoms(use_true_random=False))
def test_random_words_give_cgl_extensions(name, word, rnd):
    base = CartanJob.create(RANK_TWO[name], word)
    c = {j: Fraction(rnd.choice([-3, -1, 1, 2]), rnd.randint(1, 3)) for j in base.repeated_positions()}
    job = CartanJob.create(RANK_TWO[name], word, c=c)
    datum, S = cartan_weights(job)
    d = pi_i_c(job)
    assert not schouten(d.total, d.total)
    assert check_cgl(datum, d.total).passes
    assert [s.border[0] for s in S] == list(job.repeated_positions())


def test_symmetrizer_override_is_respected():
    job = CartanJob.create(B2, (2, 1, 2), d=(2, 4))
    assert bott_samelson_c(job) == {1: -8}
    assert pi_i_c(job).total != pi_i_c(CartanJob.create(B2, (2, 1, 2))).total
