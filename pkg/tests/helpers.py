"""Shared builders and independent oracles for the test suite."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from functools import lru_cache

from tpoisson.actiondata import ActionDatum
from tpoisson.cartan import CartanJob
from tpoisson.errors import IsotropicVector
from tpoisson.logcan import LogCanonicalStructure
from tpoisson.multivec import Multivector, wedge

# criterion number -> bool, filled in by test_acceptance and echoed in the run summary
ACCEPTANCE: dict = {}

A2 = [[2, -1], [-1, 2]]
B2 = [[2, -2], [-1, 2]]
G2 = [[2, -3], [-1, 2]]
AFFINE = [[2, -2], [-2, 2]]
RANK_TWO = {"A2": A2, "B2": B2, "G2": G2, "affine": AFFINE}

# fixed words covering short and long chains in every rank-two type
CARTAN_SUITE = [
    ("A1", [[2]], (1, 1)),
    ("A1", [[2]], (1, 1, 1)),
    ("A2", A2, (1, 2, 1)),
    ("A2", A2, (1, 2, 1, 2)),
    ("A2", A2, (2, 1, 2, 1, 2)),
    ("B2", B2, (2, 1, 2)),
    ("B2", B2, (1, 2, 1, 2)),
    ("B2", B2, (2, 1, 2, 1, 2)),
    ("G2", G2, (1, 2, 1)),
    ("G2", G2, (1, 2, 1, 2)),
    ("G2", G2, (2, 1, 2, 1, 2, 1)),
    ("affine", AFFINE, (1, 2, 1, 2)),
    ("affine", AFFINE, (1, 2, 1, 2, 1, 2)),
]


def suite_jobs():
    return [(name, CartanJob.create(A, w)) for name, A, w in CARTAN_SUITE]


def beta_2p(p: int) -> ActionDatum:
    """Rank-one datum with characters (p, 1, -1, -p) and form <b, b> = 1."""
    return ActionDatum.from_lists([[1]], [[p], [1], [-1], [-p]])


def beta_2p_structure(p: int) -> LogCanonicalStructure:
    return beta_2p(p).structure()


def const(n: int, c=1) -> Multivector:
    return Multivector.monomial(n, (0,) * n, (), c)


def mono(n: int, *exps) -> Multivector:
    return Multivector.monomial(n, exps)


def field(n: int, *idx, coeff=1) -> Multivector:
    return Multivector.constant_field(n, idx, coeff)


def power(f: Multivector, k: int) -> Multivector:
    out = const(f.n)
    for _ in range(k):
        out = wedge(out, f)
    return out


def beta_2p_closed_form(p: int, flipped: bool) -> Multivector:
    """The two displayed closed forms for c = (1, 1) and c = (-p^2, -1)."""
    from tpoisson.logcan import log_canonical_bivector

    pi0 = log_canonical_bivector(beta_2p_structure(p))
    x2x3 = mono(4, 0, 1, 1, 0)
    if not flipped:
        return pi0 + field(4, 2, 3) + wedge(power(const(4) + x2x3, 2 * p), field(4, 1, 4))
    return pi0 - field(4, 2, 3) - (p * p) * wedge(power(x2x3 - const(4), 2 * p), field(4, 1, 4))


def random_rational(rnd: random.Random, nonzero: bool = True, span: int = 5) -> Fraction:
    while True:
        x = Fraction(rnd.randint(-span, span), rnd.randint(1, 3))
        if x or not nonzero:
            return x


def random_multivector(rnd: random.Random, n: int, p: int, max_terms: int = 6, max_exp: int = 2) -> Multivector:
    terms = {}
    for _ in range(rnd.randint(0, max_terms)):
        J = tuple(sorted(rnd.sample(range(1, n + 1), p)))
        a = tuple(rnd.randint(0, max_exp) for _ in range(n))
        terms[(J, a)] = random_rational(rnd)
    return Multivector(n, p, terms)


def random_log_term(rnd: random.Random, n: int, max_degree: int = 3):
    """Weight w in {-1..2}^n and index set K containing J_w, |K| <= max_degree when possible."""
    while True:
        w = [rnd.randint(-1, 2) for _ in range(n)]
        forced = [i + 1 for i in range(n) if w[i] == -1]
        if len(forced) <= max_degree:
            break
    free = [i for i in range(1, n + 1) if i not in forced]
    extra = rnd.sample(free, rnd.randint(0, min(len(free), max_degree - len(forced))))
    return tuple(w), tuple(sorted(forced + extra))


def random_action_datum(rnd: random.Random, max_n: int = 5, max_r: int = 3, span: int = 3) -> ActionDatum:
    """Random valid datum; repeats characters often so that smoothable weights show up."""
    while True:
        r = rnd.randint(1, max_r)
        n = rnd.randint(1, max_n)
        B = [[0] * r for _ in range(r)]
        for i in range(r):
            for j in range(i, r):
                B[i][j] = B[j][i] = rnd.randint(-span, span)
        pool = [[rnd.randint(-span, span) for _ in range(r)] for _ in range(rnd.randint(1, n))]
        betas = []
        for _ in range(n):
            base = rnd.choice(pool)
            betas.append([x * rnd.choice([1, -1]) for x in base] if rnd.random() < 0.5 else base)
        try:
            return ActionDatum.from_lists(B, betas)
        except IsotropicVector:
            continue


# ----- independent oracles -------------------------------------------------

def bubble_sign(seq) -> tuple:
    """Sort by adjacent swaps; return (sign, sorted tuple) or (0, None) on a repeat."""
    seq = list(seq)
    if len(set(seq)) < len(seq):
        return 0, None
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return sign, tuple(seq)


def oracle_wedge(U: Multivector, V: Multivector) -> Multivector:
    out = {}
    for (I, a), c in U.terms.items():
        for (K, b), d in V.terms.items():
            s, L = bubble_sign(I + K)
            if s:
                key = (L, tuple(x + y for x, y in zip(a, b)))
                out[key] = out.get(key, 0) + s * c * d
    return Multivector(U.n, U.degree + V.degree, out)


def oracle_log_bracket(n, u, K, w, J) -> Multivector:
    """Closed-form bracket of x^u d_K and x^w d_J in the log basis d_j = x_j d/dx_j.

    ((-1)^(|K|+1) (w . d_K) ^ d_J - d_K ^ (u . d_J)) x^(u+w), where
    w . d_K = sum_i (-1)^(i+1) w_{k_i} d_{K minus k_i}.
    """
    out = {}

    def add(indices, coeff):
        s, L = bubble_sign(indices)
        if not s or not coeff:
            return
        e = [u[i] + w[i] for i in range(n)]
        for j in L:
            e[j - 1] += 1
        key = (L, tuple(e))
        out[key] = out.get(key, 0) + s * coeff

    lead = 1 if len(K) % 2 else -1
    for i, k in enumerate(K):
        add(K[:i] + K[i + 1:] + J, lead * (-1) ** i * w[k - 1])
    for i, j in enumerate(J):
        add(K + J[:i] + J[i + 1:], -((-1) ** i) * u[j - 1])
    out = {k: v for k, v in out.items() if v}
    assert all(min(k[1]) >= 0 for k in out), "closed form left a negative exponent"
    return Multivector(n, max(len(K) + len(J) - 1, 0), out)


def oracle_det(rows) -> Fraction:
    """Cofactor expansion along the first row."""
    if not rows:
        return Fraction(1)
    total = Fraction(0)
    for j, x in enumerate(rows[0]):
        if x:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * Fraction(x) * oracle_det(minor)
    return total


def oracle_rank(rows) -> int:
    """Largest k with a nonzero k x k minor."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    for k in range(min(m, n), 0, -1):
        for R in itertools.combinations(range(m), k):
            for C in itertools.combinations(range(n), k):
                if oracle_det([[rows[i][j] for j in C] for i in R]):
                    return k
    return 0


def sign_of(e: int) -> int:
    return -1 if e % 2 else 1


@lru_cache(maxsize=None)
def jacobi_words(seed: int = 2024, per_type: int = 30):
    """Deterministic random words for the rank-two Jacobi suite."""
    rnd = random.Random(seed)
    out = []
    for name, A in RANK_TWO.items():
        for _ in range(per_type):
            word = tuple(rnd.randint(1, 2) for _ in range(rnd.randint(1, 8)))
            out.append((name, word))
    return tuple(out)
