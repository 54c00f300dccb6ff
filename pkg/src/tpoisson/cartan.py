"""Symmetrizable generalized Cartan matrices, reduced-word data and the CGL checker."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Mapping, Sequence

from .actiondata import ActionDatum, analyze, pairing, reflect, smoothable_weights_via_gamma
from .deform import Deformation, Schedule, deform
from .errors import NotSymmetrizable, TPoissonError, ValidationError
from .linalg import RatMatrix, as_rational
from .multivec import Multivector, render_monomial, weight_of_term


@dataclass(frozen=True)
class GCM:
    entries: tuple  # tuple of int tuples

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "GCM":
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValidationError("Cartan matrix must be square")
        return cls(rows)

    @property
    def size(self) -> int:
        return len(self.entries)

    def __call__(self, i: int, j: int) -> int:
        """Entry a_ij with 1-based indices."""
        return self.entries[i - 1][j - 1]


@dataclass(frozen=True)
class GCMReport:
    valid: bool
    diagnostics: tuple = ()


@dataclass(frozen=True)
class CartanJob:
    A: GCM
    d: tuple
    word: tuple
    c: dict | None = None  # j -> nonzero Fraction, keyed by position in the word

    def __post_init__(self):
        r = self.A.size
        if len(self.d) != r or any(int(x) < 1 for x in self.d):
            raise ValidationError("symmetrizer must have one positive integer per row")
        for i in range(1, r + 1):
            for j in range(1, r + 1):
                if self.d[i - 1] * self.A(i, j) != self.d[j - 1] * self.A(j, i):
                    raise ValidationError(f"symmetrizer fails at entry ({i},{j})")
        if any(not 1 <= i <= r for i in self.word):
            raise ValidationError(f"word letters must lie in 1..{r}")

    @classmethod
    def create(cls, A: Sequence[Sequence[int]] | GCM, word: Sequence[int], d: Sequence[int] | None = None,
               c: Mapping | None = None) -> "CartanJob":
        A = A if isinstance(A, GCM) else GCM.of(A)
        report = validate_gcm(A)
        if not report.valid:
            raise ValidationError("; ".join(report.diagnostics))
        d = tuple(int(x) for x in (d if d is not None else find_symmetrizer(A)))
        cc = None if c is None else {int(j): as_rational(v) for j, v in c.items()}
        return cls(A, d, tuple(int(i) for i in word), cc)

    @property
    def n(self) -> int:
        return len(self.word)

    def next_occurrence(self, j: int) -> int | None:
        letter = self.word[j - 1]
        return next((k for k in range(j + 1, self.n + 1) if self.word[k - 1] == letter), None)

    def repeated_positions(self) -> tuple:
        return tuple(j for j in range(1, self.n + 1) if self.next_occurrence(j) is not None)


def validate_gcm(A: GCM) -> GCMReport:
    problems = []
    r = A.size
    for i in range(1, r + 1):
        if A(i, i) != 2:
            problems.append(f"diagonal entry a_{i}{i} = {A(i, i)} is not 2")
        for j in range(1, r + 1):
            if i != j and A(i, j) > 0:
                problems.append(f"off-diagonal entry a_{i}{j} = {A(i, j)} is positive")
    if not problems:
        try:
            find_symmetrizer(A)
        except NotSymmetrizable as exc:
            problems.append(str(exc))
    return GCMReport(not problems, tuple(problems))


def find_symmetrizer(A: GCM) -> tuple:
    """Smallest positive integers d with ``d_i a_ij = d_j a_ji``, per connected component."""
    r = A.size
    d: list = [None] * r
    for root in range(r):
        if d[root] is not None:
            continue
        d[root] = Fraction(1)
        comp, stack = [root], [root]
        while stack:
            i = stack.pop()
            for j in range(r):
                if j == i or (A.entries[i][j] == 0 and A.entries[j][i] == 0):
                    continue
                if A.entries[i][j] == 0 or A.entries[j][i] == 0:
                    raise NotSymmetrizable(f"a_{i + 1}{j + 1} and a_{j + 1}{i + 1} are not both nonzero")
                want = d[i] * A.entries[i][j] / A.entries[j][i]
                if d[j] is None:
                    d[j] = want
                    comp.append(j)
                    stack.append(j)
                elif d[j] != want:
                    raise NotSymmetrizable(f"symmetrizer equations are inconsistent around index {j + 1}")
        scale = lcm(*(d[i].denominator for i in comp))
        ints = [int(d[i] * scale) for i in comp]
        g = gcd(*ints)
        for i, v in zip(comp, ints):
            d[i] = v // g
    return tuple(d)


def form_of(job: CartanJob) -> RatMatrix:
    r = job.A.size
    return RatMatrix.from_rows([[job.d[i] * job.A.entries[i][j] for j in range(r)] for i in range(r)], r)


def simple_root(r: int, i: int) -> tuple:
    return tuple(Fraction(int(k == i - 1)) for k in range(r))


def build_datum(job: CartanJob) -> ActionDatum:
    """Characters ``beta_j = s_{i_1} ... s_{i_{j-1}} alpha_{i_j}`` in simple-root coordinates."""
    B = form_of(job)
    r = job.A.size
    betas = []
    for j, letter in enumerate(job.word):
        v = simple_root(r, letter)
        for prev in reversed(job.word[:j]):
            v = reflect(B, simple_root(r, prev), v)
        if any(x.denominator != 1 for x in v):
            raise TPoissonError(f"beta_{j + 1} is not integral in root coordinates")
        betas.append(v)
    return ActionDatum(B, RatMatrix.from_columns(betas, r))


def theta_from_word(job: CartanJob, j: int) -> tuple:
    """Column j of QE read off the word: -1 at j and j+, ``-a_{i_k, i_j}`` strictly between."""
    k_end = job.next_occurrence(j)
    if k_end is None:
        raise ValueError(f"letter at position {j} does not repeat")
    out = [0] * job.n
    out[j - 1] = out[k_end - 1] = -1
    for k in range(j + 1, k_end):
        out[k - 1] = -job.A(job.word[k - 1], job.word[j - 1])
    return tuple(out)


def bott_samelson_c(job: CartanJob) -> dict:
    return {j: Fraction(-2 * job.d[job.word[j - 1] - 1]) for j in job.repeated_positions()}


def cartan_weights(job: CartanJob):
    """Induced structure and smoothable weights, checked against the word formula."""
    datum = build_datum(job)
    analysis = analyze(datum)
    if analysis.J_int != analysis.J or analysis.J != job.repeated_positions():
        raise TPoissonError("repeated positions of the word differ from the level-set data")
    S = smoothable_weights_via_gamma(analysis)
    for s in S:
        if s.theta != theta_from_word(job, s.border[0]):
            raise TPoissonError(f"weight at position {s.border[0]} disagrees with the word formula")
    return datum, S


def pi_i_c(job: CartanJob, level_cap: int = 64, schedule: Schedule | None = None) -> Deformation:
    datum, S = cartan_weights(job)
    c = job.c if job.c is not None else bott_samelson_c(job)
    by_pos = {s.border[0]: s for s in S}
    extra = set(c) - set(by_pos)
    if extra:
        raise ValidationError(f"parameters given for non-repeating positions {sorted(extra)}")
    missing = set(by_pos) - set(c)
    if missing:
        raise ValidationError(f"no parameter for positions {sorted(missing)}")
    return deform(datum.structure(), S, {by_pos[j].border: v for j, v in c.items()}, level_cap, schedule)


@dataclass(frozen=True)
class CGLReport:
    passes: bool
    weight_list: tuple
    h_vectors: tuple
    failures: tuple = field(default=())


def check_cgl(datum: ActionDatum, pi: Multivector) -> CGLReport:
    """Check torus invariance, Gram symmetry and the triangular shape of the brackets."""
    n = datum.n
    if pi.n != n or (pi and pi.degree != 2):
        raise ValidationError("expected a bivector on the datum's space")
    failures = []
    B = datum.form
    for (J, a), _ in pi.items():
        w = weight_of_term(J, a)
        if any(datum.betas @ w):
            failures.append((1, (J, render_monomial(a))))
    betas = datum.betas.columns()
    h = tuple(B @ b for b in betas)
    for j in range(n):
        if pairing(B, betas[j], betas[j]) == 0:
            failures.append((2, (j + 1,)))
        for k in range(j + 1, n):
            if sum(x * y for x, y in zip(betas[j], h[k])) != sum(x * y for x, y in zip(betas[k], h[j])):
                failures.append((2, (j + 1, k + 1)))
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            lead = -pairing(B, betas[j - 1], betas[k - 1])
            tail = pi.component((j, k)) - Multivector.monomial(
                n, tuple(int(i in (j - 1, k - 1)) for i in range(n)), (), lead)
            for (_, a), _ in tail.items():
                if any(e for i, e in enumerate(a) if not j < i + 1 < k):
                    failures.append((3, (j, k, render_monomial(a))))
    return CGLReport(not failures, tuple(betas), h, tuple(failures))
