"""Log-canonical Poisson structures with a torus action and their smoothable weights."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import TPoissonError, ValidationError
from .linalg import RatMatrix, kernel, rank, solve_affine
from .multivec import Multivector, support


@dataclass(frozen=True)
class LogCanonicalStructure:
    """Skew matrix ``lam`` (n x n) and torus weights ``beta`` (r x n, column j is the weight of x_j)."""

    lam: RatMatrix
    beta: RatMatrix

    def __post_init__(self):
        if self.lam.rows != self.lam.cols:
            raise ValidationError("coefficient matrix must be square")
        for i in range(self.lam.rows):
            for j in range(i, self.lam.cols):
                if self.lam[i, j] != -self.lam[j, i]:
                    raise ValidationError(
                        f"coefficient matrix is not skew at entry ({i + 1},{j + 1})")
        if self.beta.cols != self.lam.rows:
            raise ValidationError("weight matrix must have one column per coordinate")

    @classmethod
    def from_upper(cls, n: int, upper: dict, beta: Sequence[Sequence]) -> "LogCanonicalStructure":
        """Build from ``{(j, k): lambda_jk}`` for j < k (1-based) and weight rows."""
        rows = [[Fraction(0)] * n for _ in range(n)]
        for (j, k), v in upper.items():
            rows[j - 1][k - 1] = Fraction(v)
            rows[k - 1][j - 1] = -Fraction(v)
        beta_m = RatMatrix.from_rows(beta) if beta else RatMatrix.zeros(0, n)
        return cls(RatMatrix.from_rows(rows, n), beta_m)

    @property
    def n(self) -> int:
        return self.lam.rows

    @property
    def r(self) -> int:
        return self.beta.rows

    def lam_times(self, w: Sequence) -> tuple:
        return self.lam @ w

    def beta_times(self, w: Sequence) -> tuple:
        return self.beta @ w


@dataclass(frozen=True, order=True)
class SmoothableWeight:
    border: tuple
    theta: tuple
    scale_a: Fraction = field(compare=False)

    def __post_init__(self):
        j, k = self.border
        if not j < k:
            raise ValueError("border must be an increasing pair")
        if self.theta[j - 1] != -1 or self.theta[k - 1] != -1:
            raise ValueError("theta must equal -1 at both border positions")
        if any(x < 0 for i, x in enumerate(self.theta) if i + 1 not in (j, k)):
            raise ValueError("theta must be nonnegative off the border")
        if self.scale_a == 0:
            raise ValueError("scale must be nonzero")

    def arcs(self) -> dict:
        return {i + 1: x for i, x in enumerate(self.theta) if x > 0}

    def is_negatively_bordered(self) -> bool:
        j, k = self.border
        return all(x == 0 for i, x in enumerate(self.theta) if not j <= i + 1 <= k)


@dataclass(frozen=True)
class SmoothingDiagram:
    n: int
    edges: tuple  # of SmoothableWeight, sorted by border

    def __post_init__(self):
        degree = [0] * (self.n + 1)
        for s in self.edges:
            for v in s.border:
                degree[v] += 1
        bad = [v for v in range(1, self.n + 1) if degree[v] > 2]
        if bad:
            raise TPoissonError(f"vertices {bad} lie on more than two smoothable edges")

    def arcs(self) -> list:
        return [s.arcs() for s in self.edges]

    def to_dot(self) -> str:
        lines = ["graph smoothing {", "  layout=circo;", "  node [shape=circle];"]
        lines += [f"  {v};" for v in range(1, self.n + 1)]
        for s in self.edges:
            j, k = s.border
            arcs = s.arcs()
            attrs = "style=solid"
            if arcs:
                attrs += ', label="' + " ".join(f"arcs@{i}={m}" for i, m in sorted(arcs.items())) + '"'
            lines.append(f"  {j} -- {k} [{attrs}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def log_canonical_bivector(L: LogCanonicalStructure) -> Multivector:
    n = L.n
    terms = {}
    for j in range(n):
        for k in range(j + 1, n):
            if L.lam[j, k]:
                a = tuple(int(i in (j, k)) for i in range(n))
                terms[((j + 1, k + 1), a)] = L.lam[j, k]
    return Multivector(n, 2, terms)


def is_t_log_symplectic(L: LogCanonicalStructure) -> bool:
    return not kernel(L.lam.vstack(L.beta))


def _require_tls(L: LogCanonicalStructure) -> None:
    if not is_t_log_symplectic(L):
        raise ValidationError("structure is not T-log-symplectic")


def _as_weight(values) -> tuple | None:
    if any(v.denominator != 1 for v in values):
        return None
    return tuple(int(v) for v in values)


def smoothable_weight_for_pair(L: LogCanonicalStructure, j: int, k: int) -> SmoothableWeight | None:
    """Solve ``lam theta = a(e_j - e_k), beta theta = 0, theta_j = -1`` for (theta, a)."""
    n = L.n
    rows = []
    for i in range(n):
        rows.append(list(L.lam.row(i)) + [-int(i == j - 1) + int(i == k - 1)])
    for i in range(L.r):
        rows.append(list(L.beta.row(i)) + [0])
    rows.append([int(i == j - 1) for i in range(n)] + [0])
    rhs = [0] * (n + L.r) + [-1]
    sol = solve_affine(RatMatrix.from_rows(rows, n + 1), rhs)
    if sol is None:
        return None
    theta, a = _as_weight(sol[:n]), sol[n]
    if theta is None or a == 0 or theta[k - 1] != -1:
        return None
    if any(x < 0 for i, x in enumerate(theta) if i + 1 not in (j, k)):
        return None
    return SmoothableWeight((j, k), theta, a)


def smoothable_weights(L: LogCanonicalStructure) -> list:
    _require_tls(L)
    out = []
    for j, k in itertools.combinations(range(1, L.n + 1), 2):
        s = smoothable_weight_for_pair(L, j, k)
        if s is not None:
            out.append(s)
    return out


def is_contributing(L: LogCanonicalStructure, w: Sequence[int]) -> bool:
    """True when ``lam w`` is supported on ``J_w`` (the weight carries cohomology)."""
    J = set(support(w))
    return all(x == 0 for i, x in enumerate(L.lam_times(w)) if i + 1 not in J)


def brute_force_smoothable(L: LogCanonicalStructure, cap: int = 8) -> list:
    """All w in {-1..cap}^n with two entries -1, lam w supported there summing to 0, beta w = 0."""
    if cap < 0:
        raise ValueError("cap must be nonnegative")
    n = L.n
    found = []
    for j, k in itertools.combinations(range(n), 2):
        others = [i for i in range(n) if i not in (j, k)]
        for vals in itertools.product(range(cap + 1), repeat=len(others)):
            w = [0] * n
            w[j] = w[k] = -1
            for i, v in zip(others, vals):
                w[i] = v
            if any(L.beta_times(w)):
                continue
            lw = L.lam_times(w)
            if any(lw[i] for i in others) or lw[j] + lw[k] != 0:
                continue
            found.append(tuple(w))
    return sorted(found)


def smoothing_diagram(L_or_S, n: int | None = None) -> SmoothingDiagram:
    """Diagram of a structure, or of an explicit weight list when ``n`` is given."""
    if isinstance(L_or_S, LogCanonicalStructure):
        return SmoothingDiagram(L_or_S.n, tuple(smoothable_weights(L_or_S)))
    return SmoothingDiagram(n, tuple(sorted(L_or_S)))


def _has_cycle(S: Sequence[SmoothableWeight]) -> bool:
    parent: dict = {}

    def find(v):
        while parent.setdefault(v, v) != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for s in S:
        a, b = map(find, s.border)
        if a == b:
            return True
        parent[a] = b
    return False


def is_linearly_independent(S: Sequence[SmoothableWeight]) -> bool:
    if not S:
        return True
    by_rank = rank(RatMatrix.from_columns([s.theta for s in S])) == len(S)
    if by_rank == _has_cycle(S):
        raise TPoissonError("rank test and cycle test disagree on smoothable edges")
    return by_rank


def check_w1(S: Sequence[SmoothableWeight], level_cap: int = 64) -> bool:
    """No sum of two or more elements of S lands in (Z>=-1)^n with at most one -1."""
    from .deform import enumerate_tail_weights, tail_box

    if not S:
        return True
    if any(u is None for u in tail_box(S)):
        return False
    found = enumerate_tail_weights(S, 1, level_cap)
    return not any(found.by_level.values())


def check_w2(S: Sequence[SmoothableWeight], level_cap: int = 64) -> bool:
    """Sums of m elements of S avoid weights with at most two -1 entries for large m."""
    from .deform import enumerate_tail_weights, tail_box

    if not S:
        return True
    if any(u is None for u in tail_box(S)):
        return False
    enumerate_tail_weights(S, 2, level_cap)
    return True
