"""Order-by-order construction of torus-invariant polynomial Poisson deformations.

Given a log-canonical base ``pi0`` and a linearly independent set S of
smoothable weights, the deformation is ``pi0 + pi1 + pi2 + ...`` with
``pi1 = sum c_theta V_theta`` and, for m >= 2,

    2 [pi0, pi_m] = -sum_{k=1}^{m-1} [pi_k, pi_{m-k}],

solved one weight space at a time by an explicit homotopy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import (CapExceeded, JacobiResidue, NonDivisible, NoValidIndex, NotFullRank,
                     ValidationError, W1Violated)
from .linalg import RatMatrix, as_rational, lp_max, rank, solve_affine, solve_integer, solve_mod2
from .logcan import (LogCanonicalStructure, SmoothableWeight, check_w1, is_linearly_independent,
                     is_t_log_symplectic, log_canonical_bivector, smoothable_weight_for_pair)
from .multivec import (Multivector, contract_coordinate, divide_by_coordinate, rescale, schouten,
                       support, wedge, weight_decompose, weight_power)

Schedule = Callable[[list], list]


@dataclass(frozen=True)
class TailWeightSet:
    by_level: dict  # level m -> tuple of (weight, multiplicities over S)
    exhausted: bool

    @property
    def max_level(self) -> int:
        levels = [m for m, found in self.by_level.items() if found]
        return max(levels, default=1)

    def weights(self, level: int) -> set:
        return {w for w, _ in self.by_level.get(level, ())}


@dataclass(frozen=True)
class Deformation:
    base: LogCanonicalStructure
    subset_S: tuple
    c: dict  # SmoothableWeight -> Fraction
    orders: tuple
    total: Multivector = field(repr=False)

    @property
    def n(self) -> int:
        return self.base.n


def tail_box(S: Sequence[SmoothableWeight]) -> list:
    """Upper bound on each multiplicity b_theta over ``{b >= 0 : sum b_theta theta >= -1}``.

    Entries are None where the bound is infinite.
    """
    n = len(S[0].theta) if S else 0
    A = [[-s.theta[i] for s in S] for i in range(n)]
    out = []
    for t in range(len(S)):
        best = lp_max([int(u == t) for u in range(len(S))], A, [1] * n)
        out.append(None if best is None else int(best))  # int() floors a nonnegative Fraction
    return out


def enumerate_tail_weights(S: Sequence[SmoothableWeight], p_max: int = 2,
                           level_cap: int = 64) -> TailWeightSet:
    """Breadth-first search for sums of m >= 2 elements of S with entries >= -1 and at most p_max -1s."""
    if p_max not in (1, 2, 3):
        raise ValueError("degree cap must be 1, 2 or 3")
    s = len(S)
    if s == 0:
        return TailWeightSet({}, True)
    n = len(S[0].theta)
    thetas = [x.theta for x in S]
    box = tail_box(S)

    def headroom(b, i):
        # largest possible future increase of coordinate i
        room = 0
        for t in range(s):
            if thetas[t][i] > 0:
                if box[t] is None:
                    return None
                room += thetas[t][i] * (box[t] - b[t])
        return room

    def dead(b, w):
        for i in range(n):
            if w[i] <= -2:
                room = headroom(b, i)
                if room is not None and w[i] + room < -1:
                    return True
        return False

    frontier = {tuple(int(u == t) for u in range(s)) for t in range(s)}
    by_level: dict = {}
    m = 1
    while frontier:
        m += 1
        if m > level_cap:
            raise CapExceeded(level_cap)
        nxt = set()
        found = []
        for b in frontier:
            for t in range(s):
                if box[t] is not None and b[t] + 1 > box[t]:
                    continue
                nb = b[:t] + (b[t] + 1,) + b[t + 1:]
                if nb in nxt:
                    continue
                w = tuple(sum(nb[u] * thetas[u][i] for u in range(s)) for i in range(n))
                if dead(nb, w):
                    continue
                nxt.add(nb)
                if min(w) >= -1 and len(support(w)) <= p_max:
                    found.append((w, nb))
        by_level[m] = tuple(sorted(found))
        frontier = nxt
    return TailWeightSet(by_level, True)


def v_theta(theta: SmoothableWeight, n: int | None = None) -> Multivector:
    n = len(theta.theta) if n is None else n
    return Multivector.log_term(n, theta.theta, theta.border)


def _homogeneous(w: Sequence[int], V: Multivector) -> None:
    if any(u != tuple(w) for u in V.weights()):
        raise ValidationError(f"multivector is not homogeneous of weight {tuple(w)}")


def d_pi0_on_weight(L: LogCanonicalStructure, w: Sequence[int], V: Multivector) -> Multivector:
    """``[pi0, V] = v_w ^ V`` with ``v_w = sum (lam w)_i x_i d/dx_i``."""
    _homogeneous(w, V)
    return wedge(Multivector.log_vector_field(L.n, L.lam_times(w)), V)


def homotopy_index(L: LogCanonicalStructure, w: Sequence[int]) -> int | None:
    a = L.lam_times(w)
    J = support(w)
    return next((i + 1 for i in range(L.n) if i + 1 not in J and a[i] != 0), None)


def homotopy_solve(L: LogCanonicalStructure, w: Sequence[int], U: Multivector) -> Multivector:
    """A preimage V of a closed U under ``v_w ^ -``, namely ``iota_{dx_i / a_i} U / x_i``."""
    w = tuple(w)
    _homogeneous(w, U)
    if not U:
        return Multivector.zero(L.n, max(U.degree - 1, 0))
    i = homotopy_index(L, w)
    if i is None:
        raise NoValidIndex(w)
    a_i = L.lam_times(w)[i - 1]
    return divide_by_coordinate(i, contract_coordinate(i, 1 / a_i, U))


def verify_jacobi(pi: Multivector) -> bool:
    if pi.degree != 2 and pi:
        raise ValidationError("Jacobi check expects a bivector")
    return not schouten(pi, pi)


def _resolve_c(S: Sequence[SmoothableWeight], c) -> dict:
    if isinstance(c, Mapping):
        by_border = {}
        for key, v in c.items():
            border = key.border if isinstance(key, SmoothableWeight) else tuple(key)
            by_border[border] = as_rational(v)
        missing = [s.border for s in S if s.border not in by_border]
        if missing:
            raise ValidationError(f"no parameter given for borders {missing}")
        out = {s: by_border[s.border] for s in S}
    else:
        c = list(c)
        if len(c) != len(S):
            raise ValidationError("parameter list must match the weight list")
        out = {s: as_rational(v) for s, v in zip(S, c)}
    zero = [s.border for s, v in out.items() if v == 0]
    if zero:
        raise ValidationError(f"parameters must be nonzero; drop borders {zero} from the subset instead")
    return out


def _validate_subset(L: LogCanonicalStructure, S: Sequence[SmoothableWeight]) -> None:
    if not is_t_log_symplectic(L):
        raise ValidationError("structure is not T-log-symplectic")
    for s in S:
        if len(s.theta) != L.n or smoothable_weight_for_pair(L, *s.border) != s:
            raise ValidationError(f"{s.theta} is not a smoothable weight of the structure")


def deform(L: LogCanonicalStructure, S: Sequence[SmoothableWeight], c, level_cap: int = 64,
           schedule: Schedule | None = None) -> Deformation:
    """The unique polynomial Poisson deformation with first-order term ``sum c_theta V_theta``.

    ``schedule`` may reorder the weights solved at each order; the result does not
    depend on it.
    """
    S = tuple(S)
    _validate_subset(L, S)
    params = _resolve_c(S, c)
    if not is_linearly_independent(S) or not check_w1(S, level_cap):
        raise W1Violated("subset does not satisfy condition W1")
    tails = enumerate_tail_weights(S, 2, level_cap)
    n = L.n
    orders = [log_canonical_bivector(L)]
    first = Multivector.zero(n, 2)
    for s in S:
        first = first + params[s] * v_theta(s, n)
    orders.append(first)
    half = Fraction(-1, 2)
    for m in range(2, tails.max_level + 1):
        obs = Multivector.zero(n, 3)
        for k in range(1, m // 2 + 1):
            term = schouten(orders[k], orders[m - k])
            obs = obs + (term if 2 * k == m else 2 * term)
        parts = weight_decompose(obs)
        keys = list(parts)
        if schedule is not None:
            keys = schedule(keys)
        allowed = tails.weights(m)
        pi_m = Multivector.zero(n, 2)
        for w in keys:
            target = half * parts[w]
            try:
                V = homotopy_solve(L, w, target)
            except (NoValidIndex, NonDivisible) as exc:
                raise JacobiResidue(f"obstruction at order {m}, weight {w} cannot be solved: {exc}") from exc
            if not V:
                continue
            if w not in allowed or d_pi0_on_weight(L, w, V) != target:
                raise JacobiResidue(f"order {m} correction at weight {w} is inconsistent")
            pi_m = pi_m + V
        orders.append(pi_m)
    total = Multivector.zero(n, 2)
    for p in orders:
        total = total + p
    if not verify_jacobi(total):
        raise JacobiResidue("assembled bivector fails the Jacobi identity")
    return Deformation(L, S, params, tuple(orders), total)


def t_pfaffian(L: LogCanonicalStructure, pi: Multivector) -> Multivector:
    """Top polyvector ``pi^r ^ u_1 ^ ... ^ u_{n-2r}``, scaled so that pi0 gives ``x_1...x_n d/dx_top``."""
    n = L.n
    rows = []
    for j in range(n):
        if rank(RatMatrix.from_rows(rows + [list(L.lam.col(j))], n)) > len(rows):
            rows.append(list(L.lam.col(j)))
    half_rank = len(rows) // 2
    extra = []
    for i in range(L.r):
        if rank(RatMatrix.from_rows(rows + [list(L.beta.row(i))], n)) > len(rows):
            rows.append(list(L.beta.row(i)))
            extra.append(L.beta.row(i))
    if len(rows) < n:
        raise NotFullRank("weights and coefficient matrix do not span the whole space")

    def build(bivector: Multivector) -> Multivector:
        out = Multivector.monomial(n, (0,) * n)
        for _ in range(half_rank):
            out = wedge(out, bivector)
        for u in extra:
            out = wedge(out, Multivector.log_vector_field(n, u))
        return out

    ref = build(log_canonical_bivector(L))
    top = ((tuple(range(1, n + 1)), (1,) * n))
    if len(ref) != 1 or ref.coefficient(*top) == 0:
        raise NotFullRank("base structure has a degenerate Pfaffian")
    return build(pi) * (1 / ref.coefficient(*top))


def _valuation(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def rescaling_witness(L: LogCanonicalStructure, S: Sequence[SmoothableWeight], c, c_new) -> tuple | None:
    """Rational t with ``rescale(t, deform(c).total) == deform(c_new).total``, or None.

    Such t exists exactly when ``prod_i t_i^theta_i = c_new_theta / c_theta`` is
    solvable in nonzero rationals; this splits into a sign system over GF(2) and
    one integer system per prime.
    """
    from sympy import factorint

    S = tuple(S)
    old, new = _resolve_c(S, c), _resolve_c(S, c_new)
    ratios = [new[s] / old[s] for s in S]
    n = L.n
    rows = [list(s.theta) for s in S]
    signs = solve_mod2(rows, [int(r < 0) for r in ratios]) if S else (0,) * n
    if signs is None:
        return None
    primes = set()
    for r in ratios:
        primes |= set(factorint(abs(r.numerator))) | set(factorint(r.denominator))
    t = [Fraction(-1 if x else 1) for x in signs]
    for p in sorted(primes):
        b = [_valuation(abs(r.numerator), p) - _valuation(r.denominator, p) for r in ratios]
        v = solve_integer(rows, b)
        if v is None:
            return None
        t = [ti * Fraction(p) ** vi for ti, vi in zip(t, v)]
    for s, r in zip(S, ratios):
        if weight_power(t, s.theta) != r:
            raise JacobiResidue("rescaling witness fails on first-order terms")
    return tuple(t)


def weight_coordinates(S: Sequence[SmoothableWeight], w: Sequence[int]) -> tuple | None:
    """Coefficients b with ``w = sum b_theta theta`` (unique for independent S), or None."""
    if not S:
        return () if not any(w) else None
    return solve_affine(RatMatrix.from_columns([s.theta for s in S]), list(w))


def maximality_projection(L: LogCanonicalStructure, S_full: Sequence[SmoothableWeight], c_new,
                          S_sub: Sequence[SmoothableWeight], level_cap: int = 64) -> Multivector:
    """Part of the full deformation whose weights are nonnegative integer sums over S_sub."""
    S_full = tuple(S_full)
    sub = set(S_sub)
    if not sub <= set(S_full):
        raise ValidationError("sub-collection must be drawn from the full collection")
    full = deform(L, S_full, c_new, level_cap)
    inside = [s in sub for s in S_full]

    def keep(w):
        b = weight_coordinates(S_full, w)
        return b is not None and all(
            x.denominator == 1 and x >= 0 and (x == 0 or ok) for x, ok in zip(b, inside))

    return full.total.filter(keep)
