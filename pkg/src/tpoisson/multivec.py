"""Polynomial multivector fields on affine n-space with exact coefficients.

A term is stored as ``(J, a) -> c`` and stands for ``c * x^a * d/dx_J`` where
``J`` is a strictly increasing tuple of 1-based coordinate indices and ``a`` is
a nonnegative exponent tuple.  The torus weight of the term is ``a - e_J``.

The Schouten bracket follows the convention in which ``[X, f] = X(f)`` for a
vector field X and a function f, and ``[X, Y]`` is the usual Lie bracket.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, NonDivisible, ValidationError
from .linalg import as_rational

Weight = tuple  # tuple[int, ...]


class Multivector:
    __slots__ = ("n", "degree", "_terms")

    def __init__(self, n: int, degree: int, terms: Mapping | None = None):
        if n < 0 or degree < 0:
            raise ValueError("dimension and degree must be nonnegative")
        clean = {}
        for (J, a), c in (terms or {}).items():
            J, a = tuple(J), tuple(a)
            if len(a) != n or len(J) != degree:
                raise DimensionMismatch(f"term {(J, a)} does not fit n={n}, degree={degree}")
            if any(e < 0 for e in a):
                raise ValueError(f"negative exponent in {a}")
            if any(not 1 <= j <= n for j in J) or any(x >= y for x, y in zip(J, J[1:])):
                raise ValueError(f"index set {J} must be strictly increasing within 1..{n}")
            c = as_rational(c)
            if c:
                clean[(J, a)] = clean.get((J, a), 0) + c
        self.n = n
        self.degree = degree
        self._terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def _raw(cls, n: int, degree: int, terms: dict) -> "Multivector":
        # trusted constructor for internally built term maps
        obj = cls.__new__(cls)
        obj.n = n
        obj.degree = degree
        obj._terms = {k: v for k, v in terms.items() if v}
        return obj

    @classmethod
    def zero(cls, n: int, degree: int = 0) -> "Multivector":
        return cls._raw(n, degree, {})

    @classmethod
    def monomial(cls, n: int, exponents: Sequence[int], indices: Sequence[int] = (), coeff=1) -> "Multivector":
        return cls(n, len(indices), {(tuple(indices), tuple(exponents)): coeff})

    @classmethod
    def constant_field(cls, n: int, indices: Sequence[int], coeff=1) -> "Multivector":
        """``coeff * d/dx_J`` with constant coefficient."""
        return cls.monomial(n, (0,) * n, indices, coeff)

    @classmethod
    def coordinate(cls, n: int, i: int) -> "Multivector":
        return cls.monomial(n, unit(n, i))

    @classmethod
    def log_term(cls, n: int, weight: Sequence[int], indices: Sequence[int], coeff=1) -> "Multivector":
        """``coeff * x^w * ∂_J`` in the log basis ``∂_j = x_j d/dx_j``."""
        J = tuple(sorted(indices))
        a = list(weight)
        for j in J:
            a[j - 1] += 1
        return cls.monomial(n, a, J, coeff)

    @classmethod
    def log_vector_field(cls, n: int, coeffs: Sequence) -> "Multivector":
        """``sum_i c_i x_i d/dx_i``."""
        return cls(n, 1, {((i + 1,), unit(n, i + 1)): c for i, c in enumerate(coeffs)})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Terms in canonical order: by index set, then exponent vector."""
        return sorted(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multivector):
            return NotImplemented
        if self.n != other.n:
            return False
        if not self._terms and not other._terms:
            return True
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n, self.degree if self._terms else None, frozenset(self._terms.items())))

    def _check(self, other: "Multivector") -> int:
        if self.n != other.n:
            raise DimensionMismatch(f"ambient dimensions {self.n} and {other.n} differ")
        if self._terms and other._terms and self.degree != other.degree:
            raise DimensionMismatch(f"degrees {self.degree} and {other.degree} differ")
        return self.degree if self._terms or not other._terms else other.degree

    def __add__(self, other: "Multivector") -> "Multivector":
        deg = self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return Multivector._raw(self.n, deg, out)

    def __neg__(self) -> "Multivector":
        return Multivector._raw(self.n, self.degree, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "Multivector") -> "Multivector":
        return self + (-other)

    def __mul__(self, scalar) -> "Multivector":
        s = as_rational(scalar)
        return Multivector._raw(self.n, self.degree, {k: s * c for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other: "Multivector") -> "Multivector":
        return wedge(self, other)

    def __repr__(self) -> str:
        return f"Multivector(n={self.n}, degree={self.degree}, {render(self)!r})"

    def __str__(self) -> str:
        return render(self)

    def weights(self) -> set:
        return {weight_of_term(J, a) for (J, a) in self._terms}

    def coefficient(self, indices: Sequence[int], exponents: Sequence[int]) -> Fraction:
        return self._terms.get((tuple(indices), tuple(exponents)), Fraction(0))

    def component(self, indices: Sequence[int]) -> "Multivector":
        """The polynomial coefficient of ``d/dx_J`` as a degree-0 multivector."""
        J = tuple(indices)
        return Multivector._raw(self.n, 0, {((), a): c for (K, a), c in self._terms.items() if K == J})

    def filter(self, keep) -> "Multivector":
        """Terms whose weight satisfies ``keep``."""
        return Multivector._raw(self.n, self.degree,
                                {k: c for k, c in self._terms.items() if keep(weight_of_term(*k))})


def unit(n: int, i: int) -> tuple:
    return tuple(int(j == i - 1) for j in range(n))


def weight_of_term(indices: Sequence[int], exponents: Sequence[int]) -> Weight:
    w = list(exponents)
    for j in indices:
        w[j - 1] -= 1
    return tuple(w)


def support(weight: Sequence[int]) -> tuple:
    """``J_w``: 1-based positions where the weight equals -1."""
    return tuple(i + 1 for i, x in enumerate(weight) if x == -1)


def _merge(A: tuple, B: tuple):
    """Sign and sorted union of disjoint index tuples, or None if they meet."""
    out = []
    sign = 1
    i = j = 0
    while i < len(A) and j < len(B):
        if A[i] == B[j]:
            return None
        if A[i] < B[j]:
            out.append(A[i])
            i += 1
        else:
            out.append(B[j])
            if (len(A) - i) % 2:
                sign = -sign
            j += 1
    out.extend(A[i:])
    out.extend(B[j:])
    return sign, tuple(out)


def _add_exp(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def wedge(U: Multivector, V: Multivector) -> Multivector:
    if U.n != V.n:
        raise DimensionMismatch(f"ambient dimensions {U.n} and {V.n} differ")
    out: dict = {}
    for (I, a), c in U._terms.items():
        for (K, b), d in V._terms.items():
            m = _merge(I, K)
            if m is None:
                continue
            key = (m[1], _add_exp(a, b))
            out[key] = out.get(key, 0) + m[0] * c * d
    return Multivector._raw(U.n, U.degree + V.degree, out)


def _half_bracket(P: Multivector, Q: Multivector, out: dict, factor: int) -> None:
    # accumulates factor * sum_i (right d/dxi_i of P) ^ (d/dx_i of Q)
    p = P.degree
    for (I, a), c in P._terms.items():
        for m, i in enumerate(I):
            s = -factor if (p - 1 - m) % 2 else factor
            rest = I[:m] + I[m + 1:]
            for (K, b), d in Q._terms.items():
                e = b[i - 1]
                if not e:
                    continue
                merged = _merge(rest, K)
                if merged is None:
                    continue
                exps = list(a)
                for t, x in enumerate(b):
                    exps[t] += x
                exps[i - 1] -= 1
                key = (merged[1], tuple(exps))
                out[key] = out.get(key, 0) + s * merged[0] * e * c * d


def schouten(U: Multivector, V: Multivector) -> Multivector:
    """Schouten bracket ``[U, V]`` of degree ``|U| + |V| - 1``.

    In odd-variable notation with ``xi_i = d/dx_i``:
    ``[P, Q] = sum_i dP/dxi_i ^ dQ/dx_i - (-1)^((p-1)(q-1)) dQ/dxi_i ^ dP/dx_i``
    with right derivatives in the odd variables.
    """
    if U.n != V.n:
        raise DimensionMismatch(f"ambient dimensions {U.n} and {V.n} differ")
    p, q = U.degree, V.degree
    deg = p + q - 1
    if deg < 0:
        return Multivector.zero(U.n, 0)
    out: dict = {}
    _half_bracket(U, V, out, 1)
    _half_bracket(V, U, out, 1 if (p - 1) * (q - 1) % 2 else -1)
    return Multivector._raw(U.n, deg, out)


def poisson_bracket(pi: Multivector, f: Multivector, g: Multivector) -> Multivector:
    """``{f, g} = pi(df, dg)`` for a bivector pi and functions f, g."""
    return -schouten(schouten(pi, f), g)


def weight_decompose(V: Multivector) -> dict:
    parts: dict = {}
    for (J, a), c in V._terms.items():
        parts.setdefault(weight_of_term(J, a), {})[(J, a)] = c
    return {w: Multivector._raw(V.n, V.degree, t) for w, t in sorted(parts.items())}


def contract_coordinate(i: int, c, V: Multivector) -> Multivector:
    """Interior product with ``c dx_i``; the k-th factor contributes ``(-1)^(k+1)``."""
    if not 1 <= i <= V.n:
        raise ValueError(f"index {i} out of range 1..{V.n}")
    if V.degree == 0:
        return Multivector.zero(V.n, 0)
    c = as_rational(c)
    out = {}
    for (J, a), d in V._terms.items():
        if i in J:
            k = J.index(i)
            out[(J[:k] + J[k + 1:], a)] = (-c if k % 2 else c) * d
    return Multivector._raw(V.n, V.degree - 1, out)


def divide_by_coordinate(i: int, V: Multivector) -> Multivector:
    if not 1 <= i <= V.n:
        raise ValueError(f"index {i} out of range 1..{V.n}")
    out = {}
    for (J, a), d in V._terms.items():
        if a[i - 1] < 1:
            raise NonDivisible(i, render_term(J, a, d))
        b = list(a)
        b[i - 1] -= 1
        out[(J, tuple(b))] = d
    return Multivector._raw(V.n, V.degree, out)


def multiply_by_coordinate(i: int, V: Multivector) -> Multivector:
    out = {}
    for (J, a), d in V._terms.items():
        b = list(a)
        b[i - 1] += 1
        out[(J, tuple(b))] = d
    return Multivector._raw(V.n, V.degree, out)


def weight_power(t: Sequence[Fraction], w: Sequence[int]) -> Fraction:
    r = Fraction(1)
    for ti, wi in zip(t, w):
        if wi:
            r *= ti ** wi
    return r


def rescale(t: Sequence, V: Multivector) -> Multivector:
    """Scale each weight-w component by ``prod t_i^w_i``."""
    t = [as_rational(x) for x in t]
    if len(t) != V.n:
        raise DimensionMismatch("scaling vector length must equal n")
    if any(x == 0 for x in t):
        raise ValueError("scaling factors must be nonzero")
    return Multivector._raw(V.n, V.degree, {
        (J, a): d * weight_power(t, weight_of_term(J, a)) for (J, a), d in V._terms.items()})


# text form: "c * x1^a1*x3 * d/dx1^d/dx2", terms joined by " + "

def render_monomial(a: Sequence[int]) -> str:
    parts = [f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(a) if e]
    return "*".join(parts) if parts else "1"


def render_term(J: Sequence[int], a: Sequence[int], c) -> str:
    s = f"{c} * {render_monomial(a)}"
    if J:
        s += " * " + "^".join(f"d/dx{j}" for j in J)
    return s


def render(V: Multivector) -> str:
    if not V:
        return "0"
    return " + ".join(render_term(J, a, c) for (J, a), c in V.items())


_VAR = re.compile(r"x(\d+)(?:\^(\d+))?$")
_DER = re.compile(r"d/dx(\d+)$")


def parse(n: int, text: str, degree: int | None = None) -> Multivector:
    """Inverse of ``render``.  ``degree`` is needed only for the zero multivector."""
    text = text.strip()
    if text == "0":
        return Multivector.zero(n, degree or 0)
    terms = {}
    deg = None
    for chunk in text.split(" + "):
        fields = [f.strip() for f in chunk.split(" * ")]
        if len(fields) not in (2, 3):
            raise ValidationError(f"cannot parse term {chunk!r}")
        c = Fraction(fields[0])
        a = [0] * n
        if fields[1] != "1":
            for factor in fields[1].split("*"):
                m = _VAR.match(factor)
                if not m or not 1 <= int(m.group(1)) <= n:
                    raise ValidationError(f"bad monomial factor {factor!r}")
                a[int(m.group(1)) - 1] += int(m.group(2) or 1)
        J: tuple = ()
        if len(fields) == 3:
            idx = []
            for factor in fields[2].split("^"):
                m = _DER.match(factor)
                if not m:
                    raise ValidationError(f"bad derivative factor {factor!r}")
                idx.append(int(m.group(1)))
            J = tuple(idx)
            if list(J) != sorted(set(J)):
                raise ValidationError(f"index set {J} must be strictly increasing")
        if deg is None:
            deg = len(J)
        elif deg != len(J):
            raise ValidationError("mixed degrees in one multivector")
        key = (J, tuple(a))
        terms[key] = terms.get(key, 0) + c
    return Multivector(n, deg, terms)


def to_records(V: Multivector) -> list:
    """JSON-ready term list in canonical order."""
    return [{"coeff": str(c), "exponents": list(a), "indices": list(J)} for (J, a), c in V.items()]


def from_records(n: int, degree: int, records: Iterable[Mapping]) -> Multivector:
    return Multivector(n, degree, {(tuple(r["indices"]), tuple(r["exponents"])): Fraction(r["coeff"])
                                   for r in records})
