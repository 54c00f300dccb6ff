"""Torus action data: a symmetric form on t* plus one character per coordinate.

Everything here is derived from the reflection sequence
``gamma_j = s_{beta_1} ... s_{beta_{j-1}} beta_j``.  Coordinate indices
(j, j+, the sets J and J_int) are 1-based; vectors are 0-based tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import IsotropicVector, NotDistinguished, TPoissonError, ValidationError
from .linalg import RatMatrix, dot, rank, solve_affine
from .logcan import LogCanonicalStructure, SmoothableWeight


@dataclass(frozen=True)
class ActionDatum:
    form: RatMatrix  # r x r symmetric
    betas: RatMatrix  # r x n, column j is beta_j

    def __post_init__(self):
        if self.form.rows != self.form.cols:
            raise ValidationError("bilinear form must be square")
        for i in range(self.form.rows):
            for j in range(i + 1, self.form.cols):
                if self.form[i, j] != self.form[j, i]:
                    raise ValidationError(f"bilinear form is not symmetric at entry ({i + 1},{j + 1})")
        if self.betas.rows != self.form.rows:
            raise ValidationError("characters must have one entry per row of the form")
        for j, b in enumerate(self.betas.columns()):
            if any(x.denominator != 1 for x in b):
                raise ValidationError(f"character beta_{j + 1} is not integral")
            if pairing(self.form, b, b) == 0:
                raise IsotropicVector(f"beta_{j + 1} is isotropic")

    @classmethod
    def from_lists(cls, form: Sequence[Sequence], betas: Sequence[Sequence]) -> "ActionDatum":
        """``betas`` is given as a list of characters (the columns)."""
        r = len(form)
        return cls(RatMatrix.from_rows(form, r), RatMatrix.from_columns(betas, r))

    @property
    def n(self) -> int:
        return self.betas.cols

    @property
    def r(self) -> int:
        return self.form.rows

    def beta(self, j: int) -> tuple:
        return self.betas.col(j - 1)

    def gram(self) -> RatMatrix:
        cols = self.betas.columns()
        return RatMatrix.from_rows([[pairing(self.form, x, y) for y in cols] for x in cols], self.n)

    def structure(self) -> LogCanonicalStructure:
        """Log-canonical structure with ``lam_jk = -<beta_j, beta_k>`` for j < k."""
        g = self.gram()
        n = self.n
        lam = [[(-g[j, k] if j < k else g[j, k]) if j != k else 0 for k in range(n)] for j in range(n)]
        return LogCanonicalStructure(RatMatrix.from_rows(lam, n), self.betas)


def pairing(B: RatMatrix, x: Sequence, y: Sequence) -> Fraction:
    return dot(x, B @ y)


def cartan_number(B: RatMatrix, beta: Sequence, xi: Sequence) -> Fraction:
    bb = pairing(B, beta, beta)
    if bb == 0:
        raise IsotropicVector(f"{tuple(beta)} is isotropic")
    return 2 * pairing(B, beta, xi) / bb


def reflect(B: RatMatrix, beta: Sequence, xi: Sequence) -> tuple:
    a = cartan_number(B, beta, xi)
    return tuple(Fraction(x) - a * b for x, b in zip(xi, beta))


@dataclass(frozen=True)
class DatumAnalysis:
    datum: ActionDatum
    gammas: tuple
    Q: RatMatrix
    Qinv: RatMatrix
    E: RatMatrix
    Einv: RatMatrix
    D: RatMatrix
    nu: RatMatrix
    jplus: dict  # j -> j+ or None for infinity
    jminus: dict  # j -> j- or None
    level_sets: tuple
    J: tuple
    J_int: tuple
    thetas: tuple  # column l-1 of QE is theta^(l)

    @property
    def n(self) -> int:
        return self.datum.n

    def theta(self, j: int) -> tuple:
        return self.thetas[j - 1]

    def support(self) -> list:
        """Distinct gamma values in order of first appearance."""
        return [self.gammas[s[0] - 1] for s in self.level_sets]


@dataclass(frozen=True)
class Predicates:
    distinguished: bool
    integral: bool
    strongly_integral: bool


def analyze(datum: ActionDatum) -> DatumAnalysis:
    B, n = datum.form, datum.n
    betas = datum.betas.columns()
    gammas = []
    for j in range(n):
        g = betas[j]
        for i in range(j - 1, -1, -1):
            g = reflect(B, betas[i], g)
        gammas.append(tuple(g))
    Q = RatMatrix.from_rows([[cartan_number(B, gammas[j], gammas[k]) if j < k else int(j == k)
                              for k in range(n)] for j in range(n)], n)
    Qinv = RatMatrix.from_rows([[cartan_number(B, betas[j], betas[k]) if j < k else int(j == k)
                                 for k in range(n)] for j in range(n)], n)
    if Q @ Qinv != RatMatrix.identity(n):
        raise TPoissonError("reflection matrices are not mutually inverse")
    if (datum.betas @ Q).columns() != gammas:
        raise TPoissonError("gamma sequence does not equal beta times Q")

    level: dict = {}
    for j, g in enumerate(gammas, start=1):
        level.setdefault(g, []).append(j)
    level_sets = tuple(tuple(v) for v in level.values())
    jplus, jminus = {}, {}
    for members in level_sets:
        for a, b in zip(members, members[1:] + (None,)):
            jplus[a] = b
        for a, b in zip(members, (None,) + members[:-1]):
            jminus[a] = b
    E = RatMatrix.from_columns([[int(i == j) - int(i + 1 == jplus[j + 1]) for i in range(n)]
                                for j in range(n)], n)
    Einv = RatMatrix.from_columns(
        [[int(i + 1 in level[gammas[j]] and i >= j) for i in range(n)] for j in range(n)], n)
    if E @ Einv != RatMatrix.identity(n):
        raise TPoissonError("level-set matrix inverse check failed")
    D = RatMatrix.diag([pairing(B, b, b) for b in betas])
    nu = D @ Qinv
    gram = datum.gram()
    lam = datum.structure().lam
    if nu != gram - lam:
        raise TPoissonError("nu differs from Gram matrix minus coefficient matrix")
    thetas = tuple((Q @ E).columns())
    J = tuple(j for j in range(1, n + 1) if jplus[j] is not None)
    J_int = tuple(j for j in J if all(_nonpositive_integer(cartan_number(B, gammas[k - 1], gammas[j - 1]))
                                      for k in range(j + 1, jplus[j])))
    return DatumAnalysis(datum, tuple(gammas), Q, Qinv, E, Einv, D, nu, jplus, jminus,
                         level_sets, J, J_int, thetas)


def _nonpositive_integer(x: Fraction) -> bool:
    return x.denominator == 1 and x <= 0


def predicates(analysis: DatumAnalysis) -> Predicates:
    B = analysis.datum.form
    supp = analysis.support()
    distinguished = rank(RatMatrix.from_columns(supp)) == len(supp)
    integral = all(_nonpositive_integer(cartan_number(B, analysis.gammas[k - 1], analysis.gammas[j - 1]))
                   for j in analysis.J for k in range(j + 1, analysis.jplus[j]))
    strongly = all(_nonpositive_integer(cartan_number(B, g, h))
                   for g in supp for h in supp if g != h)
    return Predicates(distinguished, integral, strongly)


def smoothable_weights_via_gamma(analysis: DatumAnalysis) -> list:
    out = []
    for j in analysis.J_int:
        theta = tuple(int(x) for x in analysis.theta(j))
        out.append(SmoothableWeight((j, analysis.jplus[j]), theta, -analysis.D[j - 1, j - 1]))
    return out


def solve_weight_equation(analysis: DatumAnalysis, a: Sequence, xi: Sequence) -> tuple | None:
    """The unique w with ``lam w = a`` and ``beta w = xi``, or None."""
    B = analysis.datum.form
    n = analysis.n
    xi = tuple(Fraction(x) for x in xi)
    y = [(pairing(B, xi, analysis.datum.beta(j + 1)) - Fraction(a[j])) / analysis.D[j, j]
         for j in range(n)]
    combo = tuple(sum((g[i] * y[j] for j, g in enumerate(analysis.gammas)), Fraction(0))
                  for i in range(len(xi)))
    if combo != xi:
        return None
    return analysis.Q @ y


def _require_distinguished(analysis: DatumAnalysis) -> None:
    if not predicates(analysis).distinguished:
        raise NotDistinguished("the gamma support is linearly dependent")


def ker_beta_basis(analysis: DatumAnalysis) -> list:
    _require_distinguished(analysis)
    return [analysis.theta(j) for j in analysis.J]


def ker_beta_coordinates(analysis: DatumAnalysis, w: Sequence) -> tuple:
    """Coordinates of w in the kernel basis, one per element of J."""
    full = (analysis.Einv @ analysis.Qinv) @ list(w)
    return tuple(full[j - 1] for j in analysis.J)


def eta_decompose(analysis: DatumAnalysis, f: Sequence) -> dict | None:
    """Coefficients q_l with ``f = sum q_l theta^(l)`` when f lies in ker beta, else None.

    f must equal -1 at its first and last nonzero positions j < k.
    """
    _require_distinguished(analysis)
    f = tuple(Fraction(x) for x in f)
    nz = [i + 1 for i, x in enumerate(f) if x != 0]
    if len(f) != analysis.n or len(nz) < 2 or f[nz[0] - 1] != -1 or f[nz[-1] - 1] != -1:
        raise ValidationError("f must equal -1 at two positions j < k and vanish outside [j, k]")
    j, k = nz[0], nz[-1]
    B = analysis.datum.form
    g = analysis.gammas
    etas = {j: g[j - 1]}
    for l in range(j + 1, k):
        prev = reflect(B, g[l - 1], etas[l - 1])
        etas[l] = tuple(x - f[l - 1] * y for x, y in zip(prev, g[l - 1]))
    if etas[k - 1] != g[k - 1]:
        return None
    supp = analysis.support()
    basis = RatMatrix.from_columns(supp)
    out = {}
    for l, eta in etas.items():
        coords = solve_affine(basis, eta)
        q = coords[supp.index(g[l - 1])]
        if q:
            out[l] = q
    return out
