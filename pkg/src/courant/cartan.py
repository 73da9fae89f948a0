"""Tensor calculus on a coordinate chart.

Vector fields and covectors are tuples of :class:`RatFunc` indexed by the chart
variables.  Endomorphisms of TM use the column convention ``r[i, j] = r(d_j)^i``
so that ``r(X) = r @ X`` and the transpose acts on covector components:
``r^*(alpha) = r.T @ alpha``.

Conventions:

* bivectors: ``(pi#(alpha))(beta) = pi(alpha, beta)``, so ``pi#(alpha)^j = sum_i alpha_i pi^{ij}``;
* ``g_flat(X) = g(X, .)`` and ``B_flat(X) = i_X B``;
* curvature ``R(X, Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X, Y]``.
"""

from __future__ import annotations

from itertools import combinations, permutations
from typing import Iterable, Mapping, Optional, Sequence

from .field import Chart, DivisionByZeroError, RatFunc, partial
from .linalg import Matrix, Vector, dot, vadd, vsub

VectorField = Vector
Covector = Vector


# -- vector fields -----------------------------------------------------------


def vector_field(chart: Chart, components: Sequence) -> VectorField:
    if len(components) != chart.dim:
        raise ValueError(f"expected {chart.dim} components, got {len(components)}")
    return tuple(c if isinstance(c, RatFunc) else chart.parse(str(c)) for c in components)


def coordinate_field(chart: Chart, i: int) -> VectorField:
    return tuple(chart.one if j == i else chart.zero for j in range(chart.dim))


def _check_chart(*objs: Sequence[RatFunc]) -> Chart:
    chart = objs[0][0].chart
    for o in objs[1:]:
        if o[0].chart != chart:
            raise ValueError("chart mismatch")
        if len(o) != len(objs[0]):
            raise ValueError("dimension mismatch")
    return chart


def apply_vector(X: VectorField, f: RatFunc) -> RatFunc:
    """The derivative X(f) = sum_i X^i d_i f."""
    out = f.chart.zero
    if f.is_constant():
        return out
    for i, xi in enumerate(X):
        if xi.num:
            out = out + xi * partial(f, i)
    return out


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    _check_chart(X, Y)
    return tuple(apply_vector(X, Y[i]) - apply_vector(Y, X[i]) for i in range(len(X)))


def format_vector(X: VectorField) -> str:
    chart = X[0].chart
    return _format_terms([(c, f"d/d{chart.var_names[i]}") for i, c in enumerate(X)])


def format_covector(a: Covector) -> str:
    chart = a[0].chart
    return _format_terms([(c, f"d{chart.var_names[i]}") for i, c in enumerate(a)])


def _format_terms(terms: Iterable[tuple[RatFunc, str]]) -> str:
    out = []
    for c, label in terms:
        if c.is_zero():
            continue
        s = str(c)
        if s == "1":
            body = label
        elif s == "-1":
            body = "-" + label
        elif len(c.num) > 1 or not c.is_polynomial():
            body = f"({s})*{label}"
        else:
            body = f"{s}*{label}"
        out.append(body)
    if not out:
        return "0"
    text = out[0]
    for body in out[1:]:
        text += " - " + body[1:] if body.startswith("-") else " + " + body
    return text


# -- alternating tensors -----------------------------------------------------


def _sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    idx = list(idx)
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    if len(set(idx)) != len(idx):
        return 0, tuple(idx)
    return sign, tuple(idx)


class Alternating:
    """Alternating coefficients on strictly increasing index tuples.

    ``size`` is the number of available indices (chart dimension for forms
    and multivectors, bundle rank for multisections).
    """

    __slots__ = ("chart", "size", "degree", "coeffs")
    basis_symbol = "e"

    def __init__(self, chart: Chart, size: int, degree: int, coeffs: Optional[Mapping[Sequence[int], RatFunc]] = None):
        if degree < 0:
            raise ValueError("negative degree")
        self.chart = chart
        self.size = size
        self.degree = degree
        store: dict[tuple[int, ...], RatFunc] = {}
        for idx, c in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(not 0 <= i < size for i in idx):
                raise ValueError(f"bad index {idx} for degree {degree}")
            if not isinstance(c, RatFunc):
                c = chart.const(c) if isinstance(c, int) else chart.parse(str(c))
            sign, key = _sort_sign(idx)
            if sign == 0:
                if not c.is_zero():
                    raise ValueError(f"repeated index {idx} with nonzero coefficient")
                continue
            val = store.get(key, chart.zero) + (c if sign > 0 else -c)
            if val.is_zero():
                store.pop(key, None)
            else:
                store[key] = val
        self.coeffs = store

    def _new(self, coeffs) -> "Alternating":
        return type(self)(self.chart, self.size, self.degree, coeffs)

    def __getitem__(self, idx: Sequence[int]) -> RatFunc:
        sign, key = _sort_sign(idx)
        if sign == 0:
            return self.chart.zero
        c = self.coeffs.get(key)
        if c is None:
            return self.chart.zero
        return c if sign > 0 else -c

    def items(self):
        return sorted(self.coeffs.items())

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "Alternating") -> None:
        if type(other) is not type(self) or other.degree != self.degree or other.size != self.size:
            raise ValueError("incompatible alternating tensors")

    def __add__(self, other: "Alternating") -> "Alternating":
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, self.chart.zero) + v
        return self._new(out)

    def __sub__(self, other: "Alternating") -> "Alternating":
        return self + (-other)

    def __neg__(self) -> "Alternating":
        return self._new({k: -v for k, v in self.coeffs.items()})

    def scale(self, f) -> "Alternating":
        return self._new({k: v * f for k, v in self.coeffs.items()})

    def map(self, fn) -> "Alternating":
        return self._new({k: fn(v) for k, v in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        return (
            type(other) is type(self)
            and self.degree == other.degree
            and self.size == other.size
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.degree, self.size, tuple(sorted(self.coeffs.items()))))

    def evaluate(self, vectors: Sequence[Sequence[RatFunc]]) -> RatFunc:
        """Multilinear alternating evaluation on ``degree`` component vectors."""
        if len(vectors) != self.degree:
            raise ValueError(f"expected {self.degree} arguments")
        total = self.chart.zero
        if self.degree == 0:
            return self.coeffs.get((), total)
        perms = [(p, _sort_sign(p)[0]) for p in permutations(range(self.degree))]
        for key, c in self.coeffs.items():
            det = self.chart.zero
            for p, s in perms:
                term = c.chart.one
                for slot, pos in enumerate(p):
                    v = vectors[slot][key[pos]]
                    if v.is_zero():
                        term = None
                        break
                    term = term * v
                if term is not None:
                    det = det + term if s > 0 else det - term
            if det.num:
                total = total + c * det
        return total

    def full_components(self) -> dict[tuple[int, ...], RatFunc]:
        """All (not only increasing) index tuples with nonzero value."""
        out = {}
        for key, c in self.coeffs.items():
            for p in permutations(key):
                s, _ = _sort_sign(p)
                out[p] = c if s > 0 else -c
        return out

    def _labels(self) -> list[str]:
        return [f"{self.basis_symbol}{i + 1}" for i in range(self.size)]

    def __str__(self) -> str:
        if self.degree == 0:
            return str(self.coeffs.get((), self.chart.zero))
        labels = self._labels()
        return _format_terms([(c, self._join([labels[i] for i in key])) for key, c in self.items()])

    @staticmethod
    def _join(labels: Sequence[str]) -> str:
        return "/\\".join(labels)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(degree={self.degree}, {self})"


class KForm(Alternating):
    """A differential form on the chart."""

    __slots__ = ()

    def __init__(self, chart: Chart, degree: int, coeffs: Optional[Mapping[Sequence[int], RatFunc]] = None):
        super().__init__(chart, chart.dim, degree, coeffs)

    def _new(self, coeffs) -> "KForm":
        return KForm(self.chart, self.degree, coeffs)

    def _labels(self) -> list[str]:
        return [f"d{n}" for n in self.chart.var_names]

    @classmethod
    def function(cls, f: RatFunc) -> "KForm":
        return cls(f.chart, 0, {(): f})

    @classmethod
    def one_form(cls, components: Sequence[RatFunc]) -> "KForm":
        chart = components[0].chart
        return cls(chart, 1, {(i,): c for i, c in enumerate(components)})

    def as_function(self) -> RatFunc:
        if self.degree != 0:
            raise ValueError("not a function")
        return self[()]

    def as_covector(self) -> Covector:
        if self.degree != 1:
            raise ValueError("not a 1-form")
        return tuple(self[(i,)] for i in range(self.chart.dim))

    def as_matrix(self) -> Matrix:
        """Full antisymmetric matrix ``B[i, j] = B(d_i, d_j)`` of a 2-form."""
        if self.degree != 2:
            raise ValueError("not a 2-form")
        n = self.chart.dim
        return Matrix(self.chart, [[self[(i, j)] for j in range(n)] for i in range(n)])


class Multivector(Alternating):
    """An alternating contravariant tensor (bivector, trivector, ...)."""

    __slots__ = ()

    def __init__(self, chart: Chart, degree: int, coeffs: Optional[Mapping[Sequence[int], RatFunc]] = None):
        super().__init__(chart, chart.dim, degree, coeffs)

    def _new(self, coeffs) -> "Multivector":
        return Multivector(self.chart, self.degree, coeffs)

    def _labels(self) -> list[str]:
        return [f"d/d{n}" for n in self.chart.var_names]


# -- forms -------------------------------------------------------------------


def exterior_d(w: KForm) -> KForm:
    chart = w.chart
    n = chart.dim
    out: dict[tuple[int, ...], RatFunc] = {}
    for key, c in w.coeffs.items():
        for i in range(n):
            if i in key:
                continue
            d = partial(c, i)
            if d.is_zero():
                continue
            idx = (i,) + key
            sign, skey = _sort_sign(idx)
            out[skey] = out.get(skey, chart.zero) + (d if sign > 0 else -d)
    return KForm(chart, w.degree + 1, out)


def interior_product(X: VectorField, w: KForm) -> KForm:
    if w.degree == 0:
        raise ValueError("interior product of a 0-form is undefined")
    _check_chart(X, w.chart.coords())
    out: dict[tuple[int, ...], RatFunc] = {}
    for key, c in w.coeffs.items():
        # i_X (c dx^{k0} ^ ... ) = sum_p (-1)^p X^{kp} c dx^{...without kp...}
        for p, k in enumerate(key):
            if X[k].is_zero():
                continue
            rest = key[:p] + key[p + 1:]
            term = X[k] * c
            out[rest] = out.get(rest, w.chart.zero) + (term if p % 2 == 0 else -term)
    return KForm(w.chart, w.degree - 1, out)


def lie_derivative(X: VectorField, w: KForm) -> KForm:
    """Lie derivative via Cartan's formula ``L_X = i_X d + d i_X``."""
    if w.degree == 0:
        return KForm.function(apply_vector(X, w.as_function()))
    return interior_product(X, exterior_d(w)) + exterior_d(interior_product(X, w))


def wedge(a: KForm, b: KForm) -> KForm:
    chart = a.chart
    deg = a.degree + b.degree
    out: dict[tuple[int, ...], RatFunc] = {}
    for ka, ca in a.coeffs.items():
        for kb, cb in b.coeffs.items():
            sign, key = _sort_sign(ka + kb)
            if sign == 0:
                continue
            t = ca * cb
            out[key] = out.get(key, chart.zero) + (t if sign > 0 else -t)
    return KForm(chart, deg, out)


def covector_apply(a: Covector, X: VectorField) -> RatFunc:
    return dot(a, X)


def differential(f: RatFunc) -> Covector:
    return tuple(partial(f, i) for i in range(f.chart.dim))


def lie_derivative_covector(X: VectorField, a: Covector) -> Covector:
    """(L_X a)_k = X(a_k) + sum_i a_i d_k X^i."""
    n = len(X)
    out = []
    for k in range(n):
        t = apply_vector(X, a[k])
        for i in range(n):
            if a[i].num:
                t = t + a[i] * partial(X[i], k)
        out.append(t)
    return tuple(out)


def d_covector(a: Covector) -> Matrix:
    """Full antisymmetric matrix of d(a): (da)[i, j] = d_i a_j - d_j a_i."""
    chart = a[0].chart
    n = len(a)
    return Matrix(chart, [[partial(a[j], i) - partial(a[i], j) for j in range(n)] for i in range(n)])


def interior_d_covector(X: VectorField, a: Covector) -> Covector:
    """i_X d(a) as covector components."""
    chart = a[0].chart
    n = len(a)
    out = []
    for j in range(n):
        t = chart.zero
        for i in range(n):
            if X[i].num:
                t = t + X[i] * (partial(a[j], i) - partial(a[i], j))
        out.append(t)
    return tuple(out)


# -- endomorphisms, metrics, bivectors --------------------------------------


class EndoTM(Matrix):
    """A (1,1)-tensor; column j holds r(d_j)."""

    __slots__ = ()

    def __init__(self, chart: Chart, rows):
        super().__init__(chart, rows)
        m, n = self.shape
        if m != n or n != chart.dim:
            raise ValueError(f"endomorphism must be {chart.dim}x{chart.dim}")

    @classmethod
    def of(cls, m: Matrix) -> "EndoTM":
        return cls(m.chart, m.rows)

    @classmethod
    def identity(cls, chart: Chart, n: Optional[int] = None) -> "EndoTM":
        return cls.of(Matrix.identity(chart, chart.dim))

    @classmethod
    def zeros(cls, chart: Chart, m: Optional[int] = None, n: Optional[int] = None) -> "EndoTM":
        return cls.of(Matrix.zeros(chart, chart.dim))

    def __call__(self, X: VectorField) -> VectorField:
        return self.apply(X)

    def dual(self, a: Covector) -> Covector:
        """r^*(a) = a o r."""
        return self.T.apply(a)


class SymBilinear(Matrix):
    """A symmetric bilinear form on TM."""

    __slots__ = ()

    def __init__(self, chart: Chart, rows):
        super().__init__(chart, rows)
        if self.shape != (chart.dim, chart.dim) or not self.is_symmetric():
            raise ValueError("a metric must be a symmetric dim x dim matrix")

    @classmethod
    def of(cls, m: Matrix) -> "SymBilinear":
        return cls(m.chart, m.rows)

    def flat(self, X: VectorField) -> Covector:
        return self.apply(X)


class Bivector(Matrix):
    """An antisymmetric contravariant 2-tensor, ``pi[i, j] = pi(dx^i, dx^j)``."""

    __slots__ = ()

    def __init__(self, chart: Chart, rows):
        super().__init__(chart, rows)
        if self.shape != (chart.dim, chart.dim) or not self.is_antisymmetric():
            raise ValueError("a bivector must be an antisymmetric dim x dim matrix")

    @classmethod
    def of(cls, m: Matrix) -> "Bivector":
        return cls(m.chart, m.rows)

    def sharp(self, a: Covector) -> VectorField:
        return self.T.apply(a)

    def sharp_matrix(self) -> Matrix:
        return Matrix(self.chart, self.T.rows)


def form_flat(B: KForm, X: VectorField) -> Covector:
    """B_flat(X) = i_X B for a 2-form B."""
    return B.as_matrix().T.apply(X)


def nijenhuis_torsion(T: Matrix, X: VectorField, Y: VectorField) -> VectorField:
    TX, TY = T.apply(X), T.apply(Y)
    return vsub(lie_bracket(TX, TY), T.apply(deformed_bracket(T, X, Y)))


def deformed_bracket(T: Matrix, X: VectorField, Y: VectorField) -> VectorField:
    return vsub(vadd(lie_bracket(T.apply(X), Y), lie_bracket(X, T.apply(Y))), T.apply(lie_bracket(X, Y)))


def lie_derivative_endo(V: VectorField, r: Matrix, X: VectorField) -> VectorField:
    """(L_V r)(X) = [V, r X] - r [V, X]."""
    return vsub(lie_bracket(V, r.apply(X)), r.apply(lie_bracket(V, X)))


def schouten_square(pi: Matrix) -> Multivector:
    """[pi, pi]^{ijk} = 2 sum_l (pi^{il} d_l pi^{jk} + pi^{jl} d_l pi^{ki} + pi^{kl} d_l pi^{ij}).

    With this sign [pi, pi](df, dg, dh) is twice the Jacobiator of
    {f, g} = pi(df, dg), and a lagrangian splitting satisfies
    (1/2)[pi, pi] = rho(chi) + rho_*(phi).
    """
    chart = pi.chart
    n = chart.dim
    out = {}
    for i, j, k in combinations(range(n), 3):
        t = chart.zero
        for l in range(n):
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                if pi[a, l].num:
                    d = partial(pi[b, c], l)
                    if d.num:
                        t = t + pi[a, l] * d
        out[(i, j, k)] = t * 2
    return Multivector(chart, 3, out)


def pushforward(M: Matrix, t: Alternating) -> Multivector:
    """Push an alternating tensor on a bundle forward along ``M`` (columns are images of the frame)."""
    chart = M.chart
    n = chart.dim
    deg = t.degree
    out = {}
    for I in combinations(range(n), deg):
        vectors = [M.rows[i] for i in I]
        out[I] = t.evaluate(vectors)
    return Multivector(chart, deg, out)


# -- Levi-Civita -------------------------------------------------------------


class Christoffel:
    """Christoffel symbols ``gamma[k][i][j] = Gamma^k_{ij}``."""

    __slots__ = ("chart", "gamma")

    def __init__(self, chart: Chart, gamma: Sequence[Sequence[Sequence[RatFunc]]]):
        self.chart = chart
        self.gamma = tuple(tuple(tuple(r) for r in m) for m in gamma)

    def __getitem__(self, kij: tuple[int, int, int]) -> RatFunc:
        k, i, j = kij
        return self.gamma[k][i][j]

    def is_symmetric(self) -> bool:
        n = self.chart.dim
        return all(self.gamma[k][i][j] == self.gamma[k][j][i] for k in range(n) for i in range(n) for j in range(n))

    def covariant_derivative(self, X: VectorField, Y: VectorField) -> VectorField:
        n = self.chart.dim
        out = []
        for k in range(n):
            t = apply_vector(X, Y[k])
            for i in range(n):
                if X[i].is_zero():
                    continue
                for j in range(n):
                    if Y[j].num and self.gamma[k][i][j].num:
                        t = t + self.gamma[k][i][j] * X[i] * Y[j]
            out.append(t)
        return tuple(out)

    def riemann(self) -> list:
        """R[l][k][i][j] with R(d_i, d_j) d_k = sum_l R[l][k][i][j] d_l."""
        n = self.chart.dim
        G = self.gamma
        z = self.chart.zero
        R = [[[[z] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for l in range(n):
            for k in range(n):
                for i in range(n):
                    for j in range(n):
                        t = partial(G[l][j][k], i) - partial(G[l][i][k], j)
                        for m in range(n):
                            t = t + G[m][j][k] * G[l][i][m] - G[m][i][k] * G[l][j][m]
                        R[l][k][i][j] = t
        return R

    def __eq__(self, other) -> bool:
        return isinstance(other, Christoffel) and self.gamma == other.gamma

    def __hash__(self) -> int:
        return hash(self.gamma)


def levi_civita(g: Matrix) -> Christoffel:
    chart = g.chart
    n = chart.dim
    if g.det().is_zero():
        raise DivisionByZeroError("degenerate metric: det(g) = 0")
    ginv = g.inverse()
    dg = [[[partial(g[a, b], c) for c in range(n)] for b in range(n)] for a in range(n)]
    gamma = []
    for k in range(n):
        mk = []
        for i in range(n):
            row = []
            for j in range(n):
                t = chart.zero
                for l in range(n):
                    if ginv[k, l].is_zero():
                        continue
                    s = dg[j][l][i] + dg[i][l][j] - dg[i][j][l]
                    if s.num:
                        t = t + ginv[k, l] * s
                row.append(t / 2)
            mk.append(row)
        gamma.append(mk)
    return Christoffel(chart, gamma)
