"""Infinitesimal affine transformations of a flat affine connection.

For a flat affine connection a vector field X is infinitesimally affine iff

    nabla_{nabla_Y Z} X = nabla_Y nabla_Z X

for all fields Y, Z; on coordinate fields this is a linear system in the
components of X.  Solving it over a finite exponential-polynomial ansatz
reduces to an exact nullspace computation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import sympy

from .connection import Connection, covariant_derivative, is_flat_affine
from .errors import DimensionMismatch, NotFlatAffine
from .exppoly import ExpPoly, VectorField, field_to_json
from .scalars import ScalarMatrix, nullspace

__all__ = ["Ansatz", "InfAffBasis", "infaff_residual", "solve_infaff",
           "classical_aff_basis", "default_ansatz", "parse_weights"]


def _weight(w, n):
    w = tuple(Fraction(v) for v in w)
    if len(w) != n:
        raise DimensionMismatch(f"weight {w} has the wrong length for n={n}")
    return w


@dataclass(frozen=True)
class Ansatz:
    """Fields whose components are x^a exp(<w,x>) with |a| <= max_degree, w in weights."""

    max_degree: int
    weights: tuple = ()
    n: int = 2

    def __post_init__(self):
        if self.max_degree < 0:
            raise ValueError("max_degree must be non-negative")
        ws = {_weight(w, self.n) for w in self.weights}
        ws.add((Fraction(0),) * self.n)
        object.__setattr__(self, "weights", tuple(sorted(ws)))

    def monomials(self):
        n = self.n
        out = []
        for deg in range(self.max_degree + 1):
            for powers in product(range(deg + 1), repeat=n):
                if sum(powers) == deg:
                    out.append(powers)
        return sorted(out, key=lambda p: (sum(p), tuple(-a for a in p)))

    def candidates(self):
        """The spanning fields of the ansatz space, in a fixed order."""
        n = self.n
        zero = ExpPoly.zero(n)
        out = []
        for w in self.weights:
            for powers in self.monomials():
                f = ExpPoly.monomial(n, powers, w, 1)
                for k in range(n):
                    out.append(tuple(f if a == k else zero for a in range(n)))
        return out

    @property
    def size(self):
        return len(self.weights) * len(self.monomials()) * self.n

    def to_json(self):
        return {"max_degree": self.max_degree,
                "weights": [[str(v) for v in w] for w in self.weights]}


def parse_weights(text, n=2):
    """Parse ``"a,b;c,d"`` into a list of weight vectors."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            out.append(tuple(Fraction(v.strip()) for v in chunk.split(",")))
        except ValueError:
            raise ValueError(f"malformed weight {chunk!r}") from None
        if len(out[-1]) != n:
            raise DimensionMismatch(f"weight {chunk!r} has the wrong length for n={n}")
    return out


def _constant_matrix(c, i):
    n = c.dim
    rows = []
    for k in range(n):
        row = []
        for j in range(n):
            g = c.gamma[k][i][j]
            if not g.is_constant or not g.constant_value().is_rational:
                return None
            q = g.constant_value().to_fraction()
            row.append(sympy.Rational(q.numerator, q.denominator))
        rows.append(row)
    return sympy.Matrix(rows)


def _eigen_weights(c):
    """Weights -lambda*e_i for nonzero rational eigenvalues lambda of Gamma_i = (gamma^k_ij)_kj.

    Exponential affine coordinates solve d_i(du) = Gamma_i du, so these exponents show up
    in the affine fields even when gamma itself is constant.  Non-constant or
    parameter-dependent Gamma_i are skipped.
    """
    n = c.dim
    out = set()
    for i in range(n):
        G = _constant_matrix(c, i)
        if G is None:
            continue
        for lam in G.eigenvals():
            if lam.is_rational and lam != 0:
                q = Fraction(int(lam.p), int(lam.q))
                out.add(tuple(-q if a == i else Fraction(0) for a in range(n)))
    return out


def default_ansatz(c, max_degree=2):
    """Degree-2 ansatz with weights {0}, the negatives of the weights in gamma, and the
    eigen-weights of the constant Christoffel matrices."""
    ws = {tuple(-v for v in w) for w in c.weights()} | _eigen_weights(c)
    return Ansatz(max_degree, tuple(ws), c.dim)


@dataclass(frozen=True)
class InfAffBasis:
    connection: Connection
    fields: tuple
    ansatz: Ansatz = None

    @property
    def dim(self):
        return len(self.fields)

    def __len__(self):
        return len(self.fields)

    def __iter__(self):
        return iter(self.fields)

    def __getitem__(self, i):
        return self.fields[i]

    def to_json(self):
        return {"dim": self.dim, "basis": [field_to_json(X) for X in self.fields],
                "ansatz": None if self.ansatz is None else self.ansatz.to_json()}


def _check_flat(c):
    if not is_flat_affine(c):
        raise NotFlatAffine("the residual form of the infinitesimal affine equation needs a flat affine connection")


def _residual_unchecked(c, X):
    n = c.dim
    coords = [VectorField.coordinate(n, i, c.domain) for i in range(n)]
    nabla_X = [covariant_derivative(c, coords[j], X) for j in range(n)]
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            lhs = VectorField.zero(n, c.domain)
            for k in range(n):
                g = c.gamma[k][i][j]
                if g:
                    lhs = lhs + nabla_X[k].scale(g)
            row.append(lhs - covariant_derivative(c, coords[i], nabla_X[j]))
        out.append(tuple(row))
    return tuple(out)


def infaff_residual(c, X):
    """R(i,j) = nabla_{nabla_{d_i} d_j} X - nabla_{d_i} nabla_{d_j} X as an n x n grid of fields."""
    if X.n != c.dim:
        raise DimensionMismatch("field and connection dimensions differ")
    _check_flat(c)
    return _residual_unchecked(c, X)


def residual_is_zero(R):
    return all(f.is_zero for row in R for f in row)


def solve_infaff(c, ansatz=None):
    _check_flat(c)
    ansatz = ansatz or default_ansatz(c)
    if ansatz.n != c.dim:
        raise DimensionMismatch("ansatz and connection dimensions differ")
    n = c.dim
    cands = [VectorField(comps, c.domain) for comps in ansatz.candidates()]
    # one equation per (i, j, component, term key)
    columns = []
    keys = {}
    for X in cands:
        col = {}
        R = _residual_unchecked(c, X)
        for i, j, k in product(range(n), repeat=3):
            for key, coef in R[i][j][k].items():
                eq = (i, j, k, key)
                if eq not in keys:
                    keys[eq] = len(keys)
                col[keys[eq]] = coef
        columns.append(col)
    if keys:
        rows = [[col.get(r, 0) for col in columns] for r in range(len(keys))]
        vecs = nullspace(ScalarMatrix(rows, len(cands)))
    else:
        vecs = [tuple(1 if a == b else 0 for a in range(len(cands))) for b in range(len(cands))]
    fields = []
    for v in vecs:
        X = VectorField.zero(n, c.domain)
        for coef, cand in zip(v, cands):
            if coef:
                X = X + cand.scale(coef)
        fields.append(X)
    for X in fields:
        if not residual_is_zero(_residual_unchecked(c, X)):
            raise AssertionError("solver produced a field with nonzero residual")
    return InfAffBasis(c, tuple(fields), ansatz)


def classical_aff_basis(n, domain=None):
    """The n^2 + n affine fields x_j d_i and d_i of the standard connection."""
    if n < 1:
        raise ValueError("n must be positive")
    c = Connection.standard(n, domain)
    fields = []
    for i in range(n):
        for j in range(n):
            comps = [ExpPoly.zero(n)] * n
            comps[i] = ExpPoly.coordinate(n, j)
            fields.append(VectorField(tuple(comps), c.domain))
    for i in range(n):
        fields.append(VectorField.coordinate(n, i, c.domain))
    return InfAffBasis(c, tuple(fields), Ansatz(1, (), n))
