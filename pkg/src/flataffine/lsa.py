"""Bilinear products on a finite-dimensional Lie algebra, given by structure constants.

``c[i][j][k]`` is the e_k coefficient of [e_i, e_j] and ``p[i][j][k]`` the e_k
coefficient of e_i * e_j (0-based indices).  All identities are decided
exactly over Scalars on basis triples.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

import jsonschema

from .errors import NotReductive, ParseError, SchemaError
from .scalars import Scalar, ScalarMatrix, declare_param, rank, rref, solve

__all__ = [
    "ProductAlgebra", "SubspaceSpec", "InducedLMap", "ReductiveProduct",
    "check_torsion_free_product", "check_flat_product", "check_left_symmetric",
    "check_associative", "check_absorption", "induced_L_map",
    "reductive_split_check", "reductive_product", "load_algebra", "algebra_to_json",
    "descent_report",
]


def _zeros(d):
    z = Scalar(0)
    return tuple(tuple(tuple(z for _ in range(d)) for _ in range(d)) for _ in range(d))


def _freeze(t, d):
    return tuple(tuple(tuple(Scalar(t[i][j][k]) for k in range(d)) for j in range(d)) for i in range(d))


@dataclass(frozen=True)
class ProductAlgebra:
    dim: int
    bracket: tuple
    product: tuple
    labels: tuple = ()

    def __post_init__(self):
        d = self.dim
        object.__setattr__(self, "bracket", _freeze(self.bracket, d) if self.bracket is not None else _zeros(d))
        object.__setattr__(self, "product", _freeze(self.product, d) if self.product is not None else _zeros(d))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i + 1}" for i in range(d)))
        c = self.bracket
        for i, j, k in product(range(d), repeat=3):
            if c[i][j][k] != -c[j][i][k]:
                raise ValueError(f"bracket is not antisymmetric at ({i}, {j}, {k})")

    @classmethod
    def from_sparse(cls, d, bracket=(), product_=(), antisymmetrize=True, labels=()):
        """Build from (i, j, k, value) entries, 0-based; bracket partners filled in."""
        c = [[[Scalar(0)] * d for _ in range(d)] for _ in range(d)]
        p = [[[Scalar(0)] * d for _ in range(d)] for _ in range(d)]
        for i, j, k, v in product_:
            p[i][j][k] = p[i][j][k] + Scalar(v)
        given = {}
        for i, j, k, v in bracket:
            given[(i, j, k)] = given.get((i, j, k), Scalar(0)) + Scalar(v)
        for (i, j, k), v in given.items():
            if antisymmetrize and (j, i, k) in given and given[(j, i, k)] != -v:
                raise ValueError(f"bracket entries ({i},{j},{k}) and ({j},{i},{k}) are inconsistent")
            c[i][j][k] = v
            if antisymmetrize:
                c[j][i][k] = -v
        return cls(d, c, p, tuple(labels))

    @classmethod
    def with_commutator(cls, d, product_constants, labels=()):
        p = _freeze(product_constants, d)
        c = [[[p[i][j][k] - p[j][i][k] for k in range(d)] for j in range(d)] for i in range(d)]
        return cls(d, c, p, tuple(labels))

    def mul(self, u, v):
        return _bilinear(self.product, u, v, self.dim)

    def br(self, u, v):
        return _bilinear(self.bracket, u, v, self.dim)

    def basis(self, i):
        return tuple(Scalar(1 if a == i else 0) for a in range(self.dim))

    def change_basis(self, P):
        """Constants in the basis f_j = sum_i P[i][j] e_i."""
        P = P if isinstance(P, ScalarMatrix) else ScalarMatrix(P)
        Pinv = P.inverse()
        d = self.dim
        cols = [P.column(j) for j in range(d)]

        def transform(t):
            out = [[[None] * d for _ in range(d)] for _ in range(d)]
            for i, j in product(range(d), repeat=2):
                w = Pinv @ _bilinear(t, cols[i], cols[j], d)
                for k in range(d):
                    out[i][j][k] = w[k]
            return out

        return ProductAlgebra(d, transform(self.bracket), transform(self.product), self.labels)


def _bilinear(t, u, v, d):
    out = [Scalar(0)] * d
    for i in range(d):
        if not u[i]:
            continue
        for j in range(d):
            if not v[j]:
                continue
            f = u[i] * v[j]
            row = t[i][j]
            for k in range(d):
                if row[k]:
                    out[k] = out[k] + f * row[k]
    return tuple(out)


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _is_zero(u):
    return all(a.is_zero for a in u)


@dataclass(frozen=True)
class SubspaceSpec:
    vectors: tuple

    def __post_init__(self):
        vecs = tuple(tuple(Scalar(a) for a in v) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        if vecs and rank(ScalarMatrix(vecs)) != len(vecs):
            raise ValueError("subspace vectors are linearly dependent")

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def span(cls, d, indices):
        return cls(tuple(tuple(1 if a == i else 0 for a in range(d)) for i in indices))

    @property
    def dim(self):
        return len(self.vectors)

    def contains(self, w):
        if _is_zero(w):
            return True
        if not self.vectors:
            return False
        M = ScalarMatrix(self.vectors)
        return rank(M) == rank(ScalarMatrix(self.vectors + (tuple(w),)))

    def transform(self, Pinv):
        """Coordinates after a basis change with inverse matrix Pinv."""
        return SubspaceSpec(tuple(Pinv @ v for v in self.vectors))


# identity checks -------------------------------------------------------------------

def check_torsion_free_product(a):
    d, c, p = a.dim, a.bracket, a.product
    return all(c[i][j][k] == p[i][j][k] - p[j][i][k] for i, j, k in product(range(d), repeat=3))


def _triples(a):
    e = [a.basis(i) for i in range(a.dim)]
    return [(e[i], e[j], e[k]) for i, j, k in product(range(a.dim), repeat=3)]


def check_flat_product(a):
    """[X,Y].Z = X.(Y.Z) - Y.(X.Z) on basis triples."""
    m = a.mul
    for X, Y, Z in _triples(a):
        if m(a.br(X, Y), Z) != _sub(m(X, m(Y, Z)), m(Y, m(X, Z))):
            return False
    return True


def check_left_symmetric(a):
    """(X.Y).Z - (Y.X).Z = X.(Y.Z) - Y.(X.Z) on basis triples."""
    m = a.mul
    for X, Y, Z in _triples(a):
        if _sub(m(m(X, Y), Z), m(m(Y, X), Z)) != _sub(m(X, m(Y, Z)), m(Y, m(X, Z))):
            return False
    return True


def check_associative(a):
    m = a.mul
    return all(m(m(X, Y), Z) == m(X, m(Y, Z)) for X, Y, Z in _triples(a))


def check_jacobi(a):
    b = a.br
    for X, Y, Z in _triples(a):
        s = _add(_add(b(X, b(Y, Z)), b(Y, b(Z, X))), b(Z, b(X, Y)))
        if not _is_zero(s):
            return False
    return True


def check_absorption(a, h, side):
    """g_times_h: Y*X in h for Y in g, X in h.  h_times_g: X*Y in h."""
    if side not in ("g_times_h", "h_times_g"):
        raise ValueError(f"unknown side {side!r}")
    for X in h.vectors:
        for i in range(a.dim):
            Y = a.basis(i)
            w = a.mul(Y, X) if side == "g_times_h" else a.mul(X, Y)
            if not h.contains(w):
                return False
    return True


# quotient map ------------------------------------------------------------------------

def _quotient_complement(d, h):
    """Standard basis vectors at the non-pivot columns of rref(h)."""
    if not h.vectors:
        return list(range(d))
    _, pivots = rref(ScalarMatrix(h.vectors))
    return [i for i in range(d) if i not in pivots]


class _Splitting:
    """Coordinates along a direct sum g = U + W given bases of U and W."""

    def __init__(self, d, U, W):
        self.d = d
        self.nu = len(U)
        cols = list(U) + list(W)
        self.B = ScalarMatrix([[cols[j][i] for j in range(len(cols))] for i in range(d)], len(cols))

    def coords(self, w):
        x = solve(self.B, w)
        if x is None:
            raise ValueError("vector outside the span of the splitting")
        return x[:self.nu], x[self.nu:]


@dataclass(frozen=True)
class InducedLMap:
    quotient_dim: int
    quotient_basis: tuple
    matrices: tuple
    well_defined: bool
    condition_ii: bool


def induced_L_map(a, h):
    d = a.dim
    comp = _quotient_complement(d, h)
    qbasis = tuple(a.basis(i) for i in comp)
    split = _Splitting(d, h.vectors, qbasis)
    mats = []
    for i in range(d):
        X = a.basis(i)
        cols = [split.coords(a.mul(X, q))[1] for q in qbasis]
        q = len(qbasis)
        mats.append(ScalarMatrix([[cols[s][r] for s in range(q)] for r in range(q)], q))
    cond_ii = all(h.contains(_sub(a.mul(X, a.basis(j)), a.br(a.basis(j), X)))
                  for X in h.vectors for j in range(d))
    return InducedLMap(len(qbasis), qbasis, tuple(mats), check_absorption(a, h, "g_times_h"), cond_ii)


# reductive case -------------------------------------------------------------------------

def reductive_split_check(a, h, m):
    d = a.dim
    if h.dim + m.dim != d:
        return False
    vecs = h.vectors + m.vectors
    if vecs and rank(ScalarMatrix(vecs)) != d:
        return False
    return all(m.contains(a.br(X, Y)) for X in h.vectors for Y in m.vectors)


@dataclass(frozen=True)
class ReductiveProduct:
    algebra: ProductAlgebra
    ad_derivation: bool
    infinitesimal_only: bool = True


def reductive_product(a, h, m):
    """X.Y = (X*Y)_m on m, in the coordinates of m.vectors."""
    if not reductive_split_check(a, h, m):
        raise NotReductive("g = h + m is not a reductive splitting")
    k = m.dim
    split = _Splitting(a.dim, h.vectors, m.vectors)
    mv = m.vectors
    proj = lambda w: split.coords(w)[1]  # noqa: E731
    p = [[list(proj(a.mul(mv[i], mv[j]))) for j in range(k)] for i in range(k)]
    c = [[list(proj(a.br(mv[i], mv[j]))) for j in range(k)] for i in range(k)]
    sub = ProductAlgebra(k, c, p)

    def in_m(coords):
        out = [Scalar(0)] * a.dim
        for s, v in zip(coords, mv):
            if s:
                out = [o + s * vi for o, vi in zip(out, v)]
        return tuple(out)

    deriv = True
    for X in h.vectors:
        ad = [proj(a.br(X, v)) for v in mv]
        for i, j in product(range(k), repeat=2):
            Y, Z = sub.basis(i), sub.basis(j)
            lhs = proj(a.br(X, in_m(sub.mul(Y, Z))))
            rhs = _add(sub.mul(ad[i], Z), sub.mul(Y, ad[j]))
            if lhs != rhs:
                deriv = False
                break
        if not deriv:
            break
    return ReductiveProduct(sub, deriv)


def descent_report(a, h, m=None):
    """Verdicts on the descent conditions for a left-invariant structure to G/H."""
    L = induced_L_map(a, h)
    out = {
        "h_dim": h.dim,
        "absorption_g_times_h": check_absorption(a, h, "g_times_h"),
        "absorption_h_times_g": check_absorption(a, h, "h_times_g"),
        "well_defined": L.well_defined,
        "condition_ii": L.condition_ii,
        "quotient_dim": L.quotient_dim,
        "L_matrices": [[[str(e) for e in r] for r in M.entries] for M in L.matrices],
    }
    if m is not None:
        ok = reductive_split_check(a, h, m)
        out["reductive"] = ok
        if ok:
            rp = reductive_product(a, h, m)
            out["reductive_product"] = algebra_to_json(rp.algebra)
            out["ad_derivation"] = rp.ad_derivation
            out["ad_check"] = "infinitesimal (connected H)"
    return out


# JSON ------------------------------------------------------------------------------

_SCALAR = {"type": ["string", "integer"]}
_TRIPLE = {"type": "array", "minItems": 4, "maxItems": 4,
           "prefixItems": [{"type": "integer", "minimum": 1}] * 3 + [_SCALAR]}
ALGEBRA_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["dim"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "params": {"type": "array", "items": {"type": "string"}},
        "labels": {"type": "array", "items": {"type": "string"}},
        "bracket": {"oneOf": [{"type": "array", "items": _TRIPLE}, {"const": "commutator"}]},
        "product": {"type": "array", "items": _TRIPLE},
        "h": {"type": "array", "items": {"type": "array", "items": _SCALAR}},
        "m": {"type": "array", "items": {"type": "array", "items": _SCALAR}},
    },
    "additionalProperties": False,
}


def load_algebra(obj):
    """Parse an algebra document; returns (ProductAlgebra, h, m or None)."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
    try:
        jsonschema.validate(obj, ALGEBRA_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"algebra document: {exc.message}") from None
    d = obj["dim"]
    for name in obj.get("params", []):
        declare_param(name)

    def triples(key):
        out = []
        for i, j, k, v in obj.get(key, []):
            if max(i, j, k) > d:
                raise SchemaError(f"{key} index out of range in {[i, j, k]}")
            out.append((i - 1, j - 1, k - 1, Scalar(v)))
        return out

    def subspace(key):
        vecs = obj.get(key, [])
        if any(len(v) != d for v in vecs):
            raise SchemaError(f"{key} vectors must have length {d}")
        try:
            return SubspaceSpec(tuple(tuple(Scalar(x) for x in v) for v in vecs))
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise SchemaError(f"{key}: {exc}") from None

    labels = tuple(obj.get("labels", ()))
    try:
        if obj.get("bracket") == "commutator":
            p = [[[Scalar(0)] * d for _ in range(d)] for _ in range(d)]
            for i, j, k, v in triples("product"):
                p[i][j][k] = p[i][j][k] + v
            a = ProductAlgebra.with_commutator(d, p, labels)
        else:
            a = ProductAlgebra.from_sparse(d, triples("bracket"), triples("product"), labels=labels)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise SchemaError(str(exc)) from None
    h = subspace("h")
    m = subspace("m") if "m" in obj else None
    return a, h, m


def algebra_to_json(a, h=None, m=None):
    def sparse(t):
        return [[i + 1, j + 1, k + 1, str(t[i][j][k])]
                for i, j, k in product(range(a.dim), repeat=3) if t[i][j][k]]

    out = {"dim": a.dim, "bracket": sparse(a.bracket), "product": sparse(a.product)}
    if h is not None:
        out["h"] = [[str(x) for x in v] for v in h.vectors]
    if m is not None:
        out["m"] = [[str(x) for x in v] for v in m.vectors]
    return out
