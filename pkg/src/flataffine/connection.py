"""Linear connections on coordinate domains, given by Christoffel symbols.

Index convention (0-based in the Python API): ``gamma[k][i][j]`` is the
coefficient of d_k in the covariant derivative of d_j along d_i.  JSON files
use 1-based indices.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

from .errors import (CompositionOutsideAlgebra, DimensionMismatch, ParseError,
                     SchemaError)
from .exppoly import (Domain, ExpPoly, VectorField, exppoly_from_json,
                      exppoly_to_json, parse_function)
from .scalars import Scalar, ScalarMatrix

__all__ = [
    "Connection", "AffineMap", "DiffeoData", "torsion", "curvature",
    "is_flat_affine", "covariant_derivative", "pullback_connection",
    "is_affine_map", "connection_from_json", "connection_to_json",
]


def _nested(n, depth, fn):
    if depth == 0:
        return fn(())
    return tuple(_nested(n, depth - 1, lambda idx, a=a: fn((a,) + idx)) for a in range(n))


def _flat_items(tensor, depth):
    """Yield (index tuple, entry) pairs of a nested tuple tensor."""
    if depth == 0:
        yield (), tensor
        return
    for a, sub in enumerate(tensor):
        for idx, v in _flat_items(sub, depth - 1):
            yield (a,) + idx, v


def tensor_is_zero(tensor, depth):
    return all(v.is_zero for _, v in _flat_items(tensor, depth))


def nonzero_components(tensor, depth):
    return [(idx, v) for idx, v in _flat_items(tensor, depth) if not v.is_zero]


@dataclass(frozen=True)
class Connection:
    dim: int
    gamma: tuple
    domain: Domain = None

    def __post_init__(self):
        n = self.dim
        if self.domain is None:
            object.__setattr__(self, "domain", Domain.full(n))
        if self.domain.dim != n:
            raise DimensionMismatch("connection and domain dimensions differ")
        g = self.gamma
        if len(g) != n or any(len(r) != n or any(len(c) != n for c in r) for r in g):
            raise DimensionMismatch("gamma must be an n x n x n array")
        if any(v.n != n for _, v in _flat_items(g, 3)):
            raise DimensionMismatch("every Christoffel symbol must be an ExpPoly in n variables")

    @classmethod
    def standard(cls, n=2, domain=None):
        z = ExpPoly.zero(n)
        return cls(n, _nested(n, 3, lambda idx: z), domain)

    @classmethod
    def from_symbols(cls, n, symbols, domain=None):
        """Build from a sparse map ``{(k, i, j): ExpPoly | literal | Scalar}``."""
        entries = {}
        for (k, i, j), v in symbols.items():
            if isinstance(v, str):
                v = parse_function(v, n)
            elif not isinstance(v, ExpPoly):
                v = ExpPoly.constant(n, v)
            entries[(k, i, j)] = v
        z = ExpPoly.zero(n)
        return cls(n, _nested(n, 3, lambda idx: entries.get(idx, z)), domain)

    def christoffel(self, k, i, j):
        return self.gamma[k][i][j]

    def nonzero_symbols(self):
        return nonzero_components(self.gamma, 3)

    def weights(self):
        out = set()
        for _, v in _flat_items(self.gamma, 3):
            out |= v.weights
        return out

    def __eq__(self, other):
        if not isinstance(other, Connection):
            return NotImplemented
        return self.dim == other.dim and self.gamma == other.gamma


def torsion(c):
    """T^k_ij = Gamma^k_ij - Gamma^k_ji in a coordinate frame."""
    g = c.gamma
    return _nested(c.dim, 3, lambda idx: g[idx[0]][idx[1]][idx[2]] - g[idx[0]][idx[2]][idx[1]])


def curvature(c):
    """R^l_kij: the d_l component of R(d_i, d_j) d_k."""
    n, g = c.dim, c.gamma

    def entry(idx):
        l, k, i, j = idx
        r = g[l][j][k].diff(i) - g[l][i][k].diff(j)
        for m in range(n):
            r = r + g[m][j][k] * g[l][i][m] - g[m][i][k] * g[l][j][m]
        return r

    return _nested(n, 4, entry)


def is_flat_affine(c):
    return tensor_is_zero(torsion(c), 3) and tensor_is_zero(curvature(c), 4)


def covariant_derivative(c, X, Y):
    """(nabla_X Y)^k = X^i d_i Y^k + Gamma^k_ij X^i Y^j."""
    n = c.dim
    if X.n != n or Y.n != n:
        raise DimensionMismatch("fields and connection have different dimensions")
    comps = []
    for k in range(n):
        v = X.apply(Y[k])
        for i, j in product(range(n), repeat=2):
            gk = c.gamma[k][i][j]
            if gk and X[i] and Y[j]:
                v = v + gk * X[i] * Y[j]
        comps.append(v)
    return VectorField(tuple(comps), Y.domain)


# maps ----------------------------------------------------------------------------

class AffineMap:
    """x -> A x + b with A invertible over the Scalars."""

    __slots__ = ("A", "b", "_inv")

    def __init__(self, A, b=None):
        A = A if isinstance(A, ScalarMatrix) else ScalarMatrix(A)
        n = A.rows
        if A.cols != n:
            raise DimensionMismatch("linear part must be square")
        b = tuple(Scalar(v) for v in (b if b is not None else [0] * n))
        if len(b) != n:
            raise DimensionMismatch("translation length differs from dimension")
        if A.det().is_zero:
            raise ValueError("linear part is not invertible")
        self.A = A
        self.b = b
        self._inv = None

    @classmethod
    def from_rows(cls, rows):
        """From an n x (n+1) matrix: linear part, then translation column."""
        rows = [list(r) for r in rows]
        return cls([r[:-1] for r in rows], [r[-1] for r in rows])

    @classmethod
    def identity(cls, n):
        return cls(ScalarMatrix.identity(n))

    @classmethod
    def translation(cls, b):
        return cls(ScalarMatrix.identity(len(b)), b)

    @property
    def n(self):
        return self.A.rows

    def components(self):
        n = self.n
        out = []
        for a in range(n):
            f = ExpPoly.constant(n, self.b[a])
            for j in range(n):
                if self.A[a, j]:
                    f = f + ExpPoly.coordinate(n, j).scale(self.A[a, j])
            out.append(f)
        return tuple(out)

    def compose(self, other):
        """self o other."""
        return AffineMap(self.A @ other.A, tuple(u + v for u, v in zip(self.A @ other.b, self.b)))

    def __matmul__(self, other):
        return self.compose(other)

    def inverse(self):
        if self._inv is None:
            Ai = self.A.inverse()
            self._inv = AffineMap(Ai, tuple(-v for v in Ai @ self.b))
        return self._inv

    def __call__(self, p):
        return tuple(v + bb for v, bb in zip(self.A @ p, self.b))

    def to_float(self, values):
        A = self.A.evaluate_float(values)
        b = [v.evaluate_float(values) for v in self.b]
        return A, b

    def float_map(self, values):
        A, b = self.to_float(values)
        n = self.n
        return lambda p: [sum(A[i][j] * p[j] for j in range(n)) + b[i] for i in range(n)]

    @property
    def is_rational(self):
        return all(e.is_rational for r in self.A.entries for e in r) and all(v.is_rational for v in self.b)

    def __eq__(self, other):
        if not isinstance(other, AffineMap):
            return NotImplemented
        return self.A == other.A and self.b == other.b

    def __hash__(self):
        return hash((self.A, self.b))

    def __repr__(self):
        rows = [[str(e) for e in r] + [str(bb)] for r, bb in zip(self.A.entries, self.b)]
        return f"AffineMap.from_rows({rows})"


def _mat_mul(P, Q):
    n, m, r = len(P), len(Q), len(Q[0])
    out = []
    for i in range(n):
        row = []
        for j in range(r):
            s = ExpPoly.zero(P[0][0].n)
            for k in range(m):
                if P[i][k] and Q[k][j]:
                    s = s + P[i][k] * Q[k][j]
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def _det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    total = ExpPoly.zero(M[0][0].n)
    for j in range(n):
        if M[0][j]:
            minor = tuple(tuple(r[:j] + r[j + 1:]) for r in M[1:])
            term = M[0][j] * _det(minor)
            total = total + term if j % 2 == 0 else total - term
    return total


def _invert_unit(f):
    """Inverse of c*exp(<w,x>) inside the algebra, else CompositionOutsideAlgebra."""
    if len(f) != 1:
        raise CompositionOutsideAlgebra(f"{f} is not a unit of the exponential-polynomial algebra")
    (p, w), c = next(iter(f.items()))
    if any(p):
        raise CompositionOutsideAlgebra(f"{f} is not a unit of the exponential-polynomial algebra")
    return ExpPoly.monomial(f.n, p, tuple(-wi for wi in w), Scalar(1) / c)


@dataclass(frozen=True)
class DiffeoData:
    """A local diffeomorphism F with Jacobian J and inverse Jacobian Jinv."""

    F: tuple
    J: tuple
    Jinv: tuple
    domain: Domain = None

    def __post_init__(self):
        n = len(self.F)
        if self.domain is None:
            object.__setattr__(self, "domain", Domain.full(n))
        for a in range(n):
            for b in range(n):
                if self.J[a][b] != self.F[a].diff(b):
                    raise ValueError(f"J[{a}][{b}] is not d_{b} F_{a}")
        ident = _mat_mul(self.J, self.Jinv)
        for a in range(n):
            for b in range(n):
                if ident[a][b] != (1 if a == b else 0):
                    raise ValueError("J * Jinv is not the identity")

    @property
    def n(self):
        return len(self.F)

    @classmethod
    def from_map(cls, F, Jinv=None, domain=None):
        """Jacobian by differentiation; Jinv inverted exactly when det(J) is a unit."""
        F = tuple(F)
        n = len(F)
        J = tuple(tuple(F[a].diff(b) for b in range(n)) for a in range(n))
        if Jinv is None:
            inv_det = _invert_unit(_det(J))
            adj = []
            for i in range(n):
                row = []
                for j in range(n):
                    if n == 1:
                        cof = ExpPoly.constant(1, 1)
                    else:
                        minor = tuple(tuple(r[:i] + r[i + 1:]) for k, r in enumerate(J) if k != j)
                        cof = _det(minor)
                        if (i + j) % 2:
                            cof = -cof
                    row.append(cof * inv_det)
                adj.append(tuple(row))
            Jinv = tuple(adj)
        return cls(F, J, tuple(tuple(r) for r in Jinv), domain)

    @classmethod
    def from_affine(cls, T, domain=None):
        n = T.n
        Ai = T.A.inverse()
        const = lambda s: ExpPoly.constant(n, s)  # noqa: E731
        return cls(T.components(), tuple(tuple(const(T.A[a, b]) for b in range(n)) for a in range(n)),
                   tuple(tuple(const(Ai[a, b]) for b in range(n)) for a in range(n)), domain)


def _as_diffeo(F):
    if isinstance(F, AffineMap):
        return DiffeoData.from_affine(F)
    return F


def pullback_connection(c, d):
    """Connection on the source of ``d`` making ``d`` an affine map into ``c``.

    Gamma~^k_ij = Jinv^k_a (d_i J^a_j + (Gamma^a_bc o F) J^b_i J^c_j)
    """
    d = _as_diffeo(d)
    n = c.dim
    if d.n != n:
        raise DimensionMismatch("map and connection dimensions differ")
    composed = {}
    for (a, b, cc), g in nonzero_components(c.gamma, 3):
        composed[(a, b, cc)] = g.compose(d.F)

    def entry(idx):
        k, i, j = idx
        total = ExpPoly.zero(n)
        for a in range(n):
            if not d.Jinv[k][a]:
                continue
            inner = d.J[a][j].diff(i)
            for b in range(n):
                for cc in range(n):
                    g = composed.get((a, b, cc))
                    if g is not None and d.J[b][i] and d.J[cc][j]:
                        inner = inner + g * d.J[b][i] * d.J[cc][j]
            if inner:
                total = total + d.Jinv[k][a] * inner
        return total

    return Connection(n, _nested(n, 3, entry), d.domain)


def is_affine_map(F, src, dst):
    """True iff F carries ``src`` onto ``dst``, i.e. F^* dst == src."""
    if not isinstance(F, (DiffeoData, AffineMap)):
        F = DiffeoData.from_map(tuple(F), domain=src.domain)
    return pullback_connection(dst, F).gamma == src.gamma


# JSON ------------------------------------------------------------------------------

def connection_to_json(c):
    return {
        "dim": c.dim,
        "domain": str(c.domain),
        "gamma": [{"k": k + 1, "i": i + 1, "j": j + 1, "fn": exppoly_to_json(v)}
                  for (k, i, j), v in c.nonzero_symbols()],
    }


def connection_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        n = int(obj["dim"])
        domain = Domain.parse(obj.get("domain", f"FullSpace({n})"))
        symbols = {}
        for entry in obj.get("gamma", []):
            idx = (int(entry["k"]) - 1, int(entry["i"]) - 1, int(entry["j"]) - 1)
            if any(not 0 <= a < n for a in idx):
                raise SchemaError(f"Christoffel index out of range in {entry!r}")
            symbols[idx] = exppoly_from_json(entry["fn"], n)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (ParseError, SchemaError)):
            raise
        raise SchemaError(f"malformed connection document: {exc}") from None
    return Connection.from_symbols(n, symbols, domain)
