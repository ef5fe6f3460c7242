"""Discrete affine actions on plane domains and their invariant affine fields.

A flat affine surface presented as O / G, with O a domain carrying the
standard connection and G acting by affine maps, has its infinitesimal
affine transformations given by the G-invariant fields inside aff(O).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .connection import AffineMap, Connection, DiffeoData, pullback_connection
from .errors import (ClosureViolation,
                     DimensionMismatch, NotAffineField, UnknownSurface)
from .exppoly import (PUNCTURED_PLANE, QUADRANT, UPPER_HALF_PLANE, Domain,
                      ExpPoly, VectorField, parse_field, parse_function)
from .infaff import classical_aff_basis
from .scalars import Scalar, ScalarMatrix, declare_param, nullspace, rank, solve

__all__ = [
    "DeckAction", "SurfaceEntry", "preserves_domain", "pushforward_affine_field",
    "pushforward_field", "representation_matrix", "invariant_subalgebra",
    "lift_through_etale", "is_invariant_field", "surface_catalog", "catalog_keys",
    "ambient_basis", "etale_example", "EtaleExample", "affine_parts", "span_equal",
    "affine_field", "pushforward_through",
]

declare_param("L")  # lambda of the Klein bottle groups
declare_param("M")  # mu of the Klein bottle groups


# domain preservation ------------------------------------------------------------

def _positive(s):
    return s.sign() > 0


def preserves_domain(T, d):
    """Decide whether the affine map T carries the domain d into itself.

    Signs of parametric entries come from positivity flags; an undecidable
    sign raises UndecidableSign instead of being guessed.
    """
    if T.n != d.dim:
        raise DimensionMismatch("map and domain dimensions differ")
    if d.kind == "FullSpace":
        return True
    A, b = T.A, T.b
    if d.kind == "UpperHalfPlane":
        # (x, y) -> (ax + by + c, dy) with d > 0
        return A[1, 0].is_zero and b[1].is_zero and _positive(A[1, 1])
    if d.kind == "Quadrant":
        # linear, entrywise non-negative, no zero row
        if any(v for v in b):
            return False
        for r in range(2):
            signs = [A[r, c].sign() for c in range(2)]
            if min(signs) < 0 or max(signs) <= 0:
                return False
        return True
    return all(v.is_zero for v in b)


# affine fields ------------------------------------------------------------------

def affine_parts(X):
    """(M, v) with X(p) = M p + v; NotAffineField if X is not affine."""
    if not X.is_affine:
        raise NotAffineField(f"{X} is not an affine vector field")
    n = X.n
    zero_w = (Fraction(0),) * n
    M, v = [], []
    for c in X.components:
        terms = c.terms
        M.append([terms.get((tuple(1 if a == j else 0 for a in range(n)), zero_w), Scalar(0))
                  for j in range(n)])
        v.append(terms.get(((0,) * n, zero_w), Scalar(0)))
    return ScalarMatrix(M, n), tuple(v)


def affine_field(M, v, domain=None):
    M = M if isinstance(M, ScalarMatrix) else ScalarMatrix(M)
    n = M.rows
    comps = []
    for k in range(n):
        f = ExpPoly.constant(n, v[k])
        for j in range(n):
            if M[k, j]:
                f = f + ExpPoly.coordinate(n, j).scale(M[k, j])
        comps.append(f)
    return VectorField(tuple(comps), domain)


def pushforward_affine_field(X, T):
    """T_* X for affine X(p) = M p + v: matrix A M A^-1, constant A v - A M A^-1 b."""
    if X.n != T.n:
        raise DimensionMismatch("field and map dimensions differ")
    M, v = affine_parts(X)
    Ainv = T.A.inverse()
    M2 = T.A @ M @ Ainv
    Mb = M2 @ T.b
    v2 = tuple(a - c for a, c in zip(T.A @ v, Mb))
    return affine_field(M2, v2, X.domain)


def pushforward_field(X, T):
    """(T_* X)(p) = A X(T^-1 p) for an exponential-polynomial field."""
    if X.n != T.n:
        raise DimensionMismatch("field and map dimensions differ")
    if X.is_affine:
        return pushforward_affine_field(X, T)
    Tinv = T.inverse()
    pulled = [c.compose_affine(Tinv) for c in X.components]
    n = X.n
    comps = []
    for a in range(n):
        f = ExpPoly.zero(n)
        for b in range(n):
            if T.A[a, b] and pulled[b]:
                f = f + pulled[b].scale(T.A[a, b])
        comps.append(f)
    return VectorField(tuple(comps), X.domain)


def is_invariant_field(X, T):
    return pushforward_field(X, T) == X


def _field_coords(X):
    return {(k,) + key: c for k, comp in enumerate(X.components) for key, c in comp.items()}


def _coordinates(fields):
    """Stack fields as columns of a coefficient matrix over a shared key set."""
    coords = [_field_coords(X) for X in fields]
    keys = sorted({k for c in coords for k in c})
    return keys, coords


def span_equal(fields_a, fields_b):
    """Exact equality of the linear spans of two lists of fields."""
    fields_a, fields_b = list(fields_a), list(fields_b)
    keys, coords = _coordinates(fields_a + fields_b)

    def r(cs):
        return rank(ScalarMatrix([[c.get(k, 0) for k in keys] for c in cs], len(keys))) if cs else 0

    ra, rb = r(coords[:len(fields_a)]), r(coords[len(fields_a):])
    return ra == rb == r(coords)


def representation_matrix(T, basis):
    """Matrix of T_* on span(basis); ClosureViolation if the span is not preserved."""
    basis = list(basis)
    pushed = [pushforward_field(X, T) for X in basis]
    keys, coords = _coordinates(basis + pushed)
    Bcols, Pcols = coords[:len(basis)], coords[len(basis):]
    B = ScalarMatrix([[c.get(k, 0) for c in Bcols] for k in keys], len(basis))
    cols = []
    for X, pc in zip(pushed, Pcols):
        x = solve(B, [pc.get(k, 0) for k in keys])
        if x is None:
            raise ClosureViolation(f"pushforward {X} leaves the ambient span")
        cols.append(x)
    return ScalarMatrix([[cols[j][i] for j in range(len(basis))] for i in range(len(basis))], len(basis))


def _combine(vec, basis, domain):
    n = basis[0].n
    X = VectorField.zero(n, domain)
    for c, B in zip(vec, basis):
        if c:
            X = X + B.scale(c)
    return X


def invariant_subalgebra(action, ambient=None, require_closure=True):
    """Echelon basis of the fields in span(ambient) fixed by every generator.

    With ``require_closure`` this is the joint nullspace of rho(T) - I on the
    ambient basis.  Without it, invariance is imposed directly on the
    coefficients of T_* X - X, which also handles generators that map the
    domain into a proper subset of itself.
    """
    basis = list(ambient if ambient is not None else ambient_basis(action.domain))
    if not basis:
        return []
    k = len(basis)
    rows = []
    for T in action.generators:
        if require_closure:
            rho = representation_matrix(T, basis)
            rows.extend([[rho[i, j] - (1 if i == j else 0) for j in range(k)] for i in range(k)])
        else:
            diffs = [pushforward_field(X, T) - X for X in basis]
            keys, coords = _coordinates(diffs)
            rows.extend([[c.get(key, 0) for c in coords] for key in keys])
    if rows:
        vecs = nullspace(ScalarMatrix(rows, k))
    else:
        vecs = [tuple(1 if i == j else 0 for i in range(k)) for j in range(k)]
    return [_combine(v, basis, action.domain) for v in vecs]


# lifts ---------------------------------------------------------------------------------

def lift_through_etale(X, d):
    """L(X) = Jinv (X o F), the unique field on the source with D_* L(X) = X."""
    if X.n != d.n:
        raise DimensionMismatch("field and map dimensions differ")
    pulled = [c.compose(d.F) for c in X.components]
    n = d.n
    comps = []
    for k in range(n):
        f = ExpPoly.zero(n)
        for a in range(n):
            if d.Jinv[k][a] and pulled[a]:
                f = f + d.Jinv[k][a] * pulled[a]
        comps.append(f)
    return VectorField(tuple(comps), d.domain)


def pushforward_through(X, d):
    """J X, the field d_* X written in source coordinates (equals X o F for a lift)."""
    n = d.n
    return tuple(sum((d.J[a][b] * X[b] for b in range(n) if d.J[a][b] and X[b]), ExpPoly.zero(n))
                 for a in range(n))


# actions and the catalog -------------------------------------------------------------

@dataclass(frozen=True)
class DeckAction:
    domain: Domain
    generators: tuple = ()
    name: str = ""

    def __post_init__(self):
        gens = tuple(g if isinstance(g, AffineMap) else AffineMap.from_rows(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            if not preserves_domain(g, self.domain):
                raise ValueError(f"generator {g} does not preserve {self.domain}")

    def word(self, letters):
        """The composite of generators indexed by ``letters``; negative index i means the inverse of generator -i-1."""
        n = self.domain.dim
        out = AffineMap.identity(n)
        for i in letters:
            g = self.generators[i] if i >= 0 else self.generators[-i - 1].inverse()
            out = out @ g
        return out


def ambient_basis(domain):
    """Affine fields of the standard connection whose flows preserve the domain."""
    if domain.kind == "FullSpace":
        return classical_aff_basis(domain.dim, domain).fields
    lits = {
        "UpperHalfPlane": ["x*d/dx", "y*d/dx", "d/dx", "y*d/dy"],
        "Quadrant": ["x*d/dx", "y*d/dy"],
        "PuncturedPlane": ["x*d/dx", "y*d/dx", "x*d/dy", "y*d/dy"],
    }[domain.kind]
    return tuple(parse_field(t, domain) for t in lits)


@dataclass(frozen=True)
class SurfaceEntry:
    key: str
    action: DeckAction
    expected_dim: int
    expected_description: str
    ambient: tuple = None
    require_closure: bool = True
    note: str = ""

    @property
    def domain(self):
        return self.action.domain

    def ambient_fields(self):
        return self.ambient if self.ambient is not None else ambient_basis(self.domain)

    def invariant_basis(self):
        return invariant_subalgebra(self.action, self.ambient_fields(), self.require_closure)


_FULL = Domain.full(2)
E = "E"


def _t(a, b):
    return [[1, 0, a], [0, 1, b]]


_CATALOG_DATA = [
    # key, domain, generators (rows [A | b]), expected dim, description
    ("torus:1", _FULL, [_t(1, 0), _t(0, 1)], 2, "translations of the plane"),
    ("torus:2", _FULL, [_t(1, 0), [[1, 1, Fraction(1, 2)], [0, 1, 1]]], 2, "F(x,y)=(x+ay+b,y+a)"),
    ("torus:3", UPPER_HALF_PLANE, [_t(1, 0), [[1, 0, 0], [0, E, 0]]], 2, "F(x,y)=(x+a,by), b>0"),
    ("torus:4", UPPER_HALF_PLANE, [[[E, 0, 0], [0, E, 0]], [[1, 1, 0], [0, 1, 0]]], 2,
     "F(x,y)=(ax+by,ay), a>0"),
    ("torus:5", QUADRANT, [[[E, 0, 0], [0, 1, 0]], [[1, 0, 0], [0, E, 0]]], 2, "F(x,y)=(ax,by), a,b>0"),
    ("torus:6", PUNCTURED_PLANE, [[[E, 0, 0], [0, E, 0]]], 4, "GL2(R)"),
    ("klein:1", _FULL, [[[1, 0, 1], [0, 1, 0]], [[-1, 0, 0], [0, 1, Fraction(1, 2)]]], 1,
     "F(x,y)=(x,y+a)"),
    ("klein:2", _FULL, [[[1, 1, 0], [0, 1, 1]], [[1, 0, Fraction(1, 2)], [0, -1, 0]]], 1,
     "F(x,y)=(x+a,y)"),
    ("klein:3", UPPER_HALF_PLANE, [[[1, 0, 1], [0, 1, 0]], [[-1, 0, 0], [0, "L", 0]]], 1,
     "F(x,y)=(x,ay), a>0"),
    ("klein:4", UPPER_HALF_PLANE, [[[1, 1, 0], [0, 1, 0]], [["-L", 0, 0], [0, "L", 0]]], 1,
     "homotheties of the plane"),
    ("klein:5", QUADRANT, [[["L", 0, 0], [0, "1/L", 0]], [[0, 1, 0], ["M", 0, 0]]], 1,
     "homotheties of the plane"),
    ("klein:6", PUNCTURED_PLANE, [[["L", 0, 0], [0, "-L", 0]]], 2, "F(x,y)=(ax,by), a,b!=0"),
    ("cylinder:1", _FULL, [_t(0, 1)], 4, "F(x,y)=(ax+b,cx+y+d), a!=0"),
    ("cylinder:2", _FULL, [[[1, 1, Fraction(1, 2)], [0, 1, 1]]], 2, "F(x,y)=(x+ay+b,y+a)"),
    ("cylinder:3", UPPER_HALF_PLANE, [_t(1, 0)], 3, "F(x,y)=(x+ay+b,cy), c>0"),
    ("cylinder:4", UPPER_HALF_PLANE, [[[1, 0, 0], [0, E, 0]]], 3, "F(x,y)=(ax+b,cy), a!=0, c>0"),
    ("cylinder:5", UPPER_HALF_PLANE, [[[1, 1, 0], [0, 1, 0]]], 3, "F(x,y)=(ax+by+c,ay), a>0"),
    ("cylinder:6", UPPER_HALF_PLANE, [[[E, 0, 0], [0, E, 0]]], 3, "F(x,y)=(ax+by,cy), a!=0, c>0"),
    ("cylinder:7", QUADRANT, [[[1, 0, 0], [0, E, 0]]], 2, "F(x,y)=(ax,by), a,b>0"),
    ("cylinder:8", PUNCTURED_PLANE, [], 4, "GL2(R)"),
    ("mobius:1", _FULL, [[[-1, 0, 0], [0, 1, 1]]], 2, "F(x,y)=(ax,y+b), a!=0"),
    ("mobius:2", _FULL, [[[1, 0, 1], [0, -1, 0]]], 2, "F(x,y)=(x+a,by), b!=0"),
    ("mobius:3", UPPER_HALF_PLANE, [[[-1, 0, 0], [0, E, 0]]], 2, "F(x,y)=(ax,by), a!=0, b>0"),
    ("mobius:4", UPPER_HALF_PLANE, [[["-E", 0, 0], [0, E, 0]]], 2, "F(x,y)=(ax,by), a!=0, b>0"),
    ("mobius:5", QUADRANT, [[[0, 1, 0], [E, 1, 0]]], 1, "F(x,y)=(ax,ay), a>0"),
]

_NOTES = {
    "cylinder:8": "quotient of the plane with the Hopf-torus structure, realized as the punctured plane itself",
    "mobius:5": "generator maps the quadrant into itself but not onto; invariance imposed on T_*X - X directly",
    "example:etale": "orbit of the etale example, no deck group",
}


def _build_catalog():
    out = {}
    for key, domain, gens, dim, desc in _CATALOG_DATA:
        action = DeckAction(domain, tuple(AffineMap.from_rows(g) for g in gens), key)
        out[key] = SurfaceEntry(key, action, dim, desc, None, key != "mobius:5", _NOTES.get(key, ""))
    out["example:etale"] = SurfaceEntry("example:etale", DeckAction(UPPER_HALF_PLANE, (), "example:etale"),
                                        4, "affine fields of the upper half plane", None, True,
                                        _NOTES["example:etale"])
    return out


_CATALOG = None


def _catalog():
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _build_catalog()
    return _CATALOG


def catalog_keys(include_example=False):
    keys = [k for k, *_ in _CATALOG_DATA]
    return keys + ["example:etale"] if include_example else keys


def surface_catalog(key):
    try:
        return _catalog()[key]
    except KeyError:
        raise UnknownSurface(f"unknown surface {key!r}") from None


# the etale example ---------------------------------------------------------------

@dataclass(frozen=True)
class EtaleExample:
    """D(x, y) = (y e^x, e^x) from the plane onto the upper half plane."""

    D: DiffeoData
    connection: Connection
    orbit_basis: tuple
    incomplete_orbit_fields: tuple
    lifts: tuple = field(default=())
    incomplete_lifts: tuple = field(default=())


def etale_example():
    F = (parse_function("y*exp(x)"), parse_function("exp(x)"))
    D = DiffeoData.from_map(F, domain=Domain.full(2))
    conn = pullback_connection(Connection.standard(2, UPPER_HALF_PLANE), D)
    orbit = tuple(parse_field(t, UPPER_HALF_PLANE)
                  for t in ("x*d/dx", "y*d/dx", "d/dx", "x*d/dx + y*d/dy"))
    incomplete = tuple(parse_field(t, UPPER_HALF_PLANE) for t in ("x*d/dy", "d/dy"))
    return EtaleExample(D, conn, orbit, incomplete,
                        tuple(lift_through_etale(X, D) for X in orbit),
                        tuple(lift_through_etale(X, D) for X in incomplete))

