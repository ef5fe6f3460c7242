"""Exact coefficients: rational functions over Q in declared formal parameters.

Parameters are treated as independent transcendentals, so two Scalars are
equal only when their reduced forms coincide.  The arithmetic is backed by
sympy's sparse fraction fields; this module adds the parameter registry, a
field-independent canonical key, sign reasoning from positivity flags and
exact Gauss-Jordan elimination.
"""
from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from sympy.polys.domains import QQ
from sympy.polys.fields import FracElement, field

from . import _grammar
from .errors import (DimensionMismatch, DivisionByZeroAtPoint, MissingParam,
                     ParseError, UndecidableSign)

__all__ = [
    "Param", "Scalar", "ScalarMatrix", "declare_param", "get_param",
    "declared_params", "parse_scalar", "scalar_eval", "nullspace", "rank",
    "rref", "solve",
]

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
# Names the function/field grammar uses for coordinates and builtins.
RESERVED_NAMES = frozenset({"x", "y", "z", "exp", "d"}) | {f"x{i}" for i in range(1, 10)}


@dataclass(frozen=True)
class Param:
    name: str
    positive: bool = True


_lock = threading.Lock()
_params: dict[str, Param] = {}
_field = None


def declare_param(name, positive=True):
    """Register a formal parameter; re-declaring with the same flag is a no-op."""
    global _field
    if not isinstance(name, str) or not _NAME_RE.fullmatch(name):
        raise ValueError(f"invalid parameter name {name!r}")
    if name in RESERVED_NAMES:
        raise ValueError(f"{name!r} is reserved for coordinates/builtins")
    with _lock:
        existing = _params.get(name)
        if existing is not None:
            if existing.positive != positive:
                raise ValueError(f"parameter {name!r} already declared with positive={existing.positive}")
            return existing
        p = Param(name, positive)
        _params[name] = p
        _field = field(",".join(_params), QQ)[0]
        return p


def get_param(name):
    try:
        return _params[name]
    except KeyError:
        raise MissingParam(f"undeclared parameter {name!r}") from None


def declared_params():
    return tuple(_params.values())


def _current_field():
    return _field


# E stands for Euler's number in deck actions; always available.
declare_param("E")


def _to_fraction(c):
    return Fraction(int(c.numerator), int(c.denominator))


def _poly_key(poly, names):
    items = []
    for monom, coef in poly.items():
        m = tuple((names[i], e) for i, e in enumerate(monom) if e)
        items.append((m, _to_fraction(coef)))
    items.sort()
    return tuple(items)


class Scalar:
    """Immutable element of Q(params), kept with a monic denominator."""

    # Rational values are kept as a Fraction in _q and lifted into the field
    # only when they meet a parametric operand; that keeps dense rational
    # linear algebra off the slow path.
    __slots__ = ("_fv", "_key", "_q")

    def __init__(self, value=0):
        if isinstance(value, Scalar):
            self._fv, self._key, self._q = value._fv, value._key, value._q
            return
        self._key = None
        if isinstance(value, bool):
            raise TypeError("bool is not a Scalar")
        if isinstance(value, int):
            self._fv, self._q = None, Fraction(value)
            return
        if isinstance(value, Rational):
            self._fv, self._q = None, Fraction(int(value.numerator), int(value.denominator))
            return
        if isinstance(value, FracElement):
            f = value
        elif isinstance(value, str):
            f = parse_scalar(value)._f
        else:
            raise TypeError(f"cannot make a Scalar from {type(value).__name__}")
        self._fv = _normalize(f)
        self._q = _ground_fraction(self._fv)

    @classmethod
    def _wrap(cls, f):
        s = object.__new__(cls)
        s._fv = _normalize(f)
        s._key = None
        s._q = _ground_fraction(s._fv)
        return s

    @classmethod
    def _from_q(cls, q):
        s = object.__new__(cls)
        s._fv, s._key, s._q = None, None, q
        return s

    @property
    def _f(self):
        if self._fv is None:
            q = self._q
            self._fv = _current_field()(QQ(q.numerator, q.denominator))
        return self._fv

    @classmethod
    def param(cls, name):
        get_param(name)
        K = _current_field()
        return cls._wrap(K.gens[list(_params).index(name)])

    # coercion ------------------------------------------------------------
    def _lifted(self):
        K = _current_field()
        f = self._f
        if f.field is K:
            return f
        return K.raw_new(f.numer.set_ring(K.ring), f.denom.set_ring(K.ring))

    @staticmethod
    def _coerce(other):
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            return Scalar(other)
        return None

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._q is not None and o._q is not None:
            return Scalar._from_q(self._q + o._q)
        return Scalar._wrap(self._lifted() + o._lifted())

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._q is not None and o._q is not None:
            return Scalar._from_q(self._q - o._q)
        return Scalar._wrap(self._lifted() - o._lifted())

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._q is not None and o._q is not None:
            return Scalar._from_q(self._q * o._q)
        return Scalar._wrap(self._lifted() * o._lifted())

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            raise ZeroDivisionError("division by the zero Scalar")
        if self._q is not None and o._q is not None:
            return Scalar._from_q(self._q / o._q)
        return Scalar._wrap(self._lifted() / o._lifted())

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        if self._q is not None:
            return Scalar._from_q(-self._q)
        return Scalar._wrap(-self._f)

    def __pos__(self):
        return self

    def __pow__(self, k):
        if not isinstance(k, int) or isinstance(k, bool):
            return NotImplemented
        if k < 0 and self.is_zero:
            raise ZeroDivisionError("zero to a negative power")
        if self._q is not None:
            return Scalar._from_q(self._q ** k)
        return Scalar._wrap(self._f ** k)

    def inverse(self):
        return Scalar(1) / self

    # comparison ------------------------------------------------------------
    @property
    def key(self):
        """Canonical form independent of which parameters were declared when."""
        if self._key is None and self._q is not None:
            q = self._q
            self._key = ((((), q),) if q else (), (((), Fraction(1)),))
        if self._key is None:
            names = [str(s) for s in self._f.field.symbols]
            self._key = (_poly_key(self._f.numer, names), _poly_key(self._f.denom, names))
        return self._key

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.key == o.key

    def __hash__(self):
        return hash(self.key)

    def __bool__(self):
        return not self.is_zero

    @property
    def is_zero(self):
        if self._q is not None:
            return not self._q
        return not self._f.numer

    @property
    def is_one(self):
        return self.key == ((((), Fraction(1)),), (((), Fraction(1)),))

    @property
    def is_rational(self):
        return all(not m for m, _ in self.key[0]) and all(not m for m, _ in self.key[1])

    def to_fraction(self):
        if not self.is_rational:
            raise ValueError(f"{self} depends on parameters")
        num = self.key[0][0][1] if self.key[0] else Fraction(0)
        return num / self.key[1][0][1]

    @property
    def free_params(self):
        names = set()
        for part in self.key:
            for m, _ in part:
                names.update(n for n, _ in m)
        return frozenset(names)

    @property
    def degree(self):
        """Total degree of numerator plus denominator; used for pivot choice."""
        def deg(part):
            return max((sum(e for _, e in m) for m, _ in part), default=0)
        return deg(self.key[0]) + deg(self.key[1])

    # evaluation ------------------------------------------------------------
    def evaluate(self, assignment=None):
        """Exact value at rational parameter values (keys: names or Params)."""
        values = _assignment(assignment)
        num = _eval_part(self.key[0], values, Fraction)
        den = _eval_part(self.key[1], values, Fraction)
        if den == 0:
            raise DivisionByZeroAtPoint(f"denominator of {self} vanishes at {values}")
        return num / den

    def evaluate_float(self, values):
        num = _eval_part(self.key[0], values, float)
        den = _eval_part(self.key[1], values, float)
        if den == 0:
            raise DivisionByZeroAtPoint(f"denominator of {self} vanishes at {values}")
        return num / den

    def sign(self):
        """Sign of the Scalar deduced from positivity flags of its parameters.

        Decided only when numerator and denominator each have coefficients of
        a single sign and every parameter involved is declared positive.
        """
        if self.is_zero:
            return 0
        for name in self.free_params:
            if not get_param(name).positive:
                raise UndecidableSign(f"sign of {self}: {name} has no positivity flag")
        result = 1
        for part in self.key:
            signs = {c > 0 for _, c in part}
            if len(signs) != 1:
                raise UndecidableSign(f"sign of {self} is not determined by positivity")
            if signs == {False}:
                result = -result
        return result

    # printing ------------------------------------------------------------
    def __str__(self):
        num, den = self.key
        if den == (((), Fraction(1)),):
            return _format_poly(num)
        # display with a primitive integer denominator instead of a monic one
        lcm = math.lcm(*(c.denominator for _, c in den))
        g = math.gcd(*(int(c * lcm) for _, c in den))
        scale = Fraction(lcm, g)
        num = tuple((m, c * scale) for m, c in num)
        den = tuple((m, c * scale) for m, c in den)
        text = _format_poly(num)
        if len(num) > 1:
            text = f"({text})"
        dtext = _format_poly(den)
        if len(den) > 1 or not _SIMPLE_DEN.fullmatch(dtext):
            dtext = f"({dtext})"
        return f"{text}/{dtext}"

    def __repr__(self):
        return f"Scalar('{self}')"


_SIMPLE_DEN = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


def _ground_fraction(f):
    """The Fraction value of a parameter-free field element, else None."""
    if f.numer.is_ground and f.denom.is_ground:
        return _to_fraction(f.numer.LC) / _to_fraction(f.denom.LC)
    return None


def _normalize(f):
    lc = f.denom.LC
    if lc == 1:
        return f
    return f.field.raw_new(f.numer.quo_ground(lc), f.denom.monic())


def _assignment(assignment):
    values = {}
    for k, v in (assignment or {}).items():
        name = k.name if isinstance(k, Param) else k
        values[name] = v if isinstance(v, Fraction) else Fraction(v)
    return values


def _eval_part(part, values, conv):
    total = conv(0)
    for monom, coef in part:
        term = conv(coef)
        for name, e in monom:
            if name not in values:
                raise MissingParam(f"no value for parameter {name!r}")
            term *= conv(values[name]) ** e
        total += term
    return total


def _format_rational(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _format_poly(part):
    if not part:
        return "0"
    # descending total degree reads naturally
    ordered = sorted(part, key=lambda t: (-sum(e for _, e in t[0]), t[0]))
    pieces = []
    for i, (monom, coef) in enumerate(ordered):
        mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in monom)
        neg = coef < 0
        mag = -coef if neg else coef
        if mono:
            if mag == 1:
                body = mono
            elif mag.denominator == 1:
                body = f"{mag.numerator}*{mono}"
            else:
                body = f"{mag.numerator}/{mag.denominator}*{mono}"
        else:
            body = _format_rational(mag)
        if i == 0:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f" - {body}" if neg else f" + {body}")
    return "".join(pieces)


# literal parsing -----------------------------------------------------------

def _eval_scalar_ast(node, text):
    kind = node[0]
    if kind == "num":
        return Scalar(node[1])
    if kind == "name":
        if node[1] not in _params:
            raise ParseError(f"undeclared parameter {node[1]!r}", node[2], text)
        return Scalar.param(node[1])
    if kind == "neg":
        return -_eval_scalar_ast(node[1], text)
    if kind in ("add", "sub", "mul", "div"):
        a = _eval_scalar_ast(node[1], text)
        b = _eval_scalar_ast(node[2], text)
        if kind == "add":
            return a + b
        if kind == "sub":
            return a - b
        if kind == "mul":
            return a * b
        if b.is_zero:
            raise ParseError("division by zero", node[3], text)
        return a / b
    if kind == "pow":
        base = _eval_scalar_ast(node[1], text)
        if node[2] < 0 and base.is_zero:
            raise ParseError("zero to a negative power", node[3], text)
        return base ** node[2]
    if kind == "deriv":
        raise ParseError("derivation symbols are not allowed in a scalar", node[2], text)
    raise ParseError(f"function call {node[1]!r} not allowed in a scalar", node[3], text)


def parse_scalar(text):
    """Parse a scalar literal such as ``"(L-1)/(L+1)"`` or ``"E^2/3"``."""
    if isinstance(text, (int, Fraction)):
        return Scalar(text)
    return _eval_scalar_ast(_grammar.parse(text), text)


def scalar_eval(s, assignment=None):
    return Scalar(s).evaluate(assignment)


# matrices --------------------------------------------------------------------

class ScalarMatrix:
    """Rectangular immutable grid of Scalars."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries, cols=None):
        entries = tuple(tuple(Scalar(e) for e in row) for row in entries)
        if cols is None:
            cols = len(entries[0]) if entries else 0
        if any(len(r) != cols for r in entries):
            raise DimensionMismatch("matrix rows have different lengths")
        self.entries = entries
        self.rows = len(entries)
        self.cols = cols

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, rows, cols):
        return cls([[0] * cols for _ in range(rows)], cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def column(self, j):
        return tuple(r[j] for r in self.entries)

    @property
    def T(self):
        return ScalarMatrix([self.column(j) for j in range(self.cols)], self.rows)

    def __eq__(self, other):
        if not isinstance(other, ScalarMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __add__(self, other):
        self._same_shape(other)
        return ScalarMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols)

    def __sub__(self, other):
        self._same_shape(other)
        return ScalarMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols)

    def scale(self, c):
        c = Scalar(c)
        return ScalarMatrix([[c * a for a in r] for r in self.entries], self.cols)

    def __matmul__(self, other):
        if isinstance(other, ScalarMatrix):
            if self.cols != other.rows:
                raise DimensionMismatch(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
            cols = [other.column(j) for j in range(other.cols)]
            return ScalarMatrix([[_dot(r, c) for c in cols] for r in self.entries], other.cols)
        vec = tuple(Scalar(v) for v in other)
        if len(vec) != self.cols:
            raise DimensionMismatch("matrix-vector length mismatch")
        return tuple(_dot(r, vec) for r in self.entries)

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix shapes differ")

    def det(self):
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        m = [list(r) for r in self.entries]
        n = self.rows
        det = Scalar(1)
        for c in range(n):
            p = next((r for r in range(c, n) if m[r][c]), None)
            if p is None:
                return Scalar(0)
            if p != c:
                m[c], m[p] = m[p], m[c]
                det = -det
            det = det * m[c][c]
            inv = m[c][c].inverse()
            for r in range(c + 1, n):
                if m[r][c]:
                    f = m[r][c] * inv
                    m[r] = [a - f * b for a, b in zip(m[r], m[c])]
        return det

    def inverse(self):
        n = self.rows
        if n != self.cols:
            raise DimensionMismatch("inverse of a non-square matrix")
        aug = ScalarMatrix([list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(self.entries)])
        red, pivots = rref(aug)
        if pivots != tuple(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return ScalarMatrix([r[n:] for r in red.entries[:n]], n)

    def evaluate_float(self, values):
        return [[e.evaluate_float(values) for e in r] for r in self.entries]

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in r) for r in self.entries)
        return f"ScalarMatrix([{body}])"


def _dot(a, b):
    total = Scalar(0)
    for x, y in zip(a, b):
        if x and y:
            total = total + x * y
    return total


def _as_matrix(M):
    return M if isinstance(M, ScalarMatrix) else ScalarMatrix(M)


def rref(M):
    """Reduced row echelon form and pivot columns.

    Within each column the pivot is the nonzero entry of lowest degree,
    ties broken by row order.  The reduced form is unique, the pivot rule
    only keeps intermediate expressions small.
    """
    M = _as_matrix(M)
    m = [list(r) for r in M.entries]
    pivots = []
    r = 0
    for c in range(M.cols):
        if r >= M.rows:
            break
        candidates = [(m[i][c].degree, i) for i in range(r, M.rows) if m[i][c]]
        if not candidates:
            continue
        _, p = min(candidates)
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        m[r] = [a * inv if a else a for a in m[r]]
        for i in range(M.rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b if b else a for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return ScalarMatrix(m, M.cols), tuple(pivots)


def rank(M):
    return len(rref(M)[1])


def nullspace(M):
    """Basis of {v : M v = 0}, one vector per free column in increasing order."""
    M = _as_matrix(M)
    red, pivots = rref(M)
    free = [c for c in range(M.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Scalar(0)] * M.cols
        v[f] = Scalar(1)
        for row, pc in enumerate(pivots):
            v[pc] = -red[row, f]
        basis.append(tuple(v))
    return basis


def solve(M, b):
    """One solution x of M x = b (free variables set to zero), or None."""
    M = _as_matrix(M)
    b = tuple(Scalar(v) for v in b)
    if len(b) != M.rows:
        raise DimensionMismatch("right-hand side length differs from row count")
    aug = ScalarMatrix([list(r) + [bi] for r, bi in zip(M.entries, b)], M.cols + 1)
    red, pivots = rref(aug)
    if pivots and pivots[-1] == M.cols:
        return None
    x = [Scalar(0)] * M.cols
    for row, pc in enumerate(pivots):
        x[pc] = red[row, M.cols]
    return tuple(x)
