"""Exponential polynomials, coordinate domains and vector fields.

An ExpPoly in n variables is a finite sum of terms ``c * x^a * exp(<w, x>)``
with ``a`` a tuple of non-negative integers, ``w`` a tuple of rationals and
``c`` a Scalar.  The algebra is closed under addition, multiplication and
partial derivatives.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction

from . import _grammar
from .errors import (CompositionOutsideAlgebra, DimensionMismatch,
                     IndexOutOfRange, ParseError, PointOutsideDomain,
                     WeightParameterConflict)
from .scalars import Scalar, declared_params, parse_scalar

__all__ = [
    "Domain", "ExpPoly", "VectorField", "coordinate_names", "parse_function",
    "parse_field", "ep_arith", "ep_diff", "ep_compose_affine",
    "exppoly_to_json", "exppoly_from_json", "field_to_json", "format_exppoly",
    "format_field", "require_in_domain", "UPPER_HALF_PLANE", "QUADRANT",
    "PUNCTURED_PLANE",
]


def coordinate_names(n):
    if n == 1:
        return ("x",)
    if n == 2:
        return ("x", "y")
    if n == 3:
        return ("x", "y", "z")
    return tuple(f"x{i}" for i in range(1, n + 1))


# domains ---------------------------------------------------------------------

_DOMAIN_KINDS = ("FullSpace", "UpperHalfPlane", "Quadrant", "PuncturedPlane")


@dataclass(frozen=True)
class Domain:
    kind: str
    dim: int = 2

    def __post_init__(self):
        if self.kind not in _DOMAIN_KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind != "FullSpace" and self.dim != 2:
            raise ValueError(f"{self.kind} is two-dimensional")
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    @classmethod
    def full(cls, n=2):
        return cls("FullSpace", n)

    def contains(self, p):
        if len(p) != self.dim:
            raise DimensionMismatch(f"point of length {len(p)} in a {self.dim}-dimensional domain")
        if self.kind == "FullSpace":
            return True
        x, y = p
        if self.kind == "UpperHalfPlane":
            return y > 0
        if self.kind == "Quadrant":
            return x > 0 and y > 0
        return x != 0 or y != 0

    def __str__(self):
        return f"FullSpace({self.dim})" if self.kind == "FullSpace" else self.kind

    @classmethod
    def parse(cls, text):
        text = text.strip()
        m = re.fullmatch(r"FullSpace\((\d+)\)", text)
        if m:
            return cls("FullSpace", int(m.group(1)))
        if text in _DOMAIN_KINDS[1:]:
            return cls(text, 2)
        raise ParseError(f"unknown domain {text!r}")


UPPER_HALF_PLANE = Domain("UpperHalfPlane")
QUADRANT = Domain("Quadrant")
PUNCTURED_PLANE = Domain("PuncturedPlane")


# exponential polynomials -----------------------------------------------------

def _frac_tuple(ws):
    return tuple(w if isinstance(w, Fraction) else Fraction(w) for w in ws)


class ExpPoly:
    """Immutable exponential polynomial; terms keyed by (powers, weight)."""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n, terms=None):
        self.n = n
        clean = {}
        for (powers, weight), coef in (terms or {}).items():
            powers = tuple(int(a) for a in powers)
            weight = _frac_tuple(weight)
            if len(powers) != n or len(weight) != n:
                raise DimensionMismatch(f"term key of wrong length for n={n}")
            if any(a < 0 for a in powers):
                raise ValueError("negative power in exponential polynomial")
            coef = Scalar(coef)
            key = (powers, weight)
            total = clean.get(key)
            coef = coef if total is None else total + coef
            if coef:
                clean[key] = coef
            else:
                clean.pop(key, None)
        self._terms = dict(sorted(clean.items()))
        self._hash = None

    @classmethod
    def _raw(cls, n, terms):
        obj = object.__new__(cls)
        obj.n = n
        obj._terms = dict(sorted(terms.items()))
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def zero(cls, n):
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n, c):
        c = Scalar(c)
        return cls._raw(n, {((0,) * n, (Fraction(0),) * n): c} if c else {})

    @classmethod
    def coordinate(cls, n, i):
        if not 0 <= i < n:
            raise IndexOutOfRange(f"coordinate {i} out of range for n={n}")
        powers = tuple(1 if k == i else 0 for k in range(n))
        return cls._raw(n, {(powers, (Fraction(0),) * n): Scalar(1)})

    @classmethod
    def monomial(cls, n, powers, weight=None, coef=1):
        weight = (0,) * n if weight is None else weight
        return cls(n, {(tuple(powers), tuple(weight)): coef})

    # inspection
    @property
    def terms(self):
        return self._terms

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    @property
    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    @property
    def weights(self):
        return frozenset(w for _, w in self._terms)

    @property
    def degree(self):
        return max((sum(p) for p, _ in self._terms), default=0)

    @property
    def is_polynomial(self):
        return all(not any(w) for _, w in self._terms)

    @property
    def is_constant(self):
        return all(not any(p) and not any(w) for p, w in self._terms)

    def constant_value(self):
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        return next(iter(self._terms.values()), Scalar(0))

    @property
    def free_params(self):
        out = set()
        for c in self._terms.values():
            out |= c.free_params
        return frozenset(out)

    def __eq__(self, other):
        if isinstance(other, ExpPoly):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction, Scalar)):
            return self == ExpPoly.constant(self.n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, ExpPoly):
            if other.n != self.n:
                raise DimensionMismatch(f"ExpPoly dimensions {self.n} and {other.n}")
            return other
        if isinstance(other, (int, Fraction, Scalar)) and not isinstance(other, bool):
            return ExpPoly.constant(self.n, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for k, c in o._terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return ExpPoly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly._raw(self.n, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)) and not isinstance(other, bool):
            return self.scale(other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = {}
        for (p1, w1), c1 in self._terms.items():
            for (p2, w2), c2 in o._terms.items():
                k = (tuple(a + b for a, b in zip(p1, p2)), tuple(a + b for a, b in zip(w1, w2)))
                s = out.get(k)
                prod = c1 * c2
                s = prod if s is None else s + prod
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return ExpPoly._raw(self.n, out)

    __rmul__ = __mul__

    def scale(self, c):
        c = Scalar(c)
        if not c:
            return ExpPoly.zero(self.n)
        return ExpPoly._raw(self.n, {k: c * v for k, v in self._terms.items()})

    def __truediv__(self, c):
        if isinstance(c, ExpPoly):
            c = c.constant_value()
        return self.scale(Scalar(1) / Scalar(c))

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("ExpPoly powers must be non-negative integers")
        out = ExpPoly.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def diff(self, i):
        """Partial derivative in coordinate ``i`` (0-based)."""
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"coordinate index {i} out of range for n={self.n}")
        out = {}
        for (p, w), c in self._terms.items():
            if p[i]:
                k = (p[:i] + (p[i] - 1,) + p[i + 1:], w)
                v = c * p[i]
                s = out.get(k)
                out[k] = v if s is None else s + v
            if w[i]:
                k = (p, w)
                v = c * w[i]
                s = out.get(k)
                out[k] = v if s is None else s + v
        return ExpPoly._raw(self.n, {k: v for k, v in out.items() if v})

    # composition
    def compose(self, F):
        """Substitute x -> F(x) for a tuple F of n ExpPolys in m variables.

        Exponential terms need ``<w, F(x)>`` to be a linear form with
        rational coefficients and no constant part; otherwise the result is
        not an exponential polynomial.
        """
        F = tuple(F)
        if len(F) != self.n:
            raise DimensionMismatch(f"composition needs {self.n} components, got {len(F)}")
        m = F[0].n if F else 0
        cache = {}

        def power(i, a):
            if (i, a) not in cache:
                cache[(i, a)] = F[i] ** a
            return cache[(i, a)]

        total = ExpPoly.zero(m)
        for (p, w), c in self._terms.items():
            term = ExpPoly.constant(m, c)
            for i, a in enumerate(p):
                if a:
                    term = term * power(i, a)
            if any(w):
                term = term * _exp_of_linear(sum((F[i].scale(wi) for i, wi in enumerate(w) if wi),
                                                 ExpPoly.zero(m)))
            total = total + term
        return total

    def compose_affine(self, T):
        """f o T for an affine map T = (A, b); see ``ep_compose_affine``."""
        from .connection import AffineMap
        if not isinstance(T, AffineMap):
            raise TypeError("compose_affine expects an AffineMap")
        try:
            return self.compose(T.components())
        except WeightParameterConflict:
            raise
        except CompositionOutsideAlgebra as exc:
            raise WeightParameterConflict(str(exc)) from None

    # evaluation
    def evaluate(self, point, values=None):
        """Float value at ``point``; ``values`` maps parameter names to floats."""
        values = values or {}
        total = 0.0
        for (p, w), c in self._terms.items():
            v = c.evaluate_float(values)
            for xi, a in zip(point, p):
                if a:
                    v *= xi ** a
            arg = sum(float(wi) * xi for wi, xi in zip(w, point) if wi)
            if arg:
                v *= math.exp(arg)
            total += v
        return total

    def evaluate_exact(self, point, assignment=None):
        if not self.is_polynomial:
            raise ValueError("exact evaluation needs a polynomial (zero weights)")
        point = [Fraction(v) for v in point]
        total = Fraction(0)
        for (p, _), c in self._terms.items():
            v = c.evaluate(assignment)
            for xi, a in zip(point, p):
                v *= xi ** a
            total += v
        return total

    def compile(self, values=None):
        """Fast float evaluator ``f(point) -> float`` with parameters bound."""
        values = values or {}
        terms = [(c.evaluate_float(values),
                  tuple((i, a) for i, a in enumerate(p) if a),
                  tuple((i, float(wi)) for i, wi in enumerate(w) if wi))
                 for (p, w), c in self._terms.items()]
        exp = math.exp

        def f(point):
            total = 0.0
            for c, pw, ws in terms:
                v = c
                for i, a in pw:
                    v *= point[i] ** a
                if ws:
                    v *= exp(sum(wi * point[i] for i, wi in ws))
                total += v
            return total

        return f

    # printing
    def __str__(self):
        return format_exppoly(self)

    def __repr__(self):
        return f"ExpPoly({self.n}, '{self}')"


def _exp_of_linear(arg):
    """exp(arg) as an ExpPoly when arg is a rational linear form."""
    n = arg.n
    weight = [Fraction(0)] * n
    for (p, w), c in arg.items():
        if any(w) or sum(p) != 1:
            if not any(p) and not any(w):
                raise WeightParameterConflict(
                    f"exp of a nonzero constant ({c}) is not an exact Scalar")
            raise CompositionOutsideAlgebra(f"exp({arg}) leaves the exponential-polynomial algebra")
        if not c.is_rational:
            raise WeightParameterConflict(f"exponential weight {c} depends on parameters")
        weight[p.index(1)] = c.to_fraction()
    return ExpPoly.monomial(n, (0,) * n, weight, 1)


def ep_arith(f, g, op):
    if f.n != g.n:
        raise DimensionMismatch(f"ExpPoly dimensions {f.n} and {g.n}")
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown operation {op!r}")


def ep_diff(f, i):
    return f.diff(i)


def ep_compose_affine(f, T):
    """f o T.  Exponential terms require ``w^T A`` rational and ``<w, b> = 0``.

    A nonzero ``<w, b>`` would need the Scalar ``exp(<w, b>)``, which is not
    representable, so it is rejected like a parametric weight.
    """
    return f.compose_affine(T)


# printing --------------------------------------------------------------------

_SIMPLE_COEF = re.compile(r"-?[A-Za-z0-9_]+(?:\^\d+)?(?:\*[A-Za-z0-9_]+(?:\^\d+)?)*")


def _format_weight(weight, names):
    pieces = []
    for wi, name in zip(weight, names):
        if not wi:
            continue
        if wi == 1:
            s = name
        elif wi == -1:
            s = f"-{name}"
        elif wi.denominator == 1:
            s = f"{wi.numerator}*{name}"
        else:
            s = f"({wi.numerator}/{wi.denominator})*{name}"
        pieces.append(s)
    return "exp(" + "+".join(pieces).replace("+-", "-") + ")"


def _format_term(powers, weight, coef, names):
    factors = [n if a == 1 else f"{n}^{a}" for n, a in zip(names, powers) if a]
    if any(weight):
        factors.append(_format_weight(weight, names))
    cs = str(coef)
    neg = False
    if cs.startswith("-") and (coef.is_rational or _SIMPLE_COEF.fullmatch(cs)):
        neg = True
        cs = str(-coef)
    if not factors:
        return neg, cs
    if cs == "1":
        return neg, "*".join(factors)
    if not _SIMPLE_COEF.fullmatch(cs):
        cs = f"({cs})"
    return neg, "*".join([cs] + factors)


def format_exppoly(f, names=None):
    names = names or coordinate_names(f.n)
    if f.is_zero:
        return "0"
    out = []
    for i, ((p, w), c) in enumerate(f.items()):
        neg, body = _format_term(p, w, c, names)
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


# vector fields -----------------------------------------------------------------

@dataclass(frozen=True)
class VectorField:
    components: tuple
    domain: Domain = None

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        n = len(comps)
        if self.domain is None:
            object.__setattr__(self, "domain", Domain.full(n))
        if self.domain.dim != n:
            raise DimensionMismatch(f"{n} components on a {self.domain.dim}-dimensional domain")
        if any(not isinstance(c, ExpPoly) or c.n != n for c in comps):
            raise DimensionMismatch("every component must be an ExpPoly in n variables")

    @property
    def n(self):
        return len(self.components)

    @classmethod
    def zero(cls, n, domain=None):
        return cls(tuple(ExpPoly.zero(n) for _ in range(n)), domain)

    @classmethod
    def coordinate(cls, n, i, domain=None):
        """The coordinate field d/dx_i."""
        return cls(tuple(ExpPoly.constant(n, 1 if k == i else 0) for k in range(n)), domain)

    def __getitem__(self, i):
        return self.components[i]

    @property
    def is_zero(self):
        return all(c.is_zero for c in self.components)

    def _check(self, other):
        if other.n != self.n:
            raise DimensionMismatch("vector fields of different dimensions")

    def __add__(self, other):
        self._check(other)
        return VectorField(tuple(a + b for a, b in zip(self.components, other.components)), self.domain)

    def __sub__(self, other):
        self._check(other)
        return VectorField(tuple(a - b for a, b in zip(self.components, other.components)), self.domain)

    def __neg__(self):
        return VectorField(tuple(-a for a in self.components), self.domain)

    def scale(self, f):
        """Multiply by a Scalar or an ExpPoly function."""
        return VectorField(tuple(c * f for c in self.components), self.domain)

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def with_domain(self, domain):
        return VectorField(self.components, domain)

    def apply(self, f):
        """Directional derivative X(f) = sum_i X^i d_i f."""
        total = ExpPoly.zero(self.n)
        for i, c in enumerate(self.components):
            if c:
                d = f.diff(i)
                if d:
                    total = total + c * d
        return total

    def bracket(self, other):
        """Lie bracket [X, Y]^k = X(Y^k) - Y(X^k)."""
        self._check(other)
        return VectorField(tuple(self.apply(b) - other.apply(a)
                                 for a, b in zip(self.components, other.components)), self.domain)

    def compose(self, F):
        return tuple(c.compose(F) for c in self.components)

    @property
    def is_affine(self):
        return all(c.is_polynomial and c.degree <= 1 for c in self.components)

    @property
    def degree(self):
        return max(c.degree for c in self.components)

    def weights(self):
        out = set()
        for c in self.components:
            out |= c.weights
        return out

    def compile(self, values=None):
        fs = [c.compile(values) for c in self.components]
        return lambda p: [f(p) for f in fs]

    def evaluate(self, point, values=None):
        return [c.evaluate(point, values) for c in self.components]

    def __str__(self):
        return format_field(self)

    def __repr__(self):
        return f"VectorField('{self}', domain={self.domain})"


def format_field(X, names=None):
    names = names or coordinate_names(X.n)
    pieces = []
    for c, name in zip(X.components, names):
        if c.is_zero:
            continue
        body = format_exppoly(c, names)
        neg = False
        if len(c) == 1:
            (p, w), coef = next(iter(c.items()))
            neg, body = _format_term(p, w, coef, names)
        else:
            body = f"({body})"
        pieces.append((neg, f"d/d{name}" if body == "1" else f"{body}*d/d{name}"))
    if not pieces:
        return "0"
    out = []
    for i, (neg, body) in enumerate(pieces):
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


# literal evaluation ------------------------------------------------------------

class _Val:
    """Parser value: function part plus optional vector part."""

    __slots__ = ("f", "v")

    def __init__(self, f, v=None):
        self.f = f
        self.v = v

    @property
    def has_vec(self):
        return self.v is not None and any(c for c in self.v)


def _eval_ast(node, n, names, text):
    kind = node[0]
    if kind == "num":
        return _Val(ExpPoly.constant(n, node[1]))
    if kind == "name":
        name = node[1]
        if name in names:
            return _Val(ExpPoly.coordinate(n, names.index(name)))
        if name in {p.name for p in declared_params()}:
            return _Val(ExpPoly.constant(n, Scalar.param(name)))
        raise ParseError(f"unknown identifier {name!r}", node[2], text)
    if kind == "deriv":
        if node[1] not in names:
            raise ParseError(f"d/d{node[1]} is not a coordinate derivation", node[2], text)
        i = names.index(node[1])
        vec = [ExpPoly.zero(n)] * n
        vec[i] = ExpPoly.constant(n, 1)
        return _Val(ExpPoly.zero(n), vec)
    if kind == "neg":
        a = _eval_ast(node[1], n, names, text)
        return _Val(-a.f, None if a.v is None else [-c for c in a.v])
    if kind in ("add", "sub"):
        a = _eval_ast(node[1], n, names, text)
        b = _eval_ast(node[2], n, names, text)
        sign = 1 if kind == "add" else -1
        f = a.f + b.f if sign == 1 else a.f - b.f
        if a.v is None and b.v is None:
            return _Val(f)
        av = a.v or [ExpPoly.zero(n)] * n
        bv = b.v or [ExpPoly.zero(n)] * n
        return _Val(f, [x + y if sign == 1 else x - y for x, y in zip(av, bv)])
    if kind == "mul":
        a = _eval_ast(node[1], n, names, text)
        b = _eval_ast(node[2], n, names, text)
        if a.has_vec and b.has_vec:
            raise ParseError("product of two derivations", node[3], text)
        vec = None
        if a.has_vec or b.has_vec:
            vec = [x * b.f for x in a.v] if a.has_vec else [a.f * y for y in b.v]
        return _Val(a.f * b.f, vec)
    if kind == "div":
        a = _eval_ast(node[1], n, names, text)
        b = _eval_ast(node[2], n, names, text)
        if b.has_vec or not b.f.is_constant or b.f.is_zero:
            raise ParseError("can only divide by a nonzero constant", node[3], text)
        c = b.f.constant_value()
        return _Val(a.f / c, None if a.v is None else [x / c for x in a.v])
    if kind == "pow":
        a = _eval_ast(node[1], n, names, text)
        k = node[2]
        if a.has_vec:
            raise ParseError("power of a derivation", node[3], text)
        if k < 0:
            if not a.f.is_constant or a.f.is_zero:
                raise ParseError("negative powers only of nonzero constants", node[3], text)
            return _Val(ExpPoly.constant(n, a.f.constant_value() ** k))
        return _Val(a.f ** k)
    if kind == "call":
        if node[1] != "exp":
            raise ParseError(f"unknown function {node[1]!r}", node[3], text)
        a = _eval_ast(node[2], n, names, text)
        if a.has_vec:
            raise ParseError("exp of a derivation", node[3], text)
        if a.f.is_zero:
            return _Val(ExpPoly.constant(n, 1))
        try:
            return _Val(_exp_of_linear(a.f))
        except CompositionOutsideAlgebra as exc:
            raise ParseError(f"exp argument must be a rational linear form: {exc}", node[3], text) from None
    raise ParseError(f"unsupported syntax {kind}", None, text)


def parse_function(text, n=2, names=None):
    """Parse an exponential-polynomial literal such as ``"x*exp(-x) + E*y^2"``."""
    names = tuple(names or coordinate_names(n))
    val = _eval_ast(_grammar.parse(text), n, names, text)
    if val.has_vec:
        raise ParseError("function literal contains derivations", 0, text)
    return val.f


def parse_field(text, domain=None, names=None):
    """Parse a vector-field literal such as ``"y*d/dx - y^2*d/dy"``."""
    domain = domain or Domain.full(2)
    n = domain.dim
    names = tuple(names or coordinate_names(n))
    val = _eval_ast(_grammar.parse(text), n, names, text)
    if not val.f.is_zero:
        raise ParseError("field literal has a term without d/d<coord>", 0, text)
    comps = val.v if val.v is not None else [ExpPoly.zero(n)] * n
    return VectorField(tuple(comps), domain)


# JSON --------------------------------------------------------------------------

def _weight_json(w):
    return w.numerator if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


def exppoly_to_json(f):
    return [{"coef": str(c), "powers": list(p), "weight": [_weight_json(w) for w in ws]}
            for (p, ws), c in f.items()]


def exppoly_from_json(obj, n=None):
    """Accepts the term-list form or a function literal string."""
    if isinstance(obj, str):
        return parse_function(obj, n or 2)
    if not isinstance(obj, list):
        raise ParseError("an ExpPoly must be a list of terms or a literal string")
    terms = {}
    for t in obj:
        try:
            powers = tuple(int(a) for a in t["powers"])
            weight = tuple(Fraction(str(w)) for w in t["weight"])
            coef = parse_scalar(str(t["coef"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed ExpPoly term {t!r}: {exc}") from None
        if n is not None and len(powers) != n:
            raise DimensionMismatch(f"term {t!r} has the wrong length for n={n}")
        key = (powers, weight)
        terms[key] = terms.get(key, Scalar(0)) + coef
    if n is None:
        if not terms:
            raise ParseError("cannot infer dimension of an empty term list")
        n = len(next(iter(terms))[0])
    return ExpPoly(n, terms)


def field_to_json(X):
    return {"domain": str(X.domain), "components": [exppoly_to_json(c) for c in X.components],
            "literal": str(X)}


def dumps_exppoly(f):
    return json.dumps(exppoly_to_json(f))


def require_in_domain(domain, p):
    if not domain.contains(p):
        raise PointOutsideDomain(f"{tuple(p)} is outside {domain}")
