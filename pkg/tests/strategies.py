"""Hypothesis strategies shared by the test modules."""
from fractions import Fraction

from hypothesis import strategies as st

from flataffine.connection import AffineMap
from flataffine.exppoly import ExpPoly, VectorField
from flataffine.scalars import Scalar

small_ints = st.integers(-4, 4)
rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


@st.composite
def polys(draw, names=("E", "L"), max_terms=3):
    total = Scalar(0)
    for _ in range(draw(st.integers(0, max_terms))):
        term = Scalar(draw(rationals))
        for name in names:
            term = term * Scalar.param(name) ** draw(st.integers(0, 2))
        total = total + term
    return total


@st.composite
def scalars(draw, names=("E", "L")):
    num = draw(polys(names))
    den = draw(polys(names).filter(lambda s: not s.is_zero))
    return num / den


@st.composite
def rational_matrices(draw, max_rows=4, max_cols=4):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return [[draw(st.sampled_from([0, 0, 1, -1, 2, Fraction(1, 2), 3])) for _ in range(c)] for _ in range(r)]


@st.composite
def exppolys(draw, n=2, max_terms=6, max_power=2, weights=(-1, 0, 1)):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        powers = tuple(draw(st.integers(0, max_power)) for _ in range(n))
        weight = tuple(draw(st.sampled_from(weights)) for _ in range(n))
        terms[(powers, weight)] = draw(st.sampled_from([1, -1, 2, Fraction(1, 3), -3]))
    return ExpPoly(n, terms)


@st.composite
def fields(draw, n=2, **kw):
    return VectorField(tuple(draw(exppolys(n, **kw)) for _ in range(n)))


@st.composite
def rational_affine_maps(draw, n=2):
    # invertible by construction: P * L * U with unit-lower L and nonzero diagonal U
    entry = st.sampled_from([0, 1, -1, 2, Fraction(1, 2)])
    pivot = st.sampled_from([1, -1, 2, Fraction(1, 2), Fraction(-3, 2)])
    Lm = [[1 if i == j else (draw(entry) if i > j else 0) for j in range(n)] for i in range(n)]
    Um = [[draw(pivot) if i == j else (draw(entry) if i < j else 0) for j in range(n)] for i in range(n)]
    A = [[sum(Lm[i][k] * Um[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    if draw(st.booleans()):
        A = A[::-1]
    b = [draw(st.sampled_from([0, 1, -1, Fraction(1, 2)])) for _ in range(n)]
    return AffineMap(A, b)
