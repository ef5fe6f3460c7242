import random

import numpy as np
import pytest
from hypothesis import given

from flataffine.connection import AffineMap
from flataffine.deck import (DeckAction, ambient_basis, catalog_keys, invariant_subalgebra,
                             is_invariant_field, lift_through_etale, preserves_domain,
                             pushforward_affine_field, pushforward_field, pushforward_through,
                             representation_matrix, span_equal, surface_catalog)
from flataffine.errors import (ClosureViolation, NotAffineField, UndecidableSign, UnknownSurface,
                               WeightParameterConflict)
from flataffine.exppoly import (PUNCTURED_PLANE, QUADRANT, UPPER_HALF_PLANE, Domain, VectorField,
                                parse_field)
from flataffine.scalars import ScalarMatrix, declare_param

from conftest import NUMERIC_ENV
from strategies import rational_affine_maps

F = parse_field
EXPECTED_DIMS = {
    "torus:1": 2, "torus:2": 2, "torus:3": 2, "torus:4": 2, "torus:5": 2, "torus:6": 4,
    "klein:1": 1, "klein:2": 1, "klein:3": 1, "klein:4": 1, "klein:5": 1, "klein:6": 2,
    "cylinder:1": 4, "cylinder:2": 2, "cylinder:3": 3, "cylinder:4": 3, "cylinder:5": 3,
    "cylinder:6": 3, "cylinder:7": 2, "cylinder:8": 4,
    "mobius:1": 2, "mobius:2": 2, "mobius:3": 2, "mobius:4": 2, "mobius:5": 1,
}


def rows(*r):
    return AffineMap.from_rows(list(r))


# domain preservation

def test_preserves_domain_examples():
    assert preserves_domain(rows([1, 0, 1], [0, "E", 0]), UPPER_HALF_PLANE)
    assert preserves_domain(rows(["E", 0, 0], [0, "1/E", 0]), QUADRANT)
    assert preserves_domain(rows([-1, 0, 0], [0, 1, 0]), UPPER_HALF_PLANE)


def test_preserves_domain_negatives():
    assert not preserves_domain(rows([1, 0, 0], [0, -1, 0]), UPPER_HALF_PLANE)
    assert not preserves_domain(rows([1, 0, 0], [1, 1, 0]), UPPER_HALF_PLANE)
    assert not preserves_domain(rows([1, 0, 0], [0, 1, 1]), UPPER_HALF_PLANE)
    assert not preserves_domain(rows([-1, 0, 0], [0, 1, 0]), QUADRANT)
    assert not preserves_domain(rows([1, 0, 1], [0, 1, 0]), QUADRANT)
    assert not preserves_domain(rows([1, 0, 1], [0, 1, 0]), PUNCTURED_PLANE)
    assert preserves_domain(rows([0, 1, 0], [1, 0, 0]), QUADRANT)
    assert preserves_domain(rows([2, 3, 0], [5, 7, 0]), PUNCTURED_PLANE)


def test_preserves_domain_undecidable():
    declare_param("Unsigned", positive=False)
    with pytest.raises(UndecidableSign):
        preserves_domain(rows([1, 0, 0], [0, "Unsigned", 0]), UPPER_HALF_PLANE)
    with pytest.raises(UndecidableSign):
        preserves_domain(rows([1, 0, 0], [0, "L - M", 0]), UPPER_HALF_PLANE)


def test_deck_action_rejects_bad_generator():
    with pytest.raises(ValueError):
        DeckAction(UPPER_HALF_PLANE, (rows([1, 0, 0], [0, -1, 0]),))


# pushforward

def numeric_pushforward(X, T, p):
    A, b = T.to_float(NUMERIC_ENV)
    A = np.array(A, float)
    q = np.linalg.solve(A, np.array(p) - np.array(b, float))
    return A @ np.array(X.evaluate(q, NUMERIC_ENV))


def test_pushforward_examples():
    assert pushforward_affine_field(F("d/dx"), AffineMap.translation([0, 1])) == F("d/dx")
    assert pushforward_affine_field(F("y*d/dx"), rows([1, 0, 0], [0, "E", 0])) == F("1/E*y*d/dx")
    euler = F("x*d/dx + y*d/dy")
    assert pushforward_affine_field(euler, rows([2, "E", 0], [-1, 3, 0])) == euler


def test_pushforward_numeric_cross_check():
    T = rows([1, 0, 0], [0, "E", 0])
    X = F("y*d/dx")
    Y = pushforward_affine_field(X, T)
    for p in [(0.3, 1.1), (-1.0, 0.2), (2.5, -0.7)]:
        assert np.allclose(Y.evaluate(p, NUMERIC_ENV), numeric_pushforward(X, T, p), atol=1e-12)


@given(rational_affine_maps())
def test_general_pushforward_matches_numeric(T):
    X = F("x*y*d/dx + (y^2 - x)*d/dy")
    Y = pushforward_field(X, T)
    for p in [(0.3, 1.1), (-0.4, 0.6)]:
        assert np.allclose(Y.evaluate(p, NUMERIC_ENV), numeric_pushforward(X, T, p), atol=1e-9)


@given(rational_affine_maps())
def test_exponential_pushforward_by_linear_maps(T):
    T = AffineMap(T.A, (0, 0))
    X = F("x*exp(-x)*d/dx + exp(y/2)*d/dy")
    Y = pushforward_field(X, T)
    for p in [(0.3, 1.1), (-0.4, 0.6)]:
        assert np.allclose(Y.evaluate(p, NUMERIC_ENV), numeric_pushforward(X, T, p), atol=1e-9)


def test_exponential_pushforward_weight_conflict():
    with pytest.raises(WeightParameterConflict):
        pushforward_field(F("exp(-x)*d/dy"), AffineMap.translation([1, 0]))


def test_pushforward_affine_rejects_nonaffine():
    with pytest.raises(NotAffineField):
        pushforward_affine_field(F("x^2*d/dx"), AffineMap.identity(2))


def test_is_invariant_field_examples():
    shift_x = AffineMap.translation([1, 0])
    assert is_invariant_field(F("d/dx"), shift_x)
    assert not is_invariant_field(F("x*d/dy"), shift_x)
    assert is_invariant_field(F("exp(-x)*d/dy"), AffineMap.translation([0, 1]))


# representation

@given(rational_affine_maps(), rational_affine_maps())
def test_representation_is_homomorphism(T, S):
    basis = ambient_basis(Domain.full(2))
    rT, rS = representation_matrix(T, basis), representation_matrix(S, basis)
    assert representation_matrix(T @ S, basis) == rT @ rS
    assert representation_matrix(T.inverse(), basis) == rT.inverse()


def test_closure_violation_under_strict_closure():
    entry = surface_catalog("mobius:5")
    with pytest.raises(ClosureViolation):
        invariant_subalgebra(entry.action, entry.ambient_fields(), require_closure=True)


# catalog

def test_invariant_examples():
    assert span_equal(surface_catalog("torus:1").invariant_basis(), [F("d/dx"), F("d/dy")])
    assert span_equal(surface_catalog("torus:2").invariant_basis(), [F("d/dx"), F("y*d/dx + d/dy")])
    t6 = surface_catalog("torus:6").invariant_basis()
    assert len(t6) == 4 and span_equal(t6, ambient_basis(PUNCTURED_PLANE))


def test_catalog_entries():
    t3 = surface_catalog("torus:3")
    assert t3.domain == UPPER_HALF_PLANE and t3.expected_dim == 2
    assert t3.action.generators == (AffineMap.translation([1, 0]), rows([1, 0, 0], [0, "E", 0]))
    c1 = surface_catalog("cylinder:1")
    assert c1.domain == Domain.full(2) and c1.action.generators == (AffineMap.translation([0, 1]),)
    m5 = surface_catalog("mobius:5")
    assert m5.domain == QUADRANT and m5.action.generators == (rows([0, 1, 0], ["E", 1, 0]),)
    with pytest.raises(UnknownSurface):
        surface_catalog("torus:7")
    assert set(catalog_keys()) == set(EXPECTED_DIMS)
    assert "example:etale" in catalog_keys(include_example=True)


@pytest.mark.parametrize("key", sorted(EXPECTED_DIMS))
def test_catalog_dimension(key):
    entry = surface_catalog(key)
    basis = entry.invariant_basis()
    assert entry.expected_dim == EXPECTED_DIMS[key] == len(basis)
    for X in basis:
        for T in entry.action.generators:
            assert is_invariant_field(X, T)
    # closed under bracket
    for i, X in enumerate(basis):
        for Y in basis[i + 1:]:
            Z = X.bracket(Y)
            for T in entry.action.generators:
                assert is_invariant_field(Z, T)


@pytest.mark.parametrize("key", ["torus:2", "torus:3", "klein:2", "klein:5", "cylinder:5", "mobius:4"])
def test_random_words_numeric(key):
    rng = random.Random(hash(key) & 0xffff)
    entry = surface_catalog(key)
    gens = len(entry.action.generators)
    for X in entry.invariant_basis():
        for _ in range(10):
            letters = [rng.choice([i for i in range(gens)] + [-i - 1 for i in range(gens)])
                       for _ in range(rng.randint(1, 4))]
            W = entry.action.word(letters)
            for _ in range(3):
                p = (rng.uniform(0.1, 2), rng.uniform(0.1, 2))
                ref = X.evaluate(p, NUMERIC_ENV)
                assert np.allclose(numeric_pushforward(X, W, p), ref, atol=1e-8)


def test_word_inverse():
    a = surface_catalog("torus:3").action
    assert a.word([1, -2]) == AffineMap.identity(2)
    assert a.word([]) == AffineMap.identity(2)


# lifts

def test_lift_examples(etale):
    expected = [F(s) for s in ("y*d/dy", "d/dy", "exp(-x)*d/dy", "d/dx")]
    assert list(etale.lifts) == expected
    assert list(etale.incomplete_lifts) == [F("y*d/dx - y^2*d/dy"), F("exp(-x)*d/dx - y*exp(-x)*d/dy")]
    assert lift_through_etale(VectorField.zero(2), etale.D).is_zero


def test_lift_identity(etale):
    fields = list(etale.orbit_basis) + list(etale.incomplete_orbit_fields) + [F("x^2*d/dx + y*d/dy")]
    for X in fields:
        L = lift_through_etale(X, etale.D)
        assert pushforward_through(L, etale.D) == X.compose(etale.D.F)


def test_representation_matrix_form():
    rho = representation_matrix(AffineMap.translation([1, 0]), ambient_basis(Domain.full(2)))
    assert isinstance(rho, ScalarMatrix) and rho.rows == 6
