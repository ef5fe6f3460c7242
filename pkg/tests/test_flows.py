import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flataffine.connection import AffineMap
from flataffine.deck import surface_catalog
from flataffine.errors import EvaluatorDomainError, PointOutsideDomain
from flataffine.exppoly import QUADRANT, UPPER_HALF_PLANE, Domain, parse_field
from flataffine.flows import (FlowGrid, NumericParamEnv, check_equivariance_numeric,
                              completeness_probe, integrate, closed_form_flows, sample_domain,
                              verify_flow)

F = parse_field
FULL = Domain.full(2)


def close(a, b, tol):
    return all(abs(u - v) <= tol for u, v in zip(a, b))


# integrate

def test_constant_field():
    tr = integrate(F("d/dx"), (0.0, 1.0), 1.0)
    assert tr.status == "completed" and close(tr.final, (1.0, 1.0), 1e-9)
    assert tr.t_final == 1.0


def test_exponential_field():
    tr = integrate(F("y*d/dy"), (0.0, 1.0), math.log(2))
    assert close(tr.final, (0.0, 2.0), 1e-8)


def test_backward_blowup_phi5():
    tr = integrate(F("y*d/dx - y^2*d/dy"), (0.0, 1.0), -1.5)
    assert tr.status == "blowup"
    assert tr.t_star == pytest.approx(-1.0, abs=1e-3)


def test_monotone_times():
    tr = integrate(F("y*d/dx - y^2*d/dy"), (0.3, 0.8), -0.9)
    diffs = [b - a for a, b in zip(tr.times, tr.times[1:])]
    assert all(d < 0 for d in diffs)
    tr = integrate(F("d/dx"), (0.0, 1.0), 3.0)
    assert all(b > a for a, b in zip(tr.times, tr.times[1:]))


def test_escape_from_domain():
    tr = integrate(F("-d/dy", UPPER_HALF_PLANE), (0.0, 1.0), 2.0)
    assert tr.status == "escaped_domain"
    assert tr.t_star == pytest.approx(1.0, abs=1e-8)
    assert all(UPPER_HALF_PLANE.contains(p) for p in tr.points[:-1])


def test_start_outside_domain():
    with pytest.raises(PointOutsideDomain):
        integrate(F("d/dx", UPPER_HALF_PLANE), (0.0, -1.0), 1.0)


def test_zero_time_and_limits():
    assert integrate(F("d/dx"), (0.0, 0.0), 0.0).status == "completed"
    assert integrate(F("d/dx"), (0.0, 0.0), 1.0, h0=1e-3, step_floor=1e-2).status == "step_underflow"
    assert integrate(F("d/dx"), (0.0, 0.0), 100.0, h0=1e-3, max_steps=3).status == "step_limit"


def test_callable_and_env():
    tr = integrate(lambda p: [p[1], -p[0]], (1.0, 0.0), math.pi)
    assert close(tr.final, (-1.0, 0.0), 1e-8)
    tr = integrate(F("E*d/dx + L*d/dy"), (0.0, 0.0), 1.0, env={"L": 1.7})
    assert close(tr.final, (math.e, 1.7), 1e-9)


@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(-1, 1), st.floats(0.2, 1.5))
def test_semigroup_law(t, s, x, y):
    X = F("exp(-x)*d/dy + y*d/dx")
    a = integrate(X, (x, y), t + s).final
    b = integrate(X, integrate(X, (x, y), s).final, t).final
    assert close(a, b, 1e-7)


# parameter env

def test_env_defaults_and_validation():
    env = NumericParamEnv()
    assert env["E"] == math.e
    assert NumericParamEnv.parse(["L=2.5"])["L"] == 2.5
    with pytest.raises(ValueError):
        NumericParamEnv({"L": -1.0})
    with pytest.raises(ValueError):
        NumericParamEnv.parse(["L"])


# closed forms

@pytest.mark.parametrize("flow", closed_form_flows(), ids=lambda f: f.name)
def test_closed_form_flows(flow):
    rep = verify_flow(F(flow.field_literal), flow.phi)
    assert rep.n_points == 125
    assert rep.max_defect_ode < 1e-6 and rep.max_defect_grouplaw < 1e-6


def test_identity_flow_is_exact():
    rep = verify_flow(F("d/dx"), lambda t, p: (t + p[0], p[1]))
    assert rep.max_defect_grouplaw < 1e-14 and rep.max_defect_ode < 1e-8


def test_closed_form_outside_validity():
    phi5 = closed_form_flows()[4]
    with pytest.raises(EvaluatorDomainError):
        verify_flow(F(phi5.field_literal), phi5.phi, grid=FlowGrid(ts=(-2.0, 0.0)))


def test_closed_form_matches_integration():
    for flow in closed_form_flows():
        X = F(flow.field_literal)
        for p in [(0.2, 0.5), (-0.3, 0.9)]:
            assert close(integrate(X, p, 0.4).final, flow.phi(0.4, p), 1e-8)


# completeness probe

def test_probe_constant_field():
    v = completeness_probe(F("d/dx"), FULL, n_samples=50, t_max=100)
    assert v.verdict == "no_blowup_observed" and v.samples_checked == 50


@pytest.mark.parametrize("literal", ["y*d/dx - y^2*d/dy", "exp(-x)*d/dx - y*exp(-x)*d/dy"])
def test_probe_incomplete_fields(literal):
    v = completeness_probe(F(literal), FULL)
    assert v.incomplete and v.status in ("blowup", "step_underflow")
    assert FULL.contains(v.point)


def test_probe_witness_times_match_closed_forms():
    v5 = completeness_probe(F("y*d/dx - y^2*d/dy"), FULL)
    assert v5.t_star == pytest.approx(-1.0 / v5.point[1], rel=1e-6)
    v6 = completeness_probe(F("exp(-x)*d/dx - y*exp(-x)*d/dy"), FULL)
    assert v6.t_star == pytest.approx(-math.exp(v6.point[0]), rel=1e-6)


@pytest.mark.parametrize("literal", ["y*d/dy", "exp(-x)*d/dy", "d/dy", "d/dx"])
def test_probe_complete_lifts(literal):
    assert completeness_probe(F(literal), FULL, t_max=50).verdict == "no_blowup_observed"


def test_probe_escape_and_dump():
    dump = []
    v = completeness_probe(F("-d/dy", UPPER_HALF_PLANE), n_samples=3, dump=dump)
    assert v.incomplete and v.status == "escaped_domain"
    assert dump and dump[-1]["status"] == "escaped_domain"
    with pytest.raises(ValueError):
        completeness_probe(F("d/dx"), n_samples=0)


def test_sample_domain_reproducible():
    a = sample_domain(QUADRANT, 20, seed=3)
    assert a == sample_domain(QUADRANT, 20, seed=3)
    assert len(a) == 20 and all(QUADRANT.contains(p) for p in a)


# equivariance

def test_equivariance_examples():
    pts = [(0.1, 0.4), (-0.5, 1.2), (0.7, -0.3)]
    assert check_equivariance_numeric(F("d/dy"), AffineMap.translation([0, 1]), samples=pts) < 1e-8
    d = check_equivariance_numeric(F("exp(-x)*d/dy"), AffineMap.translation([1, 0]), samples=pts)
    # closed form: |t| e^{-x} (1 - e^{-1}) at t = 0.5
    assert d == pytest.approx(max(0.5 * math.exp(-p[0]) * (1 - math.exp(-1)) for p in pts), rel=1e-6)
    for T in surface_catalog("torus:1").action.generators:
        assert check_equivariance_numeric(F("d/dx"), T, samples=pts) < 1e-8


def test_equivariance_rejects_outside_samples():
    with pytest.raises(PointOutsideDomain):
        check_equivariance_numeric(F("d/dx", UPPER_HALF_PLANE), AffineMap.identity(2),
                                   samples=[(0.0, -1.0)])


def test_equivariance_reports_incomplete_integration():
    d = check_equivariance_numeric(F("y*d/dx - y^2*d/dy"), AffineMap.identity(2),
                                   samples=[(0.0, 5.0)], times=(-0.5,))
    assert d == math.inf


@pytest.mark.parametrize("key", ["torus:3", "klein:3", "cylinder:7", "mobius:3"])
def test_symbolic_invariants_are_numerically_equivariant(key):
    entry = surface_catalog(key)
    rng = random.Random(1)
    env = {"L": 1.7, "M": 2.3}
    samples = [(rng.uniform(0.1, 1.5), rng.uniform(0.1, 1.5)) for _ in range(4)]
    for X in entry.invariant_basis():
        for T in entry.action.generators:
            assert check_equivariance_numeric(X, T, env, samples, domain=entry.domain) < 1e-7
