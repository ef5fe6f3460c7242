"""Numeric flows of exponential-polynomial vector fields.

The integrator is an adaptive Dormand-Prince 5(4) pair with per-step error
control; it stops on domain escape (bisection-refined), blow-up of the
state norm, or step-size underflow.  The completeness probe only ever
reports witnesses of incompleteness, never a proof of completeness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .errors import EvaluatorDomainError, MissingParam, PointOutsideDomain
from .exppoly import Domain, VectorField
from .scalars import get_param

__all__ = [
    "NumericParamEnv", "Trajectory", "integrate", "completeness_probe",
    "ProbeVerdict", "verify_flow", "FlowGrid", "FlowReport",
    "check_equivariance_numeric", "closed_form_flows", "ClosedFormFlow",
    "BLOWUP_BOUND", "STEP_FLOOR", "DEFAULT_T_MAX",
]

BLOWUP_BOUND = 1e12
STEP_FLOOR = 1e-14
DEFAULT_T_MAX = 50.0
ESCAPE_TOL = 1e-9


@dataclass(frozen=True)
class NumericParamEnv:
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = {"E": math.e}
        vals.update({k: float(v) for k, v in dict(self.values).items()})
        for name, v in vals.items():
            try:
                positive = get_param(name).positive
            except MissingParam:
                positive = False
            if positive and not v > 0:
                raise ValueError(f"parameter {name} is declared positive, got {v}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def parse(cls, pairs):
        """From strings ``KEY=FLOAT``."""
        vals = {}
        for item in pairs or ():
            key, sep, val = item.partition("=")
            if not sep:
                raise ValueError(f"expected KEY=FLOAT, got {item!r}")
            vals[key.strip()] = float(val)
        return cls(vals)

    def __getitem__(self, name):
        return self.values[name]


def _env_values(env):
    if env is None:
        return NumericParamEnv().values
    if isinstance(env, NumericParamEnv):
        return env.values
    return NumericParamEnv(env).values


@dataclass
class Trajectory:
    times: list
    points: list
    status: str
    t_star: float = None

    @property
    def final(self):
        return self.points[-1]

    @property
    def t_final(self):
        return self.times[-1]

    def to_json(self):
        return {"status": self.status, "t_star": self.t_star,
                "times": list(self.times), "points": [list(p) for p in self.points]}


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_BHAT = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b - bh for b, bh in zip(_B, _BHAT))


def _dopri_step(f, y, k1, h):
    n = len(y)
    ks = [k1]
    for s in range(1, 7):
        a = _A[s]
        ys = [y[i] + h * sum(a[j] * ks[j][i] for j in range(s) if a[j]) for i in range(n)]
        ks.append(f(ys))
    y_new = ys  # stage 7 is evaluated at the 5th-order solution (FSAL)
    err = [h * sum(_E[j] * ks[j][i] for j in range(7) if _E[j]) for i in range(n)]
    return y_new, err, ks[6]


def _finite(p):
    return all(math.isfinite(v) for v in p)


def _norm(p):
    return math.sqrt(sum(v * v for v in p))


def _as_rhs(X, env):
    if isinstance(X, VectorField):
        return X.compile(_env_values(env))
    return X


def integrate(X, p0, t_final, env=None, domain=None, *, t0=0.0, rtol=1e-10, atol=1e-12,
              blowup_bound=BLOWUP_BOUND, step_floor=STEP_FLOOR, max_steps=200000, h0=None):
    """Integrate dp/dt = X(p) from ``p0`` at ``t0`` to ``t0 + t_final`` (either sign)."""
    if domain is None:
        domain = X.domain if isinstance(X, VectorField) else Domain.full(len(p0))
    y = [float(v) for v in p0]
    if not domain.contains(y):
        raise PointOutsideDomain(f"{tuple(y)} is outside {domain}")
    f = _as_rhs(X, env)

    def rhs(p):
        try:
            return f(p)
        except (OverflowError, ZeroDivisionError):
            return [math.inf] * len(p)

    t = float(t0)
    t_end = t + float(t_final)
    times, points = [t], [list(y)]
    if t_final == 0:
        return Trajectory(times, points, "completed")
    direction = 1.0 if t_final > 0 else -1.0
    k1 = rhs(y)
    if not _finite(k1):
        return Trajectory(times, points, "blowup", t)
    h = h0 if h0 is not None else min(abs(t_final), 1e-2)
    for _ in range(max_steps):
        remaining = abs(t_end - t)
        if remaining <= 0:
            return Trajectory(times, points, "completed")
        h = min(h, remaining)
        if h < step_floor and remaining > step_floor:
            return Trajectory(times, points, "step_underflow", t)
        hs = direction * h
        y_new, err, k_last = _dopri_step(rhs, y, k1, hs)
        if not (_finite(y_new) and _finite(err)):
            h *= 0.25
            if h < step_floor:
                return Trajectory(times, points, "blowup", t)
            continue
        scale = [atol + rtol * max(abs(a), abs(b)) for a, b in zip(y, y_new)]
        e = math.sqrt(sum((ei / si) ** 2 for ei, si in zip(err, scale)) / len(y))
        if e > 1.0:
            h *= max(0.1, 0.9 * e ** -0.2)
            if h < step_floor:
                return Trajectory(times, points, "step_underflow", t)
            continue
        if not domain.contains(y_new):
            t_star, p_star = _bisect_escape(rhs, y, k1, t, hs, domain)
            times.append(t_star)
            points.append(p_star)
            return Trajectory(times, points, "escaped_domain", t_star)
        t = t_end if h == remaining else t + hs
        y, k1 = y_new, k_last
        times.append(t)
        points.append(list(y))
        if _norm(y) > blowup_bound or not _finite(k1):
            return Trajectory(times, points, "blowup", t)
        h *= min(5.0, 0.9 * e ** -0.2) if e > 0 else 5.0
    return Trajectory(times, points, "step_limit", t)


def _bisect_escape(rhs, y, k1, t, hs, domain):
    lo, hi = 0.0, 1.0
    p_hi = None
    while abs(hs) * (hi - lo) > ESCAPE_TOL:
        mid = 0.5 * (lo + hi)
        p, _, _ = _dopri_step(rhs, y, k1, hs * mid)
        if domain.contains(p):
            lo = mid
        else:
            hi, p_hi = mid, p
    if p_hi is None:
        p_hi, _, _ = _dopri_step(rhs, y, k1, hs * hi)
    return t + hs * hi, list(p_hi)


# completeness ---------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeVerdict:
    verdict: str
    point: tuple = None
    t_star: float = None
    status: str = None
    samples_checked: int = 0

    @property
    def incomplete(self):
        return self.verdict == "incomplete_witness"

    def to_json(self):
        return {"verdict": self.verdict, "point": None if self.point is None else list(self.point),
                "t_star": self.t_star, "status": self.status, "samples_checked": self.samples_checked}


def sample_domain(domain, n, seed=0, box=2.0):
    """First ``n`` points of a scrambled Halton sequence in the domain, inside [-box, box]^dim."""
    sampler = qmc.Halton(d=domain.dim, scramble=True, seed=seed)
    out = []
    while len(out) < n:
        batch = qmc.scale(sampler.random(max(2 * n, 16)), [-box] * domain.dim, [box] * domain.dim)
        out.extend(tuple(float(v) for v in p) for p in batch if domain.contains(tuple(p)))
    return out[:n]


def _finite_time_witness(f, traj, t_end, domain, window, rtol, atol):
    """Escalate the blow-up bound from the end of ``traj``.

    Returns (witness, trajectory-to-continue).  A norm exceeding the bound
    is a witness only if the solution also exceeds a far larger bound, or
    underflows, within a short window.  Exponential growth does not.
    """
    bound = BLOWUP_BOUND
    while True:
        if traj.status in ("escaped_domain", "step_underflow"):
            return traj, None
        if traj.status != "blowup":
            return None, traj
        t1, p1 = traj.times[-1], traj.points[-1]
        remaining = t_end - t1
        if remaining == 0 or not _finite(p1):
            return traj, None
        bound *= 1e12
        span = math.copysign(min(window, abs(remaining)), remaining)
        probe = integrate(f, p1, span, domain=domain, t0=t1, rtol=rtol, atol=atol, blowup_bound=bound)
        if probe.status in ("blowup", "step_underflow", "escaped_domain"):
            return Trajectory(traj.times + probe.times[1:], traj.points + probe.points[1:],
                              probe.status, probe.t_star), None
        traj = integrate(f, p1, remaining, domain=domain, t0=t1, rtol=rtol, atol=atol, blowup_bound=bound)
        if bound > 1e290:
            return None, traj


def completeness_probe(X, domain=None, env=None, n_samples=50, t_max=DEFAULT_T_MAX, seed=0, *,
                       window=1e-3, rtol=1e-10, atol=1e-12, dump=None):
    """Search for finite-time blow-up or escape from quasi-random starting points."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    domain = domain or X.domain
    f = _as_rhs(X, env)
    checked = 0
    for p in sample_domain(domain, n_samples, seed):
        checked += 1
        for sign in (1.0, -1.0):
            traj = integrate(f, p, sign * t_max, domain=domain, rtol=rtol, atol=atol)
            witness, _ = _finite_time_witness(f, traj, sign * t_max, domain, window, rtol, atol)
            if dump is not None:
                dump.append({"start": list(p), "direction": sign, **(witness or traj).to_json()})
            if witness is not None:
                return ProbeVerdict("incomplete_witness", tuple(p), witness.t_star, witness.status, checked)
    return ProbeVerdict("no_blowup_observed", None, None, None, checked)


# closed-form flows -------------------------------------------------------------------

@dataclass(frozen=True)
class FlowGrid:
    xs: tuple = tuple(np.linspace(0.0, 1.0, 5))
    ys: tuple = tuple(np.linspace(0.1, 1.0, 5))
    ts: tuple = tuple(np.linspace(-0.4, 0.4, 5))

    def points(self):
        return [(float(x), float(y)) for x in self.xs for y in self.ys]

    @property
    def size(self):
        return len(self.xs) * len(self.ys) * len(self.ts)


@dataclass(frozen=True)
class FlowReport:
    max_defect_ode: float
    max_defect_grouplaw: float
    n_points: int

    def to_json(self):
        return {"max_defect_ode": self.max_defect_ode, "max_defect_grouplaw": self.max_defect_grouplaw,
                "n_points": self.n_points}


def _call(phi, t, p):
    try:
        out = phi(t, p)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise EvaluatorDomainError(f"closed-form flow undefined at t={t}, p={p}: {exc}") from None
    if not _finite(out):
        raise EvaluatorDomainError(f"closed-form flow not finite at t={t}, p={p}")
    return out


def _dist(a, b):
    return _norm([u - v for u, v in zip(a, b)])


def verify_flow(X, phi, env=None, grid=None, h=1e-6):
    """Max ODE defect |d/dt phi_t(p) - X(phi_t(p))| and group-law defect over a grid."""
    grid = grid or FlowGrid()
    f = _as_rhs(X, env)
    ode = law = 0.0
    for p in grid.points():
        for t in grid.ts:
            t = float(t)
            q = _call(phi, t, p)
            dq = [(a - b) / (2 * h) for a, b in zip(_call(phi, t + h, p), _call(phi, t - h, p))]
            ode = max(ode, _dist(dq, f(q)))
            for s in grid.ts:
                s = float(s)
                law = max(law, _dist(_call(phi, t + s, p), _call(phi, t, _call(phi, s, p))))
    return FlowReport(ode, law, grid.size)


def check_equivariance_numeric(X, T, env=None, samples=(), times=(0.1, -0.1, 0.5, -0.5), domain=None):
    """max |T(phi_t(p)) - phi_t(T(p))| over samples and times, flows by integration."""
    vals = _env_values(env)
    domain = domain or X.domain
    Tf = T.float_map(vals)
    f = _as_rhs(X, env)
    worst = 0.0
    for p in samples:
        p = [float(v) for v in p]
        Tp = Tf(p)
        if not domain.contains(p) or not domain.contains(Tp):
            raise PointOutsideDomain(f"{tuple(p)} or its image is outside {domain}")
        for t in times:
            a = integrate(f, p, t, domain=domain)
            b = integrate(f, Tp, t, domain=domain)
            if a.status != "completed" or b.status != "completed":
                return math.inf
            worst = max(worst, _dist(Tf(a.final), b.final))
    return worst


@dataclass(frozen=True)
class ClosedFormFlow:
    name: str
    field_literal: str
    phi: Callable


def closed_form_flows():
    """The six closed-form flows of the lifted fields of the etale example."""
    exp, log = math.exp, math.log
    return (
        ClosedFormFlow("phi1", "y*d/dy", lambda t, p: (p[0], exp(t) * p[1])),
        ClosedFormFlow("phi2", "exp(-x)*d/dy", lambda t, p: (p[0], exp(-p[0]) * t + p[1])),
        ClosedFormFlow("phi3", "d/dy", lambda t, p: (p[0], t + p[1])),
        ClosedFormFlow("phi4", "d/dx", lambda t, p: (t + p[0], p[1])),
        ClosedFormFlow("phi5", "y*d/dx - y^2*d/dy",
                       lambda t, p: (p[0] + log(t * p[1] + 1), p[1] / (t * p[1] + 1))),
        ClosedFormFlow("phi6", "exp(-x)*d/dx - y*exp(-x)*d/dy",
                       lambda t, p: (log(exp(p[0]) + t), exp(p[0]) * p[1] / (t + exp(p[0])))),
    )
