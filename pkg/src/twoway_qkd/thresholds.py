"""
Security thresholds, ON/OFF post-selection and superadditivity scans.

A threshold is the excess noise ``N*`` at which the key rate crosses zero for
fixed transmissivity. Correlated attacks are specified by a correlation rule
``omega -> (g, g')`` so that boundary attacks follow the allowed region as
``omega`` moves during the root search.
"""

from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect

from .attacks import (
    AttackParams,
    boundary_arc,
    boundary_samples,
    classify,
    correlation_rule,
    eve_mutual_information,
    omega_from_excess,
)
from .errors import DomainError, InternalConsistencyError, UnsupportedCombinationError
from .keyrates import ProtocolSpec, T_MAX, T_MIN, as_spec, key_rate

N_START = 1.0
N_CAP = 100.0
XTOL = 1e-8
RATE_TOL = 1e-6


class ThresholdPoint(NamedTuple):
    T: float
    N_star: float
    omega_star: float
    status: str  # 'ok', 'insecure' (R <= 0 at N = 0) or 'open' (R > 0 at the cap)
    rate_at_root: float


class ThresholdCurve(NamedTuple):
    spec: ProtocolSpec
    rule: str
    points: list

    def as_arrays(self):
        T = np.array([p.T for p in self.points])
        N = np.array([p.N_star for p in self.points])
        return T, N


def rate_at_noise(spec, T, N, rule="collective"):
    """Key rate at excess noise ``N`` with correlations set by ``rule``."""
    _, fn = correlation_rule(rule) if isinstance(rule, str) else (None, rule)
    w = omega_from_excess(T, N)
    g, gp = fn(w)
    return key_rate(spec, AttackParams(T, w, g, gp)).rate


def solve_threshold(spec, T, rule="collective", n_cap=N_CAP, xtol=XTOL):
    """Tolerable excess noise at transmissivity ``T``.

    Bisection on ``N`` in ``[0, N_hi]``; ``N_hi`` starts at 1 and doubles
    until the rate turns negative or ``n_cap`` is passed.
    """
    spec = as_spec(spec)
    if not T_MIN <= T <= T_MAX:
        raise DomainError(f"transmissivity {T} outside supported range [{T_MIN}, {T_MAX}]")
    name, fn = correlation_rule(rule)
    if spec.circuit == "ON" and name != "collective":
        raise UnsupportedCombinationError("ON-circuit thresholds are only defined for collective attacks")

    def f(N):
        return rate_at_noise(spec, T, N, fn)

    r0 = f(0.0)
    if r0 <= 0:
        return ThresholdPoint(T, 0.0, 1.0, "insecure", r0)
    lo, hi = 0.0, N_START
    while f(hi) > 0:
        if hi >= n_cap:
            return ThresholdPoint(T, float("inf"), float("inf"), "open", f(hi))
        lo, hi = hi, min(2 * hi, n_cap)
    N = bisect(f, lo, hi, xtol=xtol, maxiter=200)
    r = f(N)
    if abs(r) > RATE_TOL:
        raise InternalConsistencyError(f"threshold postcondition failed: R({N}) = {r} for {spec.label}, T={T}")
    return ThresholdPoint(T, float(N), float(omega_from_excess(T, N)), "ok", float(r))


def threshold_curve(spec, T_grid, rule="collective"):
    """Thresholds over an increasing grid of transmissivities."""
    T_grid = np.asarray(T_grid, dtype=float)
    if T_grid.size == 0:
        raise DomainError("empty transmissivity grid")
    if T_grid.size > 1 and np.any(np.diff(T_grid) <= 0):
        raise DomainError("transmissivity grid must be strictly increasing")
    spec = as_spec(spec)
    name, _ = correlation_rule(rule)
    return ThresholdCurve(spec, name, [solve_threshold(spec, float(T), name) for T in T_grid])


def postselect(detection, reconciliation, a, tau_g=1e-9):
    """Pick the ON circuit for collective attacks and OFF otherwise.

    ``tau_g`` is the tolerance on ``|g|, |g'|`` below which an attack counts
    as collective; the ON rate is then evaluated with the correlations set
    to zero.
    """
    kind = classify(a, tau_g=tau_g)
    if kind == "collective":
        spec = ProtocolSpec(detection, reconciliation, "ON")
        return "ON", key_rate(spec, AttackParams(a.T, a.omega))
    spec = ProtocolSpec(detection, reconciliation, "OFF")
    return "OFF", key_rate(spec, a)


class ScanPoint(NamedTuple):
    T: float
    omega: float
    g: float
    gp: float
    choice: str
    rate_postselected: float
    rate_oneway: float
    rate_off: float

    @property
    def margin(self):
        return self.rate_postselected - self.rate_oneway


class ScanReport(NamedTuple):
    points: list
    min_margin: float
    violations: list  # postselected rate below the one-way rate
    off_nonpositive: list  # correlated attack with R_OFF <= 0 where one-way >= -1e-3

    @property
    def ok(self):
        return not self.violations and not self.off_nonpositive


def superadditivity_scan(detection, reconciliation, T_grid, omega_grid, n_boundary=16,
                         include_collective=True, tol=1e-9, oneway_floor=-1e-3):
    """Compare the post-selected two-way rate with the one-way rate on a grid.

    Correlations are sampled on the edge of the allowed region, ``n_boundary``
    points per ``omega``; the collective attack is added when
    ``include_collective`` is set.
    """
    oneway = ProtocolSpec(detection, reconciliation, "one-way")
    off = ProtocolSpec(detection, reconciliation, "OFF")
    points, violations, off_bad = [], [], []
    for T in T_grid:
        for w in omega_grid:
            corr = boundary_samples(w, n_boundary)
            if include_collective:
                corr = [(0.0, 0.0)] + corr
            r1 = key_rate(oneway, AttackParams(T, w)).rate
            for g, gp in corr:
                a = AttackParams(T, w, g, gp)
                choice, rb = postselect(detection, reconciliation, a)
                r_off = rb.rate if choice == "OFF" else key_rate(off, a).rate
                p = ScanPoint(T, w, g, gp, choice, rb.rate, r1, r_off)
                points.append(p)
                if p.margin < -tol:
                    violations.append(p)
                if not a.is_collective and r1 >= oneway_floor and r_off <= 0:
                    off_bad.append(p)
    margin = min(p.margin for p in points) if points else float("nan")
    return ScanReport(points, margin, violations, off_bad)


class CorrelationSweep(NamedTuple):
    parameter: np.ndarray
    g: np.ndarray
    gp: np.ndarray
    eve_mi: np.ndarray
    rate: np.ndarray


def correlation_sweep(spec, T, omega, path="anticorrelated", n=41):
    """OFF rate and Eve's ancilla mutual information along a path in the (g, g') plane.

    ``path='anticorrelated'`` follows ``g' = -g`` from the origin to the
    maximally entangled point; ``path='arc'`` follows the edge of the allowed
    region from the maximally separable point to the maximally entangled one.
    The returned ``parameter`` runs from 0 to 1.
    """
    s = np.linspace(0.0, 1.0, n)
    if path == "anticorrelated":
        gmax = np.sqrt(omega**2 - 1)
        g, gp = s * gmax, -s * gmax
    elif path == "arc":
        g, gp = boundary_arc(omega, s * np.arccosh(omega), upper=True)
    else:
        raise DomainError(f"unknown path {path!r}")
    spec = as_spec(spec)
    mi, r = [], []
    for x, y in zip(g, gp):
        a = AttackParams(T, omega, float(x), float(y))
        mi.append(eve_mutual_information(a))
        r.append(key_rate(spec, a).rate)
    return CorrelationSweep(s, np.asarray(g), np.asarray(gp), np.array(mi), np.array(r))
