"""
Two-mode Gaussian attacks: parameters, bona fide checks and characterisation.

Eve injects a two-mode correlated thermal state with variance ``omega`` and
correlation block ``diag(g, gp)`` into two beam splitters of transmissivity
``T``, one per direction of the round trip.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AttackValidationError, DomainError, InternalConsistencyError
from .gaussian import check_physical, entropy_h, make_eve_cm, partial_transpose

SLACK = 1e-9


@dataclass(frozen=True)
class AttackParams:
    T: float
    omega: float
    g: float = 0.0
    gp: float = 0.0

    @classmethod
    def from_excess_noise(cls, T, N, g=0.0, gp=0.0):
        return cls(T, omega_from_excess(T, N), g, gp)

    @property
    def excess_noise(self):
        return excess_noise(self.T, self.omega)

    @property
    def is_collective(self):
        return self.g == 0 and self.gp == 0

    def with_correlations(self, g, gp):
        return AttackParams(self.T, self.omega, g, gp)


class ValidationReport(NamedTuple):
    ok: bool
    violations: tuple
    min_nu: float


def excess_noise(T, omega):
    """Excess noise ``N = (1-T)(omega-1)/T`` in shot-noise units."""
    if not 0 < T < 1:
        raise DomainError(f"transmissivity must lie in (0, 1), got {T}")
    if omega < 1:
        raise DomainError(f"omega must be >= 1, got {omega}")
    return (1.0 - T) * (omega - 1.0) / T


def omega_from_excess(T, N):
    if not 0 < T < 1:
        raise DomainError(f"transmissivity must lie in (0, 1), got {T}")
    if N < 0:
        raise DomainError(f"excess noise must be >= 0, got {N}")
    return 1.0 + T * N / (1.0 - T)


def closed_form_spectrum(omega, g, gp):
    """Symplectic eigenvalues ``(nu_minus, nu_plus)`` of Eve's input state."""
    return (np.sqrt((omega - g) * (omega - gp)), np.sqrt((omega + g) * (omega + gp)))


def _inequality_violations(omega, g, gp, slack):
    out = []
    if abs(g) >= omega + slack:
        out.append(f"|g| < omega violated: |g|={abs(g):.12g}, omega={omega:.12g}")
    if abs(gp) >= omega + slack:
        out.append(f"|g'| < omega violated: |g'|={abs(gp):.12g}, omega={omega:.12g}")
    lhs = omega**2 + g * gp - 1.0
    rhs = omega * abs(g + gp)
    # the same quantity as min(nu_pm)^2 - 1, so the slack mirrors nu >= 1 - 1e-9
    if lhs - rhs < -2 * slack:
        out.append(
            "omega^2 + g g' - 1 >= omega |g + g'| violated: "
            f"{lhs:.12g} < {rhs:.12g}"
        )
    return out


def validate(a, slack=SLACK):
    """Check the bona fide conditions on ``(omega, g, gp)`` two independent ways.

    The three closed-form inequalities are compared with a numeric
    symplectic-spectrum check of the attack CM; a disagreement raises
    :class:`InternalConsistencyError`.
    """
    if not 0 < a.T < 1:
        return ValidationReport(False, (f"transmissivity must lie in (0, 1), got {a.T}",), float("nan"))
    if a.omega < 1:
        return ValidationReport(False, (f"omega must be >= 1, got {a.omega}",), float("nan"))
    # rounding in omega^2 - g g' grows like eps * omega^2
    tol = slack * max(1.0, a.omega**2)
    violations = _inequality_violations(a.omega, a.g, a.gp, tol)
    report = check_physical(make_eve_cm(a.omega, a.g, a.gp))
    spectral_ok = report.is_physical or report.min_eigenvalue >= 1 - tol
    if (not violations) != spectral_ok:
        raise InternalConsistencyError(
            f"inequality check ({'ok' if not violations else violations}) disagrees "
            f"with spectral check (min nu = {report.min_eigenvalue!r}) for {a}"
        )
    return ValidationReport(not violations, tuple(violations), report.min_eigenvalue)


def require_valid(a):
    report = validate(a)
    if not report.ok:
        raise AttackValidationError(f"invalid attack {a}: " + "; ".join(report.violations), report.violations)
    return a


def classify(a, tau_g=1e-9, check=True):
    """Return ``'collective'``, ``'separable-correlated'`` or ``'entangled'``.

    Entanglement is decided by the PPT criterion, which is necessary and
    sufficient for two-mode Gaussian states.
    """
    if check:
        require_valid(a)
    if abs(a.g) <= tau_g and abs(a.gp) <= tau_g:
        return "collective"
    V = make_eve_cm(a.omega, a.g, a.gp)
    report = check_physical(partial_transpose(V, 1))
    return "separable-correlated" if report.min_eigenvalue >= 1 - SLACK else "entangled"


def eve_mutual_information(a):
    """Quantum mutual information between Eve's two ancillas, in bits."""
    require_valid(a)
    nu_m, nu_p = closed_form_spectrum(a.omega, a.g, a.gp)
    # clamp boundary rounding
    nu_m, nu_p = max(nu_m, 1.0), max(nu_p, 1.0)
    return max(0.0, 2 * entropy_h(a.omega) - entropy_h(nu_m) - entropy_h(nu_p))


# Correlation rules map omega -> (g, g'); labels follow the attack-plane
# figure: (a) maximal entanglement, (b) maximal separable correlations,
# (c) anti-correlated at the same strength, (d) collective.
def _max_entangled(omega):
    s = np.sqrt(max(omega**2 - 1.0, 0.0))
    return s, -s


def _max_separable(omega):
    return omega - 1.0, omega - 1.0


def _anticorrelated(omega):
    return omega - 1.0, -(omega - 1.0)


def _collective(omega):
    return 0.0, 0.0


CORRELATION_RULES = {
    "max-entangled": _max_entangled,
    "max-separable": _max_separable,
    "anticorrelated": _anticorrelated,
    "collective": _collective,
}
RULE_ALIASES = {"a": "max-entangled", "b": "max-separable", "c": "anticorrelated", "d": "collective"}


def correlation_rule(name):
    key = RULE_ALIASES.get(name, name)
    try:
        return key, CORRELATION_RULES[key]
    except KeyError:
        raise DomainError(f"unknown correlation rule {name!r}; choose from {sorted(CORRELATION_RULES)}") from None


def boundary_arc(omega, t, upper=True):
    """Point on the edge of the allowed (g, g') region.

    The edge is two arcs, ``(omega+g)(omega+g') = 1`` and
    ``(omega-g)(omega-g') = 1``, meeting at the maximally entangled points.
    ``t`` runs over ``[-acosh(omega), acosh(omega)]``; ``t = 0`` is the
    maximally separable point and the ends are the maximally entangled ones.
    """
    x, y = np.exp(t), np.exp(-t)
    if upper:
        return omega - x, omega - y
    return x - omega, y - omega


class AttackPlane(NamedTuple):
    omega: float
    boundary: np.ndarray
    labeled: dict


def attack_plane_boundary(omega, n=200):
    """Densely sampled edge of the allowed correlation region plus labeled points."""
    if omega < 1:
        raise DomainError(f"omega must be >= 1, got {omega}")
    labeled = {
        "a": [_max_entangled(omega), tuple(-v for v in _max_entangled(omega))],
        "b": [_max_separable(omega), tuple(-v for v in _max_separable(omega))],
        "c": [_anticorrelated(omega), tuple(-v for v in _anticorrelated(omega))],
        "d": [(0.0, 0.0)],
    }
    if omega == 1:
        return AttackPlane(omega, np.zeros((1, 2)), labeled)
    tmax = np.arccosh(omega)
    t = np.linspace(-tmax, tmax, n)
    upper = np.column_stack(boundary_arc(omega, t, upper=True))
    lower = np.column_stack(boundary_arc(omega, t[::-1], upper=False))
    # closed polyline: upper arc then lower arc back
    return AttackPlane(omega, np.vstack([upper, lower[1:]]), labeled)


def boundary_samples(omega, n=16):
    """``n`` edge points, half on each arc, endpoints included."""
    k = n // 2
    tmax = np.arccosh(omega)
    t = np.linspace(-tmax, tmax, k)
    pts = [boundary_arc(omega, s, True) for s in t] + [boundary_arc(omega, s, False) for s in t]
    return [(float(g), float(gp)) for g, gp in pts]
