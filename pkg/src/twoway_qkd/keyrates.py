"""
Asymptotic secret-key rates of one-way and two-way coherent-state protocols.

Every rate is ``R = I - chi`` in bits per channel use. Mutual informations
and Holevo bounds grow like ``log2(mu)`` in the modulation variance ``mu``;
they are returned as :class:`LogMu` pairs ``(coef, const)`` so the divergent
parts cancel exactly and the rate is the difference of the constants.

Two evaluation paths are provided. :func:`key_rate` uses closed forms in the
attack parameters. :func:`key_rate_numeric` builds the finite-``mu``
covariance matrices, applies the measurement conditioning and takes the
entropies from numeric symplectic spectra. The two agree to ``O(1/mu)``.

Mode conventions
----------------
ON circuit, Eve's output state: ``(E1'', E1', E2'', E2')``, where the primed
modes leave the beam splitters and the double-primed modes are her kept
purifications.

OFF circuit, entanglement-based state: ``(B1, A2, A1, B2)``. ``B1`` and
``A2`` are the kept arms of the two senders' TMSV sources; ``A1`` and ``B2``
are the arms received through the forward and backward channel.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .attacks import AttackParams, closed_form_spectrum, require_valid
from .errors import DomainError, InternalConsistencyError, UnsupportedCombinationError
from .gaussian import (
    I2,
    Z2,
    add_vacuum,
    apply_beamsplitter,
    condition_heterodyne,
    condition_homodyne,
    entropy_h,
    make_eve_cm,
    symplectic_spectrum,
)

T_MIN, T_MAX = 1e-4, 1 - 1e-4
MU_ASYMPTOTIC = 1e8
LOG2E2 = np.log2(np.e / 2)  # h(nu) ~ log2(nu) + LOG2E2 for large nu
ON_PRODUCT_RTOL = 1e-4

_DETECTION = {"het": "heterodyne", "heterodyne": "heterodyne", "hom": "homodyne", "homodyne": "homodyne"}
_RECON = {"dr": "direct", "direct": "direct", "rr": "reverse", "reverse": "reverse"}
_CIRCUIT = {"on": "ON", "off": "OFF", "one-way": "one-way", "oneway": "one-way", "1way": "one-way"}


@dataclass(frozen=True)
class ProtocolSpec:
    """Detection, reconciliation and circuit; short aliases are accepted."""

    detection: str
    reconciliation: str
    circuit: str

    def __post_init__(self):
        for name, table in (("detection", _DETECTION), ("reconciliation", _RECON), ("circuit", _CIRCUIT)):
            raw = getattr(self, name)
            key = str(raw).strip().lower()
            if key not in table:
                raise DomainError(f"unknown {name} {raw!r}; choose from {sorted(set(table))}")
            object.__setattr__(self, name, table[key])

    @property
    def het(self):
        return self.detection == "heterodyne"

    @property
    def reverse(self):
        return self.reconciliation == "reverse"

    @property
    def label(self):
        det = "het" if self.het else "hom"
        rec = "RR" if self.reverse else "DR"
        return f"{det}/{rec}/{self.circuit}"

    def with_circuit(self, circuit):
        return ProtocolSpec(self.detection, self.reconciliation, circuit)


class LogMu(NamedTuple):
    """Quantity ``coef * log2(mu) + const`` in bits."""

    coef: float
    const: float

    def at(self, mu):
        return self.coef * np.log2(mu) + self.const


@dataclass(frozen=True)
class RateBreakdown:
    spec: ProtocolSpec
    attack: AttackParams
    mutual_info: LogMu
    holevo: LogMu
    rate: float
    spectra: dict = field(default_factory=dict)
    audit: dict = field(default_factory=dict)


class NumericRate(NamedTuple):
    spec: ProtocolSpec
    attack: AttackParams
    mu: float
    mutual_info: float
    holevo: float
    rate: float
    spectra: dict


def _check_domain(a):
    if not T_MIN <= a.T <= T_MAX:
        raise DomainError(f"transmissivity {a.T} outside supported range [{T_MIN}, {T_MAX}]")
    require_valid(a)


def _check_on(spec, a):
    if spec.circuit == "ON" and not a.is_collective:
        raise UnsupportedCombinationError(
            "ON-circuit rates are only available for collective attacks (g = g' = 0); "
            "correlated attacks against the ON circuit are outside this model"
        )


def _h(nu):
    return entropy_h(np.maximum(nu, 1.0))


# ---------------------------------------------------------------------------
# channel coefficients

def coefficients(a):
    """Scalars shared by the closed forms.

    ``Lambda`` is Bob's conditional noise in the ON loop and ``Lambda_off``
    that of a single pass. ``lam_pm`` and ``lamp_pm`` are single-pass
    noises seen on q and p when Eve's ancilla variance is shifted by ``+/-g``
    and ``+/-g'``; ``Gamma_pm`` enter the homodyne direct-reconciliation
    spectra.
    """
    T, w, g, gp = a.T, a.omega, a.g, a.gp
    nu_m, nu_p = closed_form_spectrum(w, g, gp)
    return {
        "Lambda": T**2 + (1 - T**2) * w,
        "Lambda_off": T + (1 - T) * w,
        "nu_pm": np.array([nu_p, nu_m]),
        "lam_pm": np.array([T + (w + g) * (1 - T), T + (w - g) * (1 - T)]),
        "lamp_pm": np.array([T + (w + gp) * (1 - T), T + (w - gp) * (1 - T)]),
        "Gamma_pm": np.array([1 - T + T * (w + gp), 1 - T + T * (w - gp)]),
        "Gamma_q_pm": np.array([1 - T + T * (w + g), 1 - T + T * (w - g)]),
    }


def nu_tilde(T, omega):
    """Finite eigenvalue of Eve's state after Bob's homodyne in the ON loop.

    ``1 + T^2 omega (1-T) + T^3`` and ``1 + T^2 omega - T^3 (omega-1)`` are the
    same polynomial.
    """
    K = T**2 + omega + T**3 * (omega - 1)
    return np.sqrt(omega * (1 + T**2 * omega * (1 - T) + T**3) / K)


def off_dr_het_spectrum(a):
    c = coefficients(a)
    return np.sqrt(c["lam_pm"] * c["lamp_pm"])


def off_rr_het_spectrum(a):
    c = coefficients(a)
    return np.sqrt((c["lam_pm"] + 1 - a.T) * (c["lamp_pm"] + 1 - a.T)) / a.T


def off_dr_hom_spectrum(a, quadrature="p"):
    """Finite eigenvalues ``eta_pm`` after conditioning on one sender quadrature.

    Conditioning on ``p`` gives the form with ``Gamma_pm`` built from ``g'``;
    ``q`` swaps the roles of ``g`` and ``g'``.
    """
    T, w = a.T, a.omega
    g, gp = (a.g, a.gp) if quadrature == "p" else (a.gp, a.g)
    G = np.array([1 - T + T * (w + gp), 1 - T + T * (w - gp)])
    return np.sqrt(np.array([w + gp, w - gp]) * np.array([T + (w + g) * (1 - T), T + (w - g) * (1 - T)]) / G)


def on_het_rr_product(T, omega):
    """Asymptotic product of the three finite eigenvalues after Bob's heterodyne."""
    return (1 + T**3 + (1 - T) * (1 + T**2) * omega) * omega / (T * (1 + T))


# ---------------------------------------------------------------------------
# covariance-matrix builders

def _mu_pair(mu_on):
    if np.isscalar(mu_on):
        return float(mu_on), float(mu_on)
    q, p = mu_on
    return float(q), float(p)


def build_eve_on_cm(a, mu_b, mu_on):
    """Eve's four-mode output state in the ON loop (collective attacks).

    Parameters
    ----------
    a : AttackParams
    mu_b : float
        Variance of Bob's outgoing thermal signal, ``mu + 1``.
    mu_on : float or (float, float)
        Variance of Alice's displacement as seen by Eve, per quadrature. Pass
        0 on a quadrature Eve's conditioning treats as known.
    """
    if not a.is_collective:
        raise UnsupportedCombinationError("Eve's ON-loop state is only defined for collective attacks")
    T, w = a.T, a.omega
    mq, mp = _mu_pair(mu_on)
    c = np.sqrt(T * (w**2 - 1))
    kept = w * I2
    psi = T * (w - mu_b) + mu_b
    base = T * w + (1 - T) ** 2 * w + T * (1 - T) * mu_b
    psit = np.diag([base + (1 - T) * mq, base + (1 - T) * mp])
    phi = (1 - T) * np.sqrt(T) * (mu_b - w)
    xi = -(1 - T) * np.sqrt(w**2 - 1)
    O = np.zeros((2, 2))
    return np.block([
        [kept, c * Z2, O, xi * Z2],
        [c * Z2, psi * I2, O, phi * I2],
        [O, O, kept, c * Z2],
        [xi * Z2, phi * I2, c * Z2, psit],
    ])


def build_eve_bob_rr_cm(a, mu):
    """Eve's ON output state joined with Bob's post-processed mode (last)."""
    T, w = a.T, a.omega
    VE = build_eve_on_cm(a, mu + 1, mu)
    bob = (T**2 + T * mu + (1 - T**2) * w) * I2
    s = np.sqrt(w**2 - 1)
    cross = np.sqrt(1 - T) * np.vstack([
        np.sqrt(T) * s * Z2,
        T * (w - 1) * I2,
        s * Z2,
        np.sqrt(T) * (T * (w - 1) - mu) * I2,
    ])
    return np.block([[VE, cross], [cross.T, bob]])


def build_eb_off_cm(a, mu_a, mu_b):
    """Entanglement-based state of the OFF circuit, modes ``(B1, A2, A1, B2)``."""
    T, w = a.T, a.omega
    if mu_a < 1 or mu_b < 1:
        raise DomainError("TMSV variances must be >= 1")
    G = np.diag([a.g, a.gp])
    db = np.sqrt(T * (mu_b**2 - 1))
    da = np.sqrt(T * (mu_a**2 - 1))
    tb = T * mu_b + (1 - T) * w
    ta = T * mu_a + (1 - T) * w
    O = np.zeros((2, 2))
    return np.block([
        [mu_b * I2, O, db * Z2, O],
        [O, mu_a * I2, O, da * Z2],
        [db * Z2, O, tb * I2, (1 - T) * G],
        [O, da * Z2, (1 - T) * G, ta * I2],
    ])


def build_oneway_cm(a, mu_a):
    """Single-pass entanglement-based state, modes ``(A, B)`` with ``B`` received."""
    T, w = a.T, a.omega
    d = np.sqrt(T * (mu_a**2 - 1))
    return np.block([[mu_a * I2, d * Z2], [d * Z2, (T * mu_a + (1 - T) * w) * I2]])


# ---------------------------------------------------------------------------
# ON, heterodyne RR: finite eigenvalues extracted numerically

def on_het_rr_finite_eigs(a, mu=MU_ASYMPTOTIC):
    """The three finite eigenvalues of Eve's state after Bob's heterodyne.

    The one eigenvalue that diverges with ``mu`` is identified by recomputing
    at ``10 mu``; the remaining three are returned and their product is
    checked against the closed form.
    """
    specs = []
    for m in (mu, 10 * mu):
        V = condition_heterodyne(build_eve_bob_rr_cm(a, m), 4)
        specs.append(symplectic_spectrum(V))
    ratio = specs[1] / specs[0]
    grows = ratio > 3.0
    if grows.sum() != 1:
        raise InternalConsistencyError(f"expected one divergent eigenvalue, ratios {ratio}")
    finite = np.sort(specs[0][~grows])
    target = on_het_rr_product(a.T, a.omega)
    if abs(np.prod(finite) / target - 1) > ON_PRODUCT_RTOL:
        raise InternalConsistencyError(
            f"finite eigenvalue product {np.prod(finite)} differs from {target} for {a}"
        )
    return finite


# ---------------------------------------------------------------------------
# closed forms

def mutual_info(spec, a):
    """Alice-Bob mutual information as ``LogMu`` (large modulation)."""
    spec = as_spec(spec)
    _check_domain(a)
    c = coefficients(a)
    noise = c["Lambda"] if spec.circuit == "ON" else c["Lambda_off"]
    if spec.het:
        return LogMu(1.0, float(np.log2(a.T / (1 + noise))))
    return LogMu(0.5, float(0.5 * np.log2(a.T / noise)))


def mutual_info_finite(spec, a, mu):
    """Mutual information at finite modulation ``mu``; OFF values are per use."""
    spec = as_spec(spec)
    _check_domain(a)
    c = coefficients(a)
    noise = c["Lambda"] if spec.circuit == "ON" else c["Lambda_off"]
    if spec.het:
        return float(np.log2((a.T * mu + 1 + noise) / (1 + noise)))
    return float(0.5 * np.log2((a.T * mu + noise) / noise))


def _holevo_parts(spec, a):
    T, w = a.T, a.omega
    c = coefficients(a)
    spectra = {}
    if spec.circuit == "ON":
        _check_on(spec, a)
        spectra["eve_total_finite"] = np.array([w, w])
        if spec.het and spec.reverse:
            nb = on_het_rr_finite_eigs(a)
            spectra["conditional_finite"] = nb
            const = np.log2(np.e / 2 * (1 - T) / (1 + T)) + 2 * _h(w) - np.sum(_h(nb))
            return LogMu(1.0, const), spectra
        if spec.het:
            spectra["conditional_finite"] = np.array([1.0, 1.0, w])
            return LogMu(1.0, np.log2(np.e / 2 * (1 - T) / (1 + T)) + _h(w)), spectra
        if spec.reverse:
            K = T**2 + w + T**3 * (w - 1)
            nt = nu_tilde(T, w)
            spectra["conditional_finite"] = np.array([nt, w])
            return LogMu(0.5, 0.5 * np.log2((1 - T) * T / K) + _h(w) - _h(nt)), spectra
        spectra["conditional_finite"] = np.array([1.0, w])
        return LogMu(0.5, 0.5 * np.log2((1 - T) / ((1 + T) * w)) + _h(w)), spectra

    if spec.circuit == "one-way":
        spectra["total_finite"] = np.array([w])
        lo = c["Lambda_off"]
        if spec.het:
            cond = (1 + (1 - T) * w) / T if spec.reverse else lo
            spectra["conditional_finite"] = np.array([cond])
            return LogMu(1.0, np.log2(np.e / 2 * (1 - T)) + _h(w) - _h(cond)), spectra
        if spec.reverse:
            spectra["conditional_finite"] = np.array([])
            return LogMu(0.5, 0.5 * np.log2(T * (1 - T) / w) + _h(w)), spectra
        gam = 1 - T + T * w
        eta = np.sqrt(w * lo / gam)
        spectra["conditional_finite"] = np.array([eta])
        return LogMu(0.5, 0.5 * np.log2((1 - T) / gam) + _h(w) - _h(eta)), spectra

    # OFF: entropies per use carry the factor 1/2 of the double use
    nu = c["nu_pm"]
    spectra["total_finite"] = nu
    s_tot = np.sum(_h(nu))
    if spec.het:
        cond = off_rr_het_spectrum(a) if spec.reverse else off_dr_het_spectrum(a)
        spectra["conditional_finite"] = cond
        return LogMu(1.0, np.log2(np.e / 2 * (1 - T)) + 0.5 * (s_tot - np.sum(_h(cond)))), spectra
    if spec.reverse:
        prod = (w**2 - a.g**2) * (w**2 - a.gp**2)
        return LogMu(0.5, 0.5 * np.log2((1 - T) * T) - np.log2(prod) / 8 + 0.5 * s_tot), spectra
    parts = []
    for quad, gam in (("p", c["Gamma_pm"]), ("q", c["Gamma_q_pm"])):
        eta = off_dr_hom_spectrum(a, quad)
        spectra[f"conditional_finite_{quad}"] = eta
        parts.append(0.5 * np.log2((1 - T) / np.sqrt(np.prod(gam))) + 0.5 * (s_tot - np.sum(_h(eta))))
    return LogMu(0.5, 0.5 * (parts[0] + parts[1])), spectra


def holevo(spec, a):
    """Eve's Holevo bound as ``LogMu``; OFF values are per channel use."""
    spec = as_spec(spec)
    _check_domain(a)
    chi, _ = _holevo_parts(spec, a)
    return LogMu(1.0 if chi.coef == 1.0 else 0.5, float(chi.const))


def key_rate(spec, a):
    """Closed-form secret-key rate with its mutual information and Holevo bound."""
    spec = as_spec(spec)
    _check_domain(a)
    _check_on(spec, a)
    info = mutual_info(spec, a)
    chi, spectra = _holevo_parts(spec, a)
    chi = LogMu(chi.coef, float(chi.const))
    if info.coef != chi.coef:
        raise InternalConsistencyError(f"log2(mu) terms do not cancel for {spec.label}: {info} vs {chi}")
    audit = {k: v for k, v in coefficients(a).items() if k != "nu_pm"}
    if spec.circuit == "ON" and not spec.het and spec.reverse:
        audit["nu_tilde"] = nu_tilde(a.T, a.omega)
    return RateBreakdown(spec, a, info, chi, float(info.const - chi.const), spectra, audit)


def rate(spec, a):
    """Shorthand for ``key_rate(spec, a).rate``."""
    return key_rate(spec, a).rate


def as_spec(spec):
    if isinstance(spec, ProtocolSpec):
        return spec
    if isinstance(spec, str):
        return ProtocolSpec(*spec.replace("/", " ").split())
    return ProtocolSpec(*spec)


# ---------------------------------------------------------------------------
# numeric path

def _split_homodyne(V, modes, quadrature):
    """Condition on one quadrature of a heterodyne of each listed mode.

    Each mode is mixed with vacuum on a balanced beam splitter and the
    auxiliary port is homodyned. This is how a sender's classical variable
    (one quadrature of a coherent-state amplitude) is represented in the
    entanglement-based picture.
    """
    n = V.shape[0] // 2
    aux = []
    for m in modes:
        V = add_vacuum(V)
        V = apply_beamsplitter(V, 0.5, m, n)
        aux.append(n)
        n += 1
    for k in sorted(aux, reverse=True):
        V = condition_homodyne(V, k, quadrature)
    return V


def _eve_entropies(spec, a, mu):
    """Return ``(S_E, S_E|x, spectra)`` at finite ``mu`` from the CMs."""
    if spec.circuit == "ON":
        total = build_eve_on_cm(a, mu + 1, mu)
        if spec.reverse:
            V = build_eve_bob_rr_cm(a, mu)
            conds = [condition_heterodyne(V, 4) if spec.het else condition_homodyne(V, 4, "q")]
        else:
            known = 0.0 if spec.het else (0.0, mu)
            conds = [build_eve_on_cm(a, mu + 1, known)]
        weight = 1.0
    else:
        if spec.circuit == "OFF":
            total = build_eb_off_cm(a, mu + 1, mu + 1)
            measured, senders = (2, 3), (0, 1)
            weight = 0.5
        else:
            total = build_oneway_cm(a, mu + 1)
            measured, senders = (1,), (0,)
            weight = 1.0
        conds = []
        quads = ("q",) if spec.het else ("q", "p")
        for quad in quads:
            V = total
            if spec.reverse:
                for m in sorted(measured, reverse=True):
                    V = condition_heterodyne(V, m) if spec.het else condition_homodyne(V, m, quad)
            elif spec.het:
                for m in sorted(senders, reverse=True):
                    V = condition_heterodyne(V, m)
            else:
                V = _split_homodyne(V, senders, quad)
            conds.append(V)
    s_tot = symplectic_spectrum(total)
    s_cond = [symplectic_spectrum(V) for V in conds]
    S = float(np.sum(_h(s_tot)))
    S_cond = float(np.mean([np.sum(_h(s)) for s in s_cond]))
    spectra = {"total": s_tot}
    for i, s in enumerate(s_cond):
        spectra[f"conditional_{i}"] = s
    return weight * S, weight * S_cond, spectra


def key_rate_numeric(spec, a, mu=MU_ASYMPTOTIC):
    """Rate from finite-``mu`` covariance matrices and numeric spectra."""
    spec = as_spec(spec)
    _check_domain(a)
    _check_on(spec, a)
    S, S_cond, spectra = _eve_entropies(spec, a, mu)
    info = mutual_info_finite(spec, a, mu)
    chi = S - S_cond
    return NumericRate(spec, a, mu, info, chi, info - chi, spectra)


# ---------------------------------------------------------------------------
# spectrum audit

class SpectrumCheck(NamedTuple):
    name: str
    kind: str  # 'exact' or 'asymptotic'
    closed: np.ndarray
    numeric: np.ndarray

    @property
    def abs_error(self):
        return float(np.max(np.abs(self.closed - self.numeric)))

    @property
    def rel_error(self):
        return float(np.max(np.abs(self.closed - self.numeric) / np.abs(self.closed)))


def _finite_part(s, n):
    return np.sort(s)[:n]


def _large_product(s, n_finite):
    return float(np.prod(np.sort(s)[n_finite:]))


def spectral_checks(a, mu=MU_ASYMPTOTIC, exact_mu=10.0):
    """Compare every closed-form spectrum with numeric eigenvalues.

    ``exact`` checks hold at any modulation and are evaluated at ``exact_mu``;
    ``asymptotic`` checks are evaluated at ``mu``. ON-loop checks are skipped
    for correlated attacks.
    """
    require_valid(a)
    T, w = a.T, a.omega
    out = []
    nu_m, nu_p = closed_form_spectrum(w, a.g, a.gp)
    out.append(SpectrumCheck("eve_input nu_pm", "exact", np.sort([nu_m, nu_p]),
                             symplectic_spectrum(make_eve_cm(w, a.g, a.gp))))

    V = build_eb_off_cm(a, exact_mu + 1, exact_mu + 1)
    dr = condition_heterodyne(condition_heterodyne(V, 1), 0)
    out.append(SpectrumCheck("off het DR sqrt(lam lam')", "exact",
                             np.sort(off_dr_het_spectrum(a)), symplectic_spectrum(dr)))

    V = build_eb_off_cm(a, mu + 1, mu + 1)
    s = symplectic_spectrum(V)
    out.append(SpectrumCheck("off total nu_pm", "asymptotic", np.sort([nu_m, nu_p]), s[:2]))
    out.append(SpectrumCheck("off total large", "asymptotic",
                             np.array([(1 - T) * mu] * 2), s[2:]))
    rr = condition_heterodyne(condition_heterodyne(V, 3), 2)
    out.append(SpectrumCheck("off het RR nu-bar'_pm", "asymptotic",
                             np.sort(off_rr_het_spectrum(a)), symplectic_spectrum(rr)))
    for quad, (x, y) in (("q", (a.g, a.gp)), ("p", (a.gp, a.g))):
        hr = condition_homodyne(condition_homodyne(V, 3, quad), 2, quad)
        closed = np.sort(np.sqrt((1 - T) * np.array([w - x, w + x]) * mu / T))
        out.append(SpectrumCheck(f"off hom RR ({quad})", "asymptotic", closed, symplectic_spectrum(hr)))
        hd = _split_homodyne(V, (0, 1), quad)
        sd = symplectic_spectrum(hd)
        out.append(SpectrumCheck(f"off hom DR eta_pm ({quad})", "asymptotic",
                                 np.sort(off_dr_hom_spectrum(a, quad)), _finite_part(sd, 2)))

    if a.is_collective:
        tot = symplectic_spectrum(build_eve_on_cm(a, mu + 1, mu))
        out.append(SpectrumCheck("on total finite", "asymptotic", np.array([w, w]), tot[:2]))
        out.append(SpectrumCheck("on total product", "asymptotic",
                                 np.array([(1 - T) ** 2 * mu**2]), np.array([_large_product(tot, 2)])))
        s = symplectic_spectrum(build_eve_on_cm(a, mu + 1, 0.0))
        out.append(SpectrumCheck("on het DR", "asymptotic",
                                 np.array([1.0, 1.0, w, (1 - T**2) * mu]), np.sort(s)))
        s = symplectic_spectrum(build_eve_on_cm(a, mu + 1, (0.0, mu)))
        out.append(SpectrumCheck("on hom DR finite", "asymptotic", np.sort([1.0, w]), _finite_part(s, 2)))
        out.append(SpectrumCheck("on hom DR product", "asymptotic",
                                 np.array([np.sqrt((1 - T) ** 2 * (1 - T**2) * w * mu**3)]),
                                 np.array([_large_product(s, 2)])))
        Vb = build_eve_bob_rr_cm(a, mu)
        s = symplectic_spectrum(condition_homodyne(Vb, 4, "q"))
        K = T**2 + w + T**3 * (w - 1)
        out.append(SpectrumCheck("on hom RR nu-tilde", "asymptotic",
                                 np.sort([nu_tilde(T, w), w]), _finite_part(s, 2)))
        out.append(SpectrumCheck("on hom RR product", "asymptotic",
                                 np.array([np.sqrt((1 - T) ** 3 * K * mu**3 / T)]),
                                 np.array([_large_product(s, 2)])))
        s = symplectic_spectrum(condition_heterodyne(Vb, 4))
        out.append(SpectrumCheck("on het RR finite product", "asymptotic",
                                 np.array([on_het_rr_product(T, w)]),
                                 np.array([np.prod(_finite_part(s, 3))])))
    return out


def asymptotic_entropy(nu):
    """Large-``nu`` form ``log2(e nu / 2)`` of the entropy function."""
    return np.log2(nu) + LOG2E2


__all__ = [
    "ProtocolSpec", "LogMu", "RateBreakdown", "NumericRate", "SpectrumCheck",
    "mutual_info", "mutual_info_finite", "holevo", "key_rate", "rate", "key_rate_numeric",
    "build_eve_on_cm", "build_eve_bob_rr_cm", "build_eb_off_cm", "build_oneway_cm",
    "coefficients", "nu_tilde", "off_dr_het_spectrum", "off_rr_het_spectrum", "off_dr_hom_spectrum",
    "on_het_rr_product", "on_het_rr_finite_eigs", "spectral_checks", "asymptotic_entropy",
]
