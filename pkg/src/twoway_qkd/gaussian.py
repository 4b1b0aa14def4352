"""
Gaussian-state linear algebra in shot-noise units.

Covariance matrices (CMs) are plain ``numpy`` arrays of shape ``(2n, 2n)``
with quadratures ordered ``(q1, p1, ..., qn, pn)`` and the vacuum normalised
to the identity.
"""

from typing import NamedTuple

import numpy as np
from scipy.linalg import block_diag

from .errors import DegenerateInputError, DomainError, NumericError

I2 = np.eye(2)
Z2 = np.diag([1.0, -1.0])
OMEGA1 = np.array([[0.0, 1.0], [-1.0, 0.0]])

# tolerance below 1 absorbed as eigensolver noise
PHYSICAL_TOL = 1e-9
PAIR_TOL = 1e-9
SYMMETRY_RTOL = 1e-12


class PhysicalityReport(NamedTuple):
    is_physical: bool
    min_eigenvalue: float


def symplectic_form(n):
    """Direct sum of ``n`` single-mode forms ``[[0, 1], [-1, 0]]``."""
    return np.kron(np.eye(n), OMEGA1)


def n_modes(V):
    V = np.asarray(V)
    if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2:
        raise DomainError(f"not a 2n x 2n matrix: shape {V.shape}")
    return V.shape[0] // 2


def _check_symmetric(V):
    scale = max(1.0, float(np.max(np.abs(V))))
    if np.max(np.abs(V - V.T)) > SYMMETRY_RTOL * scale:
        raise DomainError("covariance matrix is not symmetric")


def mode_slice(modes):
    """Row/column indices of the quadratures belonging to ``modes``."""
    if np.isscalar(modes):
        modes = [modes]
    return [2 * k + j for k in modes for j in (0, 1)]


def submatrix(V, modes):
    """Reduced CM of the listed modes, in the order given."""
    idx = mode_slice(modes)
    return np.asarray(V)[np.ix_(idx, idx)]


def direct_sum(*cms):
    return block_diag(*cms)


def thermal(nu):
    """Single-mode thermal state with variance ``nu``."""
    if nu < 1:
        raise DomainError(f"thermal variance must be >= 1, got {nu}")
    return nu * I2


def make_tmsv(mu):
    """Two-mode squeezed vacuum with thermal marginals of variance ``mu``."""
    if mu < 1:
        raise DomainError(f"TMSV variance must be >= 1, got {mu}")
    c = np.sqrt(mu**2 - 1.0)
    return np.block([[mu * I2, c * Z2], [c * Z2, mu * I2]])


def make_eve_cm(omega, g, gp):
    """Two-mode correlated thermal state with correlations ``diag(g, gp)``.

    The correlations are not checked for physicality; see
    :func:`twoway_qkd.attacks.validate`.
    """
    if omega < 1:
        raise DomainError(f"thermal variance must be >= 1, got {omega}")
    G = np.diag([float(g), float(gp)])
    return np.block([[omega * I2, G], [G, omega * I2]])


def beamsplitter_symplectic(T, i, j, n):
    """Symplectic matrix of a beam splitter of transmissivity ``T`` on modes i, j.

    Mode ``i`` exits as ``sqrt(T) i + sqrt(1-T) j`` and mode ``j`` as
    ``-sqrt(1-T) i + sqrt(T) j``.
    """
    if not 0 < T < 1:
        raise DomainError(f"transmissivity must lie in (0, 1), got {T}")
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise DomainError(f"invalid mode pair ({i}, {j}) for {n} modes")
    S = np.eye(2 * n)
    t, r = np.sqrt(T), np.sqrt(1.0 - T)
    for a, b in ((2 * i, 2 * j), (2 * i + 1, 2 * j + 1)):
        S[a, a], S[a, b] = t, r
        S[b, a], S[b, b] = -r, t
    return S


def apply_beamsplitter(V, T, i, j):
    V = np.asarray(V, dtype=float)
    S = beamsplitter_symplectic(T, i, j, n_modes(V))
    return S @ V @ S.T


def symplectic_spectrum(V):
    """Symplectic eigenvalues of ``V``, sorted ascending.

    They are the moduli of the eigenvalues of ``i Omega V``, which come in
    ``+/-`` pairs. The eigenproblem is solved for the real matrix
    ``Omega V`` so the pairs are returned as exact complex conjugates.
    """
    V = np.asarray(V, dtype=float)
    n = n_modes(V)
    _check_symmetric(V)
    try:
        ev = np.linalg.eigvals(symplectic_form(n) @ V)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed on\n{V!r}") from exc
    if not np.all(np.isfinite(ev)):
        raise NumericError(f"non-finite eigenvalues for\n{V!r}")
    mods = np.sort(np.abs(ev))
    first, second = mods[0::2], mods[1::2]
    mismatch = np.abs(first - second) > PAIR_TOL * np.maximum(1.0, second)
    if np.any(mismatch):
        raise NumericError(f"unpaired eigenvalues {mods} of i*Omega*V for\n{V!r}")
    return 0.5 * (first + second)


def entropy_h(nu):
    """Entropy in bits of a thermal mode with symplectic eigenvalue ``nu``.

    Evaluated as ``log2(a) + b*log2(1 + 1/b)`` with ``a = (nu+1)/2`` and
    ``b = (nu-1)/2``, which is algebraically the usual form and stays exact
    to rounding for very large ``nu``.
    """
    x = np.asarray(nu, dtype=float)
    if np.any(x < 1 - PHYSICAL_TOL):
        raise DomainError(f"symplectic eigenvalue below 1: {np.min(x)}")
    x = np.maximum(x, 1.0)
    a = 0.5 * (x + 1.0)
    b = 0.5 * (x - 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(b > 0, b * np.log1p(1.0 / np.where(b > 0, b, 1.0)), 0.0)
    out = np.log2(a) + tail / np.log(2.0)
    return float(out) if out.ndim == 0 else out


def von_neumann_entropy(V):
    return float(np.sum(entropy_h(symplectic_spectrum(V))))


def check_physical(V):
    """Uncertainty-principle check: positive definite and every nu >= 1."""
    V = np.asarray(V, dtype=float)
    try:
        positive = np.linalg.eigvalsh(0.5 * (V + V.T)).min() > 0
        nu_min = float(symplectic_spectrum(V).min())
    except (NumericError, DomainError):
        return PhysicalityReport(False, float("nan"))
    return PhysicalityReport(bool(positive and nu_min >= 1 - PHYSICAL_TOL), nu_min)


def _split(V, mode):
    n = n_modes(V)
    if not 0 <= mode < n:
        raise DomainError(f"mode {mode} out of range for {n} modes")
    meas = mode_slice(mode)
    rest = [k for k in range(2 * n) if k not in meas]
    V = np.asarray(V, dtype=float)
    return V[np.ix_(rest, rest)], V[np.ix_(meas, meas)], V[np.ix_(rest, meas)]


def condition_heterodyne(V, mode):
    """CM of the other modes after heterodyning ``mode``: ``A - C (B + I)^-1 C^T``."""
    A, B, C = _split(V, mode)
    BI = B + I2
    if np.linalg.cond(BI) > 1e14:
        raise NumericError(f"B + I is singular for the measured block\n{B!r}")
    return A - C @ np.linalg.solve(BI, C.T)


def condition_homodyne(V, mode, quadrature="q"):
    """CM of the other modes after homodyning one quadrature of ``mode``.

    Uses the pseudo-inverse of ``Pi B Pi`` with ``Pi`` projecting on the
    measured quadrature.
    """
    k = {"q": 0, "p": 1}.get(quadrature)
    if k is None:
        raise DomainError(f"quadrature must be 'q' or 'p', got {quadrature!r}")
    A, B, C = _split(V, mode)
    var = B[k, k]
    if not var > 0:
        raise DegenerateInputError(f"measured quadrature has variance {var}")
    c = C[:, k]
    return A - np.outer(c, c) / var


def partial_transpose(V, mode):
    """Flip the sign of ``p`` of one mode."""
    V = np.asarray(V, dtype=float)
    P = np.ones(V.shape[0])
    P[2 * mode + 1] = -1.0
    return V * np.outer(P, P)


def add_vacuum(V):
    """Append a vacuum mode."""
    return direct_sum(np.asarray(V, dtype=float), I2)


def gaussian_mutual_info(cov, x, y):
    """Mutual information in bits between jointly Gaussian variable sets.

    ``cov`` is the covariance of real random variables; ``x`` and ``y`` are
    index lists into it.
    """
    cov = np.asarray(cov, dtype=float)
    x, y = list(x), list(y)
    _, dx = np.linalg.slogdet(cov[np.ix_(x, x)])
    _, dy = np.linalg.slogdet(cov[np.ix_(y, y)])
    sign, dxy = np.linalg.slogdet(cov[np.ix_(x + y, x + y)])
    if sign <= 0:
        raise DegenerateInputError("joint covariance is not positive definite")
    return 0.5 * (dx + dy - dxy) / np.log(2.0)
