"""
Monte-Carlo prepare-and-measure simulator and channel estimator.

Quadratures are sampled from Wigner functions, which are Gaussian for every
state involved: a coherent state of amplitude ``x`` is ``x`` plus vacuum noise
of unit variance, beam splitters act linearly on the samples, heterodyne adds
unit-variance noise to each quadrature and homodyne reads one quadrature.
Sample moments therefore converge to the covariance matrices used by the
analytic code, which is what makes the simulator an independent check.
"""

import csv
import hashlib
from typing import NamedTuple, Optional

import numpy as np

from .attacks import AttackParams, _inequality_violations, classify, require_valid
from .errors import DegenerateInputError, DomainError
from .gaussian import gaussian_mutual_info, make_eve_cm
from .keyrates import as_spec, mutual_info_finite, spectral_checks

MIN_ROUNDS_MI = 1000
N_BOOT = 200
N_BLOCKS = 200
QUADS = ("q", "p")


class Pass(NamedTuple):
    """One direction of the protocol.

    ``outcome`` has shape ``(n, 2)`` for heterodyne and ``(n,)`` for
    homodyne, with the measured quadrature index (0 = q, 1 = p) in
    ``quadrature``.
    """

    input: np.ndarray
    outcome: np.ndarray
    quadrature: Optional[np.ndarray]


class SampleBatch(NamedTuple):
    spec: object
    attack: AttackParams
    mu: float
    n_rounds: int
    seed: int
    passes: dict  # 'forward' and 'backward' (OFF, one-way) or 'loop' (ON)
    beta: np.ndarray  # Bob's modulation
    extra: dict

    def digest(self):
        """SHA-256 over every sampled array, for reproducibility checks."""
        h = hashlib.sha256()
        for name in sorted(self.passes):
            p = self.passes[name]
            for arr in (p.input, p.outcome, p.quadrature):
                if arr is not None:
                    h.update(np.ascontiguousarray(arr).tobytes())
        h.update(self.beta.tobytes())
        return h.hexdigest()


def _rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def _coherent(rng, mu, n):
    """Amplitudes with per-quadrature variance ``mu`` plus the state's vacuum noise."""
    amp = np.sqrt(mu) * rng.standard_normal((n, 2)) if mu > 0 else np.zeros((n, 2))
    return amp, amp + rng.standard_normal((n, 2))


def _bs(x, e, T):
    """Transmitted and reflected outputs of a beam splitter."""
    return np.sqrt(T) * x + np.sqrt(1 - T) * e, -np.sqrt(1 - T) * x + np.sqrt(T) * e


def _measure(rng, x, het):
    n = x.shape[0]
    if het:
        return x + rng.standard_normal((n, 2)), None
    quad = rng.integers(0, 2, n).astype(np.int8)
    return x[np.arange(n), quad], quad


def sample_protocol_run(spec, a, mu, n, seed=0):
    """Simulate ``n`` rounds of the protocol against attack ``a``.

    Parameters
    ----------
    spec : ProtocolSpec or str
    a : AttackParams
    mu : float
        Modulation variance per quadrature; the average prepared state is
        thermal with variance ``mu + 1``.
    n : int
        Number of rounds.
    seed : int
        Seed of the counter-based generator.
    """
    spec = as_spec(spec)
    require_valid(a)
    if mu < 0:
        raise DomainError(f"modulation variance must be >= 0, got {mu}")
    if n < 1:
        raise DomainError(f"need at least one round, got {n}")
    T = a.T
    rng = _rng(seed)
    eve = rng.multivariate_normal(np.zeros(4), make_eve_cm(a.omega, a.g, a.gp), size=n, method="cholesky")
    e1, e2 = eve[:, :2], eve[:, 2:]
    beta, xb = _coherent(rng, mu, n)
    at_alice, _ = _bs(xb, e1, T)
    extra = {}

    if spec.circuit == "ON":
        disp = np.sqrt(mu) * rng.standard_normal((n, 2)) if mu > 0 else np.zeros((n, 2))
        back, _ = _bs(at_alice + disp, e2, T)
        out, quad = _measure(rng, back, spec.het)
        # subtract Bob's own reference amplitude
        ref = T * beta if quad is None else T * beta[np.arange(n), quad]
        passes = {"loop": Pass(disp, out - ref, quad)}
        extra["raw_outcome"] = out
    else:
        alpha, qa = _measure(rng, at_alice, spec.het)
        passes = {"forward": Pass(beta, alpha, qa)}
        if spec.circuit == "OFF":
            alpha2, xa = _coherent(rng, mu, n)
            back, _ = _bs(xa, e2, T)
            out, qb = _measure(rng, back, spec.het)
            passes["backward"] = Pass(alpha2, out, qb)
    return SampleBatch(spec, a, float(mu), int(n), int(seed), passes, beta, extra)


# ---------------------------------------------------------------------------
# estimators

class Estimate(NamedTuple):
    value: float
    stderr: float


class Moments(NamedTuple):
    """Masked first and second moments of the batch columns.

    Columns are ``(input, outcome)`` per pass and quadrature. ``S`` holds
    sums of pairwise products, ``L[i, j]`` the sum of column ``i`` over rounds
    where ``j`` is also observed, and ``N`` the pairwise counts.
    """

    names: list
    S: np.ndarray
    L: np.ndarray
    N: np.ndarray

    def cov(self, a, b):
        i, j = self.names.index(a), self.names.index(b)
        n = self.N[i, j]
        return (self.S[i, j] - self.L[i, j] * self.L[j, i] / n) / (n - 1)


def _columns(batch):
    names, cols, masks = [], [], []
    n = batch.n_rounds
    for name, p in batch.passes.items():
        for k in (0, 1):
            if p.quadrature is None:
                m = np.ones(n, bool)
                y = p.outcome[:, k]
            else:
                m = p.quadrature == k
                y = np.where(m, p.outcome, 0.0)
            names += [(name, k, "in"), (name, k, "out")]
            cols += [np.where(m, p.input[:, k], 0.0), y]
            masks += [m, m]
    return names, np.column_stack(cols), np.column_stack(masks).astype(float)


def _block_moments(batch, n_blocks):
    """Moments per contiguous block of rounds, shape ``(n_blocks, 3, m, m)``."""
    names, D, M = _columns(batch)
    out = []
    for Db, Mb in zip(np.array_split(D, n_blocks), np.array_split(M, n_blocks)):
        out.append((Db.T @ Db, Db.T @ Mb, Mb.T @ Mb))
    return names, np.array(out)


def _combine(names, blocks, weights=None):
    tot = blocks.sum(axis=0) if weights is None else np.tensordot(weights, blocks, axes=1)
    return Moments(names, tot[0], tot[1], tot[2])


def _bootstrap(batch, stat, n_boot, seed):
    """Point value and bootstrap error of ``stat(Moments)``.

    Rounds are i.i.d., so resampling contiguous blocks with replacement is a
    valid bootstrap and needs only the per-block moments.
    """
    n_blocks = int(min(N_BLOCKS, batch.n_rounds // 10))
    names, blocks = _block_moments(batch, n_blocks)
    point = stat(_combine(names, blocks))
    rng = _rng(seed)
    reps = [stat(_combine(names, blocks, np.bincount(rng.integers(0, n_blocks, n_blocks), minlength=n_blocks)))
            for _ in range(n_boot)]
    return np.asarray(point), np.std(np.array(reps), axis=0, ddof=1)


def _pair_mi(mom, name, k):
    x, y = (name, k, "in"), (name, k, "out")
    vx, vy, c = mom.cov(x, x), mom.cov(y, y), mom.cov(x, y)
    if vx <= 0 or vy <= 0:
        return 0.0  # no signal
    det = vx * vy - c * c
    if det <= 0:
        raise DegenerateInputError("rank-deficient sample covariance")
    return gaussian_mutual_info(np.array([[vx, c], [c, vy]]), [0], [1])


def _mi_stat(batch):
    def stat(mom):
        per = []
        for name, p in batch.passes.items():
            v = _pair_mi(mom, name, 0) + _pair_mi(mom, name, 1)
            # heterodyne decodes both quadratures; homodyne one per round
            per.append(v if p.quadrature is None else 0.5 * v)
        return float(np.mean(per))
    return stat


def empirical_mutual_info(batch, n_boot=N_BOOT):
    """Gaussian mutual-information estimate in bits per use with bootstrap error.

    Heterodyne sums the two quadratures; homodyne averages the single
    quadrature read per round. OFF values are averaged over the two
    directions.
    """
    if batch.n_rounds < MIN_ROUNDS_MI:
        raise DomainError(f"need at least {MIN_ROUNDS_MI} rounds, got {batch.n_rounds}")
    v, se = _bootstrap(batch, _mi_stat(batch), n_boot, batch.seed + 1)
    return Estimate(float(v), float(se))


def _pass_channel(mom, name, loop, het):
    """Transmissivity and thermal variance of one pass, averaged over quadratures."""
    d = 1.0 if het else 0.0
    keys = [((name, k, "in"), (name, k, "out")) for k in (0, 1)]
    T = float(np.mean([(mom.cov(x, y) / mom.cov(x, x)) ** 2 for x, y in keys]))
    loss = T**2 if loop else T
    ws = []
    for x, y in keys:
        var_r = mom.cov(y, y) - 2 * np.sqrt(T) * mom.cov(x, y) + T * mom.cov(x, x)
        ws.append((var_r - loss - d) / (1 - loss))
    return T, float(np.mean(ws))


def _channel_stat(batch):
    het = batch.spec.het

    def stat(mom):
        if "loop" in batch.passes:
            T, w = _pass_channel(mom, "loop", True, het)
            return np.array([T, w, np.nan, np.nan])
        Tf, wf = _pass_channel(mom, "forward", False, het)
        if "backward" not in batch.passes:
            return np.array([Tf, wf, np.nan, np.nan])
        Tb, wb = _pass_channel(mom, "backward", False, het)
        T, w = 0.5 * (Tf + Tb), 0.5 * (wf + wb)
        corr = [np.nan, np.nan]
        if 1 - T > 1e-6:
            s = np.sqrt(T)
            for k in (0, 1):
                x1, y1 = ("forward", k, "in"), ("forward", k, "out")
                x2, y2 = ("backward", k, "in"), ("backward", k, "out")
                c = mom.cov(y1, y2) - s * mom.cov(y1, x2) - s * mom.cov(x1, y2) + T * mom.cov(x1, x2)
                corr[k] = c / (1 - T)
        return np.array([T, w, corr[0], corr[1]])
    return stat


class ChannelEstimate(NamedTuple):
    T: Estimate
    omega: Estimate
    g: Estimate
    gp: Estimate
    flags: tuple

    def to_attack(self):
        """Nearest allowed attack: ``omega >= 1`` and correlations shrunk onto the region."""
        T = float(np.clip(self.T.value, 1e-4, 1 - 1e-4))
        w = max(1.0, self.omega.value)
        g = 0.0 if np.isnan(self.g.value) else self.g.value
        gp = 0.0 if np.isnan(self.gp.value) else self.gp.value
        return AttackParams(T, w, *_shrink_to_region(w, g, gp))


def _shrink_to_region(w, g, gp):
    if not _inequality_violations(w, g, gp, 0.0) or (g == 0 and gp == 0):
        return g, gp
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _inequality_violations(w, mid * g, mid * gp, 0.0):
            hi = mid
        else:
            lo = mid
    return lo * g, lo * gp


def estimate_channel(batch, n_boot=N_BOOT):
    """Tomography of ``(T, omega, g, g')`` from disclosed inputs and outcomes.

    ``T`` comes from the input-outcome covariance, ``omega`` from the residual
    variance and the correlations from the covariance of forward and backward
    residuals divided by ``1 - T``. Correlations need both directions and are
    unavailable for the ON loop and the one-way protocol.
    """
    point, se = _bootstrap(batch, _channel_stat(batch), n_boot, batch.seed + 2)
    flags = []
    if np.isnan(point[2]):
        if "backward" in batch.passes:
            flags.append("1 - T below 1e-6: correlations unavailable")
        else:
            flags.append("single direction: correlations unavailable")
    est = [Estimate(float(v), float(e)) for v, e in zip(point, se)]
    return ChannelEstimate(*est, tuple(flags))


def classify_estimate(est, k=3.0):
    """Attack class of an estimate with a ``k``-standard-error collective test."""
    if np.isnan(est.g.value):
        return "collective"
    tau = k * max(est.g.stderr, est.gp.stderr)
    a = est.to_attack()
    return classify(a, tau_g=tau)


# ---------------------------------------------------------------------------
# convergence of the asymptotic spectra

class ConvergenceRow(NamedTuple):
    name: str
    kind: str
    errors: tuple  # relative error per mu in the ladder

    @property
    def converging(self):
        e = self.errors
        return e[-1] < 1e-3 and (e[-1] <= e[0] or e[-1] < 1e-6)


def asymptotic_convergence_check(a, mu_ladder=(1e2, 1e4, 1e6, 1e8)):
    """Relative error of every asymptotic spectrum across a modulation ladder.

    A row that fails to decay (``converging`` false) points at a formula or
    implementation mismatch.
    """
    mus = list(mu_ladder)
    if any(b <= c for c, b in zip(mus, mus[1:])):
        raise DomainError("modulation ladder must be increasing")
    table = {}
    for mu in mus:
        for c in spectral_checks(a, mu=mu):
            if c.kind == "asymptotic":
                table.setdefault(c.name, []).append(c.rel_error)
    return [ConvergenceRow(k, "asymptotic", tuple(v)) for k, v in table.items()]


# ---------------------------------------------------------------------------
# reference values and export

def expected_mutual_info(batch):
    """Finite-modulation closed form for the batch's protocol and attack."""
    return mutual_info_finite(batch.spec, batch.attack, batch.mu)


def export_csv(batch, path):
    """Long-format CSV: one row per round, direction and measured quadrature."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["round", "direction", "quadrature", "input", "outcome"])
        rounds = np.arange(batch.n_rounds)
        for name, p in batch.passes.items():
            if p.quadrature is None:
                r = np.repeat(rounds, 2)
                k = np.tile([0, 1], batch.n_rounds)
                x, y = p.input.ravel(), p.outcome.ravel()
            else:
                r, k = rounds, p.quadrature
                x, y = p.input[rounds, k], p.outcome
            w.writerows(
                (int(i), name, QUADS[j], repr(float(u)), repr(float(v)))
                for i, j, u, v in zip(r, k, x, y)
            )
