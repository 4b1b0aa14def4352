import csv

import numpy as np
import pytest

from twoway_qkd.attacks import AttackParams, validate
from twoway_qkd.errors import AttackValidationError, DegenerateInputError, DomainError
from twoway_qkd.keyrates import coefficients, mutual_info_finite
from twoway_qkd.montecarlo import (
    Pass,
    SampleBatch,
    asymptotic_convergence_check,
    classify_estimate,
    empirical_mutual_info,
    estimate_channel,
    expected_mutual_info,
    export_csv,
    sample_protocol_run,
)

import oracles

W = 1.097
GMAX = np.sqrt(W**2 - 1)
MU = 100.0


@pytest.fixture(scope="module")
def big_collective():
    return sample_protocol_run("het rr OFF", AttackParams(0.3, W), MU, 10**6, seed=7)


@pytest.fixture(scope="module")
def big_entangled():
    return sample_protocol_run("het rr OFF", AttackParams(0.3, W, GMAX, -GMAX), MU, 10**6, seed=8)


def residual(p):
    """Outcome minus the matching input quadrature."""
    if p.quadrature is None:
        return p.outcome - p.input
    return p.outcome - p.input[np.arange(len(p.outcome)), p.quadrature]


# ---- sampler ---------------------------------------------------------------------

def test_transparent_channel_shot_noise():
    a = AttackParams(1 - 1e-4, 1.0)
    het = sample_protocol_run("het rr ON", a, MU, 10**5, seed=1)
    hom = sample_protocol_run("hom rr ON", a, MU, 10**5, seed=1)
    # the state carries one unit of vacuum noise; heterodyne adds one more
    assert abs(residual(het.passes["loop"]).var() - 2.0) < 0.03
    assert abs(residual(hom.passes["loop"]).var() - 1.0) < 0.02


def test_on_postprocessed_variance():
    T, n = 0.3, 10**6
    b = sample_protocol_run("het rr ON", AttackParams(T, W), MU, n, seed=2)
    var = b.passes["loop"].outcome.var(axis=0)
    expect = T**2 + T * MU + (1 - T**2) * W + 1  # plus heterodyne noise
    se = expect * np.sqrt(2 / n)
    assert np.all(np.abs(var - expect) < 3 * se)


def test_off_residual_cross_covariance():
    T, g, gp, n = 0.4, 0.3, -0.2, 10**6
    b = sample_protocol_run("hom rr OFF", AttackParams(T, 1.2, g, gp), MU, n, seed=3)
    f, k = b.passes["forward"], b.passes["backward"]
    s = np.sqrt(T)
    for q, corr in ((0, g), (1, gp)):
        m = (f.quadrature == q) & (k.quadrature == q)
        rf = f.outcome[m] - s * f.input[m, q]
        rb = k.outcome[m] - s * k.input[m, q]
        c = np.mean(rf * rb) - rf.mean() * rb.mean()
        se = np.std(rf * rb) / np.sqrt(m.sum())
        assert abs(c - (1 - T) * corr) < 3 * se


def test_sampler_rejects_bad_input():
    with pytest.raises(AttackValidationError):
        sample_protocol_run("het rr OFF", AttackParams(0.3, W, 0.6, -0.6), MU, 100)
    with pytest.raises(DomainError):
        sample_protocol_run("het rr OFF", AttackParams(0.3, W), -1.0, 100)
    with pytest.raises(DomainError):
        sample_protocol_run("het rr OFF", AttackParams(0.3, W), MU, 0)


def test_sampler_shapes():
    b = sample_protocol_run("hom dr OFF", AttackParams(0.3, W), MU, 500, seed=0)
    assert set(b.passes) == {"forward", "backward"}
    assert b.passes["forward"].outcome.shape == (500,)
    assert set(np.unique(b.passes["forward"].quadrature)) <= {0, 1}
    b = sample_protocol_run("het rr one-way", AttackParams(0.3, W), MU, 500, seed=0)
    assert set(b.passes) == {"forward"} and b.passes["forward"].outcome.shape == (500, 2)
    assert all(np.all(np.isfinite(p.outcome)) for p in b.passes.values())


def test_reproducible_digest():
    a = AttackParams(0.3, W, 0.1, -0.1)
    x = sample_protocol_run("het rr OFF", a, MU, 2000, seed=5)
    y = sample_protocol_run("het rr OFF", a, MU, 2000, seed=5)
    z = sample_protocol_run("het rr OFF", a, MU, 2000, seed=6)
    assert x.digest() == y.digest() != z.digest()
    assert empirical_mutual_info(x) == empirical_mutual_info(y)
    assert estimate_channel(x) == estimate_channel(y)


def test_moments_converge_like_inverse_sqrt_n():
    T = 0.3
    expect = T * (MU + 1) + (1 - T) * W + 1  # forward heterodyne outcome variance
    errs = []
    for n in (10**4, 10**6):
        devs = [sample_protocol_run("het rr one-way", AttackParams(T, W), MU, n, seed=s).passes["forward"].outcome.var(axis=0)
                for s in range(8)]
        errs.append(np.sqrt(np.mean((np.array(devs) - expect) ** 2)))
    assert 4 < errs[0] / errs[1] < 25


# ---- mutual information ------------------------------------------------------------

def test_mi_zero_modulation():
    b = sample_protocol_run("het rr OFF", AttackParams(0.3, W), 0.0, 5000, seed=0)
    assert empirical_mutual_info(b).value == 0.0


def test_mi_needs_enough_rounds():
    b = sample_protocol_run("het rr OFF", AttackParams(0.3, W), MU, 999, seed=0)
    with pytest.raises(DomainError):
        empirical_mutual_info(b)


def test_mi_degenerate_batch():
    x = np.random.default_rng(0).standard_normal((2000, 2))
    b = SampleBatch(None, AttackParams(0.3, W), MU, 2000, 0, {"forward": Pass(x, x.copy(), None)}, x, {})
    with pytest.raises(DegenerateInputError):
        empirical_mutual_info(b)


def test_mi_symmetric_in_labels():
    b = sample_protocol_run("hom rr OFF", AttackParams(0.3, W), MU, 20000, seed=4)
    swapped = b._replace(passes={
        k: Pass(np.stack([p.outcome, p.outcome], axis=1), p.input[np.arange(b.n_rounds), p.quadrature], p.quadrature)
        for k, p in b.passes.items()})
    assert abs(empirical_mutual_info(b).value - empirical_mutual_info(swapped).value) < 1e-10


def test_finite_mu_closed_form_matches_network_oracle():
    for det in ("het", "hom"):
        for circuit in ("OFF", "one-way"):
            a = AttackParams(0.3, W, 0.2, -0.1)
            if circuit == "one-way":
                a = AttackParams(0.3, W)
            ow = circuit == "one-way"
            if det == "het":
                ref = oracles.off_rate(a.T, a.omega, a.g, a.gp, MU, het=True, one_way=ow)[0]
            else:
                ref = oracles.hom_off_rate(a.T, a.omega, a.g, a.gp, MU, one_way=ow)[0]
            assert abs(mutual_info_finite(f"{det} rr {circuit}", a, MU) - ref) < 1e-12


@pytest.mark.slow
def test_mi_off_het_within_one_percent(big_collective):
    T = 0.3
    lam = coefficients(AttackParams(T, W))["Lambda_off"]
    closed = np.log2((T * MU + 1 + lam) / (1 + lam))
    assert abs(expected_mutual_info(big_collective) - closed) < 1e-12
    est = empirical_mutual_info(big_collective)
    assert abs(est.value - closed) < 0.01 * closed
    assert abs(est.value - closed) < 3 * est.stderr


@pytest.mark.slow
@pytest.mark.parametrize("spec", ["hom rr OFF", "het rr ON", "hom rr ON", "het rr one-way"])
def test_mi_other_protocols(spec):
    b = sample_protocol_run(spec, AttackParams(0.3, W), MU, 10**6, seed=9)
    est, truth = empirical_mutual_info(b), expected_mutual_info(b)
    assert abs(est.value - truth) < 3 * est.stderr
    assert abs(est.value - truth) < 0.01 * truth


# ---- channel estimation -------------------------------------------------------------

@pytest.mark.slow
def test_estimate_collective(big_collective):
    est = estimate_channel(big_collective)
    assert abs(est.T.value - 0.3) < 0.005
    assert abs(est.g.value) < 3 * est.g.stderr
    assert abs(est.gp.value) < 3 * est.gp.stderr
    assert abs(est.omega.value - W) < 3 * est.omega.stderr
    assert classify_estimate(est) == "collective"


@pytest.mark.slow
def test_estimate_entangled(big_entangled):
    est = estimate_channel(big_entangled)
    for e, truth in ((est.T, 0.3), (est.omega, W), (est.g, GMAX), (est.gp, -GMAX)):
        assert abs(e.value - truth) < 3 * e.stderr
    assert classify_estimate(est) == "entangled"


def test_estimate_pure_loss():
    b = sample_protocol_run("het rr OFF", AttackParams(0.5, 1.0), MU, 10**5, seed=10)
    est = estimate_channel(b)
    assert abs(est.omega.value - 1.0) < 3 * est.omega.stderr


def test_estimate_flags_single_direction():
    b = sample_protocol_run("het rr one-way", AttackParams(0.5, 1.2), MU, 5000, seed=0)
    est = estimate_channel(b)
    assert np.isnan(est.g.value) and est.flags
    assert classify_estimate(est) == "collective"


def test_estimate_flags_transparent_channel():
    b = sample_protocol_run("het rr OFF", AttackParams(1 - 1e-7, 1.0), MU, 5000, seed=0)
    est = estimate_channel(b)
    assert np.isnan(est.g.value)
    assert any("1 - T" in f for f in est.flags)


def test_to_attack_projects_into_region():
    b = sample_protocol_run("het rr OFF", AttackParams(0.3, W, GMAX, -GMAX), MU, 5000, seed=0)
    a = estimate_channel(b).to_attack()
    assert validate(a).ok


@pytest.mark.slow
def test_estimator_unbiased_on_random_draws():
    rng = np.random.default_rng(12)
    for i in range(50):
        T, w, g, gp = oracles.random_attack(rng, True, T_range=(0.1, 0.9), w_range=(1.0, 1.5))
        b = sample_protocol_run("het rr OFF", AttackParams(T, w, g, gp), MU, 10**5, seed=100 + i)
        est = estimate_channel(b)
        for e, truth in ((est.T, T), (est.omega, w), (est.g, g), (est.gp, gp)):
            assert abs(e.value - truth) < 3 * e.stderr, (i, T, w, g, gp)


# ---- asymptotic convergence ------------------------------------------------------------

def test_convergence_report():
    rows = asymptotic_convergence_check(AttackParams(0.4, 1.2, 0.1, -0.15))
    assert rows and all(r.converging for r in rows)
    # ON-circuit spectra exist only for collective attacks
    rows = asymptotic_convergence_check(AttackParams(0.4, 1.2))
    assert all(r.converging for r in rows)
    assert any("product" in r.name for r in rows)


def test_convergence_rejects_bad_ladder():
    with pytest.raises(DomainError):
        asymptotic_convergence_check(AttackParams(0.4, 1.2), (1e4, 1e2))


# ---- export ---------------------------------------------------------------------------

def test_export_csv(tmp_path):
    b = sample_protocol_run("hom rr OFF", AttackParams(0.3, W), MU, 50, seed=0)
    path = tmp_path / "batch.csv"
    export_csv(b, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["round", "direction", "quadrature", "input", "outcome"]
    assert len(rows) == 1 + 2 * 50
    assert {r[2] for r in rows[1:]} <= {"q", "p"}
    b = sample_protocol_run("het rr one-way", AttackParams(0.3, W), MU, 50, seed=0)
    export_csv(b, path)
    with open(path) as fh:
        assert sum(1 for _ in fh) == 1 + 2 * 50
