import numpy as np
import pytest

from twoway_qkd.attacks import AttackParams, excess_noise
from twoway_qkd.errors import DomainError, UnsupportedCombinationError
from twoway_qkd.keyrates import ProtocolSpec, key_rate
from twoway_qkd.thresholds import (
    N_CAP,
    correlation_sweep,
    postselect,
    rate_at_noise,
    solve_threshold,
    superadditivity_scan,
    threshold_curve,
)

W = 1.097
GMAX = np.sqrt(W**2 - 1)


# ---- solve_threshold ---------------------------------------------------------

def test_het_rr_oneway_threshold():
    p = solve_threshold("het rr one-way", 0.3)
    assert p.status == "ok"
    assert abs(p.N_star - 0.226) < 3e-3
    assert abs(p.omega_star - W) < 1e-3


def test_hom_rr_oneway_threshold():
    p = solve_threshold("hom rr one-way", 0.2)
    assert abs(p.N_star - 0.196) < 3e-3


@pytest.mark.parametrize("det", ["het", "hom"])
def test_solver_postconditions(det):
    for T in (0.1, 0.3, 0.6, 0.9):
        for circuit, rule in (("one-way", "collective"), ("ON", "collective"), ("OFF", "a"), ("OFF", "b")):
            spec = ProtocolSpec(det, "rr", circuit)
            p = solve_threshold(spec, T, rule)
            if p.status != "ok":
                continue
            assert abs(p.rate_at_root) <= 1e-6
            assert rate_at_noise(spec, T, p.N_star - 1e-4, rule) > 0
            assert abs(excess_noise(T, p.omega_star) - p.N_star) < 1e-12


def test_on_threshold_above_oneway():
    for T in np.linspace(0.05, 0.95, 10):
        on = solve_threshold("het rr ON", T).N_star
        one = solve_threshold("het rr one-way", T).N_star
        assert on > one


def test_insecure_at_zero_noise():
    # direct reconciliation one-way is insecure below 3 dB even without noise
    p = solve_threshold("het dr one-way", 0.3)
    assert p.status == "insecure" and p.N_star == 0.0 and p.rate_at_root <= 0


def test_open_threshold_at_cap():
    p = solve_threshold("het rr OFF", 0.95, "max-entangled")
    assert p.status == "open" and p.N_star == np.inf
    assert rate_at_noise("het rr OFF", 0.95, N_CAP, "a") > 0


def test_on_with_correlated_rule_unsupported():
    with pytest.raises(UnsupportedCombinationError):
        solve_threshold("het rr ON", 0.3, "max-entangled")


@pytest.mark.parametrize("T", [0.0, 5e-5, 1.0])
def test_threshold_T_domain(T):
    with pytest.raises(DomainError):
        solve_threshold("het rr one-way", T)


# ---- threshold_curve -----------------------------------------------------------

def test_curve_passes_anchor():
    curve = threshold_curve("het rr one-way", np.linspace(0.1, 0.9, 9))
    T, N = curve.as_arrays()
    assert all(p.status == "ok" for p in curve.points)
    assert abs(N[2] - 0.226) < 3e-3


def test_curve_d_identical_to_oneway():
    grid = np.linspace(0.05, 0.95, 12)
    d = threshold_curve("het rr OFF", grid, "d").as_arrays()[1]
    one = threshold_curve("het rr one-way", grid).as_arrays()[1]
    np.testing.assert_array_equal(d, one)


def test_curve_a_above_others():
    grid = np.linspace(0.05, 0.95, 10)
    na = threshold_curve("het rr OFF", grid, "a").as_arrays()[1]
    for rule in "bcd":
        assert np.all(na >= threshold_curve("het rr OFF", grid, rule).as_arrays()[1])


def test_curve_rejects_bad_grids():
    with pytest.raises(DomainError):
        threshold_curve("het rr one-way", [])
    with pytest.raises(DomainError):
        threshold_curve("het rr one-way", [0.5, 0.3])


# ---- postselect ------------------------------------------------------------------

def test_postselect_collective_uses_on():
    choice, rb = postselect("het", "rr", AttackParams(0.3, W))
    assert choice == "ON"
    assert rb.rate == key_rate("het rr ON", AttackParams(0.3, W)).rate


def test_postselect_entangled_uses_off():
    choice, rb = postselect("het", "rr", AttackParams(0.3, W, GMAX, -GMAX))
    assert choice == "OFF" and rb.rate > 0


def test_postselect_separable_uses_off():
    assert postselect("het", "rr", AttackParams(0.3, W, W - 1, W - 1))[0] == "OFF"


def test_postselect_sign_flip_invariant():
    for g, gp in [(0.1, -0.2), (W - 1, W - 1), (GMAX, -GMAX), (1e-12, 0)]:
        a, b = AttackParams(0.3, W, g, gp), AttackParams(0.3, W, -g, -gp)
        assert postselect("hom", "rr", a)[0] == postselect("hom", "rr", b)[0]


def test_postselect_tolerance():
    a = AttackParams(0.3, W, 1e-4, 0.0)
    assert postselect("het", "rr", a)[0] == "OFF"
    assert postselect("het", "rr", a, tau_g=1e-3)[0] == "ON"


# ---- scans -----------------------------------------------------------------------

def test_superadditivity_at_reference_omega():
    rep = superadditivity_scan("het", "rr", np.linspace(0.1, 0.9, 9), [W])
    assert rep.ok, rep.violations[:3] + rep.off_nonpositive[:3]
    assert rep.min_margin >= -1e-9
    for p in rep.points:
        if p.g == 0 and p.gp == 0:
            assert p.choice == "ON"
            assert p.margin == p.rate_postselected - key_rate("het rr one-way", AttackParams(p.T, p.omega)).rate


def test_margin_grows_toward_entanglement():
    sw = correlation_sweep("het rr OFF", 0.3, W, "anticorrelated")
    one = key_rate("het rr one-way", AttackParams(0.3, W)).rate
    margins = sw.rate - one
    assert np.all(np.diff(margins) > 0)
    assert abs(margins[0]) < 1e-12


def test_correlation_sweep_arc_and_errors():
    sw = correlation_sweep("hom rr OFF", 0.2, 1.049, "arc", n=21)
    order = np.argsort(sw.eve_mi)
    assert np.all(np.diff(sw.rate[order]) >= -1e-12)
    with pytest.raises(DomainError):
        correlation_sweep("het rr OFF", 0.3, W, "spiral")
