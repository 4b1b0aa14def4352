"""Simulate the OFF circuit, estimate the channel from disclosed data and pick the circuit to keep."""

import numpy as np

from twoway_qkd import AttackParams
from twoway_qkd.montecarlo import (
    classify_estimate,
    empirical_mutual_info,
    estimate_channel,
    expected_mutual_info,
    sample_protocol_run,
)
from twoway_qkd.thresholds import postselect

T, OMEGA, MU, N = 0.3, 1.097, 100.0, 10**6
gmax = np.sqrt(OMEGA**2 - 1)

for name, a in (("collective", AttackParams(T, OMEGA)), ("entangled", AttackParams(T, OMEGA, gmax, -gmax))):
    batch = sample_protocol_run("het rr OFF", a, MU, N, seed=1)
    mi = empirical_mutual_info(batch)
    est = estimate_channel(batch)
    print(f"{name} attack, {N} rounds, batch {batch.digest()[:12]}")
    print(f"  mutual info  {mi.value:.5f} +- {mi.stderr:.5f}  (closed form {expected_mutual_info(batch):.5f})")
    for label, e, truth in (("T", est.T, a.T), ("omega", est.omega, a.omega), ("g", est.g, a.g), ("gp", est.gp, a.gp)):
        print(f"  {label:5s} {e.value:+.5f} +- {e.stderr:.5f}  (true {truth:+.5f})")
    kind = classify_estimate(est)
    choice, rb = postselect("het", "rr", est.to_attack(), tau_g=3 * max(est.g.stderr, est.gp.stderr))
    print(f"  classified as {kind}; keep {choice} data, rate {rb.rate:+.4f}\n")
