"""Key rates of every protocol variant at one channel, then the tolerable excess noise."""

import itertools

import numpy as np

from twoway_qkd import AttackParams, ProtocolSpec, key_rate, threshold_curve

T, OMEGA = 0.3, 1.097
attack = AttackParams(T, OMEGA)
print(f"channel T={T}, omega={OMEGA} (excess noise {attack.excess_noise:.4f} SNU), collective attack\n")

print(f"{'protocol':18s} {'I const':>9s} {'chi const':>10s} {'rate':>9s}")
for det, rec, circuit in itertools.product(("het", "hom"), ("rr", "dr"), ("ON", "OFF", "one-way")):
    rb = key_rate(ProtocolSpec(det, rec, circuit), attack)
    print(f"{rb.spec.label:18s} {rb.mutual_info.const:9.4f} {rb.holevo.const:10.4f} {rb.rate:9.4f}")

# the one-way protocol sits right at its threshold here; the ON loop tolerates more noise
grid = np.linspace(0.1, 0.9, 9)
one = threshold_curve("het rr one-way", grid)
on = threshold_curve("het rr ON", grid)
print(f"\n{'T':>5s} {'N* one-way':>11s} {'N* ON':>9s}")
for p, q in zip(one.points, on.points):
    print(f"{p.T:5.2f} {p.N_star:11.4f} {q.N_star:9.4f}")
