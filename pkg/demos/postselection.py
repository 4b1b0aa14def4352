"""Walk along the edge of the allowed (g, g') region and watch the post-selection rule."""

import numpy as np

from twoway_qkd import AttackParams, key_rate
from twoway_qkd.attacks import boundary_arc, classify, eve_mutual_information
from twoway_qkd.thresholds import postselect

T, OMEGA = 0.3, 1.097
one_way = key_rate("het rr one-way", AttackParams(T, OMEGA)).rate
print(f"one-way rate at T={T}, omega={OMEGA}: {one_way:+.4f}\n")

# start with the collective attack, then follow the edge from the separable point to maximal entanglement
attacks = [AttackParams(T, OMEGA)]
for t in np.linspace(0, np.arccosh(OMEGA), 6):
    g, gp = boundary_arc(OMEGA, t, upper=True)
    attacks.append(AttackParams(T, OMEGA, float(g), float(gp)))

print(f"{'g':>7s} {'gp':>7s} {'class':>21s} {'I(E1:E2)':>9s} {'circuit':>7s} {'rate':>8s} {'margin':>8s}")
for a in attacks:
    choice, rb = postselect("het", "rr", a)
    print(f"{a.g:7.3f} {a.gp:7.3f} {classify(a):>21s} {eve_mutual_information(a):9.4f} "
          f"{choice:>7s} {rb.rate:+8.4f} {rb.rate - one_way:+8.4f}")
