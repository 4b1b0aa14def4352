"""
Data behind the two summary figures and the checks they must pass.

Each figure has four panels:

``thresholds_on``
    ON-circuit threshold against collective attacks next to the one-way one.
``thresholds_off``
    OFF-circuit thresholds for the four correlation rules.
``attack_plane``
    Edge of the allowed ``(g, g')`` region at the figure's ``omega``.
``rate_vs_correlations``
    OFF rate and Eve's ancilla mutual information along that edge.
"""

import csv
import os
from typing import NamedTuple

import numpy as np

from .attacks import AttackParams, attack_plane_boundary, boundary_arc, eve_mutual_information
from .keyrates import ProtocolSpec, key_rate
from .thresholds import correlation_sweep, threshold_curve

RULES = ("max-entangled", "max-separable", "anticorrelated", "collective")
RULE_LABELS = dict(zip(RULES, "abcd"))


class FigureConfig(NamedTuple):
    name: str
    detection: str
    reconciliation: str
    T: float
    omega: float


FIGURES = {
    "fig3": FigureConfig("fig3", "heterodyne", "reverse", 0.3, 1.097),
    "figS1": FigureConfig("figS1", "homodyne", "reverse", 0.2, 1.049),
}


def default_T_grid(n=100):
    return np.linspace(0.01, 0.99, n)


def panel_thresholds_on(cfg, T_grid):
    on = threshold_curve(ProtocolSpec(cfg.detection, cfg.reconciliation, "ON"), T_grid)
    ow = threshold_curve(ProtocolSpec(cfg.detection, cfg.reconciliation, "one-way"), T_grid)
    header = ["T", "N_on", "status_on", "N_oneway", "status_oneway"]
    rows = [[p.T, p.N_star, p.status, q.N_star, q.status] for p, q in zip(on.points, ow.points)]
    return header, rows


def panel_thresholds_off(cfg, T_grid):
    spec = ProtocolSpec(cfg.detection, cfg.reconciliation, "OFF")
    curves = [threshold_curve(spec, T_grid, r) for r in RULES]
    header = ["T"]
    for r in RULES:
        header += [f"N_{RULE_LABELS[r]}", f"status_{RULE_LABELS[r]}"]
    rows = []
    for i, T in enumerate(T_grid):
        row = [float(T)]
        for c in curves:
            row += [c.points[i].N_star, c.points[i].status]
        rows.append(row)
    return header, rows


def panel_attack_plane(cfg, n=201):
    plane = attack_plane_boundary(cfg.omega, n)
    rows = [["edge", float(g), float(gp)] for g, gp in plane.boundary]
    for label, pts in plane.labeled.items():
        rows += [[label, float(g), float(gp)] for g, gp in pts]
    return ["point", "g", "gp"], rows


def panel_rate_vs_correlations(cfg, n=101):
    """OFF rate along the upper edge, ``t`` from one maximally entangled end to the other."""
    spec = ProtocolSpec(cfg.detection, cfg.reconciliation, "OFF")
    r1 = key_rate(spec.with_circuit("one-way"), AttackParams(cfg.T, cfg.omega)).rate
    tmax = np.arccosh(cfg.omega)
    rows = []
    for t in np.linspace(-tmax, tmax, n):
        g, gp = boundary_arc(cfg.omega, t, upper=True)
        a = AttackParams(cfg.T, cfg.omega, float(g), float(gp))
        rows.append([float(t), float(g), float(gp), eve_mutual_information(a), key_rate(spec, a).rate, r1])
    return ["t", "g", "gp", "eve_mutual_info", "R_off", "R_oneway"], rows


def figure_data(name, T_grid=None, n_boundary=201, n_sweep=101):
    cfg = FIGURES[name]
    T_grid = default_T_grid() if T_grid is None else np.asarray(T_grid, float)
    return cfg, {
        "thresholds_on": panel_thresholds_on(cfg, T_grid),
        "thresholds_off": panel_thresholds_off(cfg, T_grid),
        "attack_plane": panel_attack_plane(cfg, n_boundary),
        "rate_vs_correlations": panel_rate_vs_correlations(cfg, n_sweep),
    }


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows, preamble=()):
    with open(path, "w", newline="") as fh:
        for line in preamble:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows([_fmt(v) for v in row] for row in rows)


def write_figure(name, outdir, T_grid=None, preamble=()):
    """Write the four panel CSVs of figure ``name`` to ``outdir``; return the paths."""
    cfg, panels = figure_data(name, T_grid)
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for panel, (header, rows) in panels.items():
        path = os.path.join(outdir, f"{name}_{panel}.csv")
        write_csv(path, header, rows, preamble)
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# checks shared by the acceptance suite and the CLI

class Check(NamedTuple):
    name: str
    ok: bool
    detail: str


def check_on_above_oneway(header, rows):
    """ON threshold strictly above the one-way one at every grid point."""
    i_on, i_ow = header.index("N_on"), header.index("N_oneway")
    bad = [r[0] for r in rows if not r[i_on] > r[i_ow]]
    gap = min(r[i_on] - r[i_ow] for r in rows)
    return Check("ON above one-way", not bad, f"min gap {gap:.3g}; failing T {bad[:5]}")


def check_off_ordering(header, rows, tol=1e-7):
    """OFF thresholds ordered (a) >= (b), (c) >= (d); open thresholds count as infinite."""
    col = {k: header.index(f"N_{k}") for k in "abcd"}
    bad = []
    for r in rows:
        n = {k: r[i] for k, i in col.items()}
        if not (n["a"] >= n["b"] - tol and n["a"] >= n["c"] - tol
                and n["b"] >= n["d"] - tol and n["c"] >= n["d"] - tol):
            bad.append(r[0])
    return Check("OFF ordering (a) >= (b),(c) >= (d)", not bad, f"failing T {bad[:5]}")


def check_rate_monotone_in_correlations(eve_mi, rate, tol=1e-12):
    """Rate non-decreasing once the points are sorted by Eve's mutual information."""
    order = np.argsort(eve_mi, kind="stable")
    steps = np.diff(np.asarray(rate)[order])
    worst = float(steps.min()) if steps.size else 0.0
    return Check("rate non-decreasing in correlations", worst >= -tol, f"smallest step {worst:.3g}")


def check_figure(name, panels, cfg=None):
    cfg = cfg or FIGURES[name]
    out = [check_on_above_oneway(*panels["thresholds_on"]), check_off_ordering(*panels["thresholds_off"])]
    # the rate only has to grow from the separable point toward the entangled ends
    for path in ("arc", "anticorrelated"):
        sw = correlation_sweep(ProtocolSpec(cfg.detection, cfg.reconciliation, "OFF"), cfg.T, cfg.omega, path)
        c = check_rate_monotone_in_correlations(sw.eve_mi, sw.rate)
        out.append(c._replace(name=f"{c.name} ({path})"))
    return out
