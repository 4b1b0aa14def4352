"""
Command-line interface: ``rate``, ``threshold``, ``figures`` and ``simulate``.

Options may also come from a flat ``key = value`` file given with
``--config``; explicit flags win over the file. The output directory is
resolved as flag, then the ``TWOWAY_QKD_OUTDIR`` environment variable, then
the config file, then the working directory. Every output starts with a
provenance header holding the tool version and the fully resolved options.

Exit codes: 0 success, 2 invalid input, 3 numeric failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .attacks import AttackParams, omega_from_excess
from .errors import (
    AttackValidationError,
    DegenerateInputError,
    DomainError,
    InternalConsistencyError,
    NumericError,
    UnsupportedCombinationError,
)
from .figures import FIGURES, check_figure, default_T_grid, figure_data, write_csv
from .keyrates import ProtocolSpec, key_rate, key_rate_numeric
from .montecarlo import (
    MIN_ROUNDS_MI,
    classify_estimate,
    empirical_mutual_info,
    estimate_channel,
    expected_mutual_info,
    export_csv,
    sample_protocol_run,
)
from .thresholds import threshold_curve

ENV_OUTDIR = "TWOWAY_QKD_OUTDIR"
EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3
VALIDATION_ERRORS = (DomainError, AttackValidationError, UnsupportedCombinationError, DegenerateInputError)
NUMERIC_ERRORS = (NumericError, InternalConsistencyError, ArithmeticError)


def read_config(path):
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _protocol_args(p, circuit="one-way"):
    p.add_argument("--det", default="het", help="het or hom")
    p.add_argument("--rec", default="rr", help="rr (reverse) or dr (direct)")
    p.add_argument("--circuit", default=circuit, help="on, off or one-way")


def _attack_args(p):
    p.add_argument("--T", type=float, default=None, help="transmissivity")
    noise = p.add_mutually_exclusive_group()
    noise.add_argument("--omega", type=float, default=None, help="thermal variance of Eve's ancillas")
    noise.add_argument("--N", type=float, default=None, help="excess noise in shot-noise units")
    p.add_argument("--g", type=float, default=0.0, help="q-correlation of Eve's ancillas")
    p.add_argument("--gp", type=float, default=0.0, help="p-correlation of Eve's ancillas")


def _output_args(p):
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--out", default=None, help="output file name (default: stdout)")
    p.add_argument("--outdir", default=None, help=f"output directory (env {ENV_OUTDIR})")


def build_parser():
    parser = argparse.ArgumentParser(prog="twoway-qkd", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", default=None, help="key = value file of defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="key rate with mutual information, Holevo bound and spectra")
    _protocol_args(p)
    _attack_args(p)
    p.add_argument("--numeric-mu", type=float, default=None,
                   help="also evaluate the finite-modulation CM path at this mu")
    _output_args(p)

    p = sub.add_parser("threshold", help="tolerable excess noise over a transmissivity grid")
    _protocol_args(p)
    p.add_argument("--rule", default="collective",
                   help="max-entangled, max-separable, anticorrelated, collective (or a-d)")
    p.add_argument("--T-grid", default=None, help="comma-separated transmissivities")
    p.add_argument("--T-min", type=float, default=0.1)
    p.add_argument("--T-max", type=float, default=0.9)
    p.add_argument("--T-n", type=int, default=9)
    _output_args(p)

    p = sub.add_parser("figures", help="regenerate the CSV data of a summary figure")
    p.add_argument("--fig", choices=sorted(FIGURES) + ["all"], default="all")
    p.add_argument("--T-n", type=int, default=100, help="transmissivity grid size")
    p.add_argument("--outdir", default=None, help=f"output directory (env {ENV_OUTDIR})")

    p = sub.add_parser("simulate", help="Monte-Carlo run with estimator report")
    _protocol_args(p, circuit="off")
    _attack_args(p)
    p.add_argument("--mu", type=float, default=100.0, help="modulation variance")
    p.add_argument("--n", type=int, default=100000, help="rounds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-csv", default=None, help="also export the raw batch to this file")
    _output_args(p)
    return parser, sub


def parse(argv=None):
    parser, sub = build_parser()
    pre, _ = parser.parse_known_args(argv)
    config_outdir = None
    if pre.config:
        values = read_config(pre.config)
        known = {a.dest for a in sub.choices[pre.command]._actions}
        unknown = sorted(set(values) - known)
        if unknown:
            raise DomainError(f"unknown config keys for '{pre.command}': {unknown}")
        # the environment outranks the file for the output directory
        config_outdir = values.pop("outdir", None)
        # string defaults go through each option's type conversion
        sub.choices[pre.command].set_defaults(**values)
    args = parser.parse_args(argv)
    args.config_outdir = config_outdir
    return args


def _outdir(args, default="."):
    if getattr(args, "outdir", None):
        return args.outdir
    return os.environ.get(ENV_OUTDIR) or getattr(args, "config_outdir", None) or default


def _provenance(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    cfg["outdir_resolved"] = _outdir(args)
    return {"tool": "twoway-qkd", "version": __version__, "config": cfg}


def _attack(args):
    if args.T is None:
        raise DomainError("--T is required")
    if args.N is not None:
        w = omega_from_excess(args.T, args.N)
    elif args.omega is not None:
        w = args.omega
    else:
        raise DomainError("give --omega or --N")
    return AttackParams(args.T, w, args.g, args.gp)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.ndarray):
        return " ".join(repr(float(x)) for x in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [float(x) for x in v]
    if isinstance(v, np.floating):
        return float(v)
    return v


def emit(args, header, rows, stream=None):
    """Write records as CSV or JSON lines, preceded by the provenance header."""
    prov = _provenance(args)
    close = False
    if stream is None:
        if args.out:
            os.makedirs(_outdir(args), exist_ok=True)
            stream = open(os.path.join(_outdir(args), args.out), "w", newline="")
            close = True
        else:
            stream = sys.stdout
    try:
        if args.format == "jsonl":
            stream.write(json.dumps({"provenance": prov}, default=str) + "\n")
            for r in rows:
                stream.write(json.dumps({k: _jsonable(v) for k, v in zip(header, r)}) + "\n")
        else:
            stream.write(f"# {prov['tool']} {prov['version']}\n")
            for k, v in prov["config"].items():
                stream.write(f"# {k} = {v}\n")
            stream.write(",".join(header) + "\n")
            for r in rows:
                stream.write(",".join(_fmt(v) for v in r) + "\n")
    finally:
        if close:
            stream.close()


def cmd_rate(args):
    spec = ProtocolSpec(args.det, args.rec, args.circuit)
    a = _attack(args)
    rb = key_rate(spec, a)
    header = ["protocol", "T", "omega", "N_excess", "g", "gp",
              "I_log2mu_coef", "I_const", "chi_log2mu_coef", "chi_const", "R"]
    row = [spec.label, a.T, a.omega, a.excess_noise, a.g, a.gp,
           rb.mutual_info.coef, rb.mutual_info.const, rb.holevo.coef, rb.holevo.const, rb.rate]
    for name, s in rb.spectra.items():
        header.append(f"spectrum_{name}")
        row.append(np.asarray(s))
    if args.numeric_mu:
        nr = key_rate_numeric(spec, a, args.numeric_mu)
        header += ["mu", "I_numeric", "chi_numeric", "R_numeric"]
        row += [nr.mu, nr.mutual_info, nr.holevo, nr.rate]
    emit(args, header, [row])
    return EXIT_OK


def _T_grid(args):
    if args.T_grid is not None:
        items = [s for s in str(args.T_grid).replace(" ", "").split(",") if s]
        return np.array([float(s) for s in items])
    if args.T_n < 1:
        return np.array([])
    return np.linspace(args.T_min, args.T_max, args.T_n)


def cmd_threshold(args):
    spec = ProtocolSpec(args.det, args.rec, args.circuit)
    curve = threshold_curve(spec, _T_grid(args), args.rule)
    rows = [[p.T, p.N_star, p.omega_star, p.status] for p in curve.points]
    emit(args, ["T", "N_star", "omega_star", "status"], rows)
    return EXIT_OK


def cmd_figures(args):
    outdir = _outdir(args, default="figures")
    os.makedirs(outdir, exist_ok=True)
    prov = _provenance(args)
    preamble = [f"{prov['tool']} {prov['version']}"] + [f"{k} = {v}" for k, v in prov["config"].items()]
    names = sorted(FIGURES) if args.fig == "all" else [args.fig]
    for name in names:
        cfg, panels = figure_data(name, default_T_grid(args.T_n))
        for panel, (header, rows) in panels.items():
            path = os.path.join(outdir, f"{name}_{panel}.csv")
            write_csv(path, header, rows, preamble)
            print(path)
        for c in check_figure(name, panels, cfg):
            print(f"[{'PASS' if c.ok else 'FAIL'}] {name}: {c.name} ({c.detail})", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args):
    spec = ProtocolSpec(args.det, args.rec, args.circuit)
    a = _attack(args)
    batch = sample_protocol_run(spec, a, args.mu, args.n, args.seed)
    if args.batch_csv:
        os.makedirs(_outdir(args), exist_ok=True)
        export_csv(batch, os.path.join(_outdir(args), args.batch_csv))
    header = ["quantity", "truth", "estimate", "stderr"]
    rows = [["batch_sha256", "", batch.digest(), ""]]
    if args.n < MIN_ROUNDS_MI:
        print(f"warning: {args.n} rounds is too few for the estimators (need {MIN_ROUNDS_MI}); "
              "only the batch digest is reported", file=sys.stderr)
    else:
        mi = empirical_mutual_info(batch)
        rows.append(["mutual_info", expected_mutual_info(batch), mi.value, mi.stderr])
        est = estimate_channel(batch)
        for name, truth, e in (("T", a.T, est.T), ("omega", a.omega, est.omega), ("g", a.g, est.g), ("gp", a.gp, est.gp)):
            rows.append([name, truth, e.value, e.stderr])
        rows.append(["attack_class", "", classify_estimate(est), ""])
        for flag in est.flags:
            print(f"note: {flag}", file=sys.stderr)
    emit(args, header, rows)
    return EXIT_OK


COMMANDS = {"rate": cmd_rate, "threshold": cmd_threshold, "figures": cmd_figures, "simulate": cmd_simulate}


def main(argv=None):
    try:
        args = parse(argv)
        return COMMANDS[args.command](args)
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
