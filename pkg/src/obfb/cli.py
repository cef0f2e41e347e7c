"""``fb``: command-line front end.

Exit codes: 0 success (or a positive verdict), 2 negative verdict, 1 error.
Options may also come from a JSON ``--config`` file; explicit flags win.
"""

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .banks import load_bank, mclt
from .config import default_tolerances
from .diagnostics import dispersion_table, pr_residual, summary, write_dispersion_csv
from .filterbank import (AnalysisBank, BankFormatError, SynthesisBank, dtft, frequency_grid,
                         pr_poly_residual, read_bank, save_bank, to_polyphase)
from .inverse import (NotHermitianSymmetric, OrderBudgetExceeded, build_hs_system, build_system,
                      check_hs_synthesis, solve_min_order, solve_min_order_hs)
from .invertibility import is_fir_invertible
from .objective import CostConfig, Objective, make_kernels
from .optimizer import optimize, write_history
from .paramspace import assemble, build_paramspace

log = logging.getLogger("obfb")

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2
DB_FLOOR = -200.0
ROUNDTRIP_LIMIT = 1e-8

DEFAULTS = {
    "criterion": "time", "alpha": 2.0, "weights": None, "centers": None, "eps": 1e-13,
    "max_iter": 100_000, "hs": False, "p1": None, "p2": None, "grid": 4096,
    "trials": 10, "len": 1024, "seed": 0, "window": "sine", "beta": 8.0,
}


class CLIError(Exception):
    pass


def _emit(obj) -> None:
    print(json.dumps(obj, indent=1))


def _options(args) -> dict:
    """Defaults, overridden by the config file, overridden by explicit flags."""
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CLIError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise CLIError("config must be a JSON object")
        opts.update({k.replace("-", "_"): v for k, v in cfg.items()})
    for k, v in vars(args).items():
        if v is not None and k not in ("func", "config"):
            opts[k] = v
    return opts


def _analysis(path) -> AnalysisBank:
    return load_bank(path)


def _synthesis(path) -> SynthesisBank:
    bank = read_bank(path)
    if not isinstance(bank, SynthesisBank):
        raise BankFormatError(f"{path}: expected a synthesis bank")
    return bank


# --- commands ----------------------------------------------------------------

def cmd_check(args) -> int:
    bank = _analysis(args.bank)
    res = is_fir_invertible(to_polyphase(bank), tol=default_tolerances())
    _emit({"M": bank.M, "N": bank.N, "k": bank.k, **res.to_dict()})
    return EXIT_OK if res.invertible else EXIT_NEGATIVE


def _invert(bank: AnalysisBank, hs: bool) -> SynthesisBank:
    pp = to_polyphase(bank)
    tol = default_tolerances()
    return solve_min_order_hs(pp, tol=tol) if hs else solve_min_order(pp, tol=tol)


def cmd_invert(args) -> int:
    opts = _options(args)
    bank = _analysis(args.bank)
    synth = _invert(bank, bool(opts["hs"]))
    synth.metadata["poly_residual"] = pr_poly_residual(synth, to_polyphase(bank))
    if opts["hs"]:
        synth.metadata["hs_verified"] = check_hs_synthesis(synth)
    save_bank(synth, args.output)
    print(f"(p1,p2)=({synth.p1},{synth.p2})")
    _emit({k: v for k, v in synth.metadata.items() if k != "rejected"})
    return EXIT_OK


def _stem(path) -> Path:
    p = Path(path)
    return p.with_suffix("") if p.suffix == ".json" else p


def cmd_optimize(args) -> int:
    opts = _options(args)
    bank = _analysis(args.bank)
    pp = to_polyphase(bank)
    hs = bool(opts["hs"])
    if opts["p1"] is None and opts["p2"] is None:
        pi = _invert(bank, hs)
        p1, p2 = pi.p1, pi.p2
    else:
        p1, p2 = int(opts["p1"] or 0), int(opts["p2"] or 0)
    system = build_hs_system(pp, p1, p2) if hs else build_system(pp, p1, p2)
    ps = build_paramspace(system)
    if ps.residual > default_tolerances().pr:
        raise CLIError(f"no FIR inverse at (p1,p2)=({p1},{p2}): residual {ps.residual:.3e}")
    cfg = CostConfig(opts["criterion"], float(opts["alpha"]), opts["weights"],
                     None if opts["centers"] is None else np.asarray(opts["centers"], dtype=float))
    obj = Objective(ps, make_kernels(ps, cfg, bank))
    if ps.dim == 0:
        log.warning("null space is trivial at (p1,p2)=(%d,%d); the PI bank is the only inverse", p1, p2)
    res = optimize(obj, eps=float(opts["eps"]), max_iter=int(opts["max_iter"]))
    out = res.bank
    out.metadata.update({"criterion": cfg.kind, "alpha": cfg.alpha,
                         "poly_residual": pr_poly_residual(out, pp)})
    save_bank(out, args.output)

    stem = _stem(args.output)
    write_history(res, f"{stem}.history.csv")
    rows_pi = dispersion_table(assemble(ps, ps.zeros()))
    rows_opt = dispersion_table(out)
    write_dispersion_csv(rows_pi, f"{stem}.pi_dispersion.csv", "pseudo-inverse bank")
    write_dispersion_csv(rows_opt, f"{stem}.dispersion.csv", f"optimized bank, criterion {cfg.kind}")
    _emit({"p1": p1, "p2": p2, "null_dim": ps.dim, "initial_cost": res.initial_cost,
           "final_cost": res.cost, "iterations": res.iterations, "reason": res.reason,
           "hs": hs, "hs_verified": check_hs_synthesis(out) if hs else None,
           "pi": summary(rows_pi), "optimized": summary(rows_opt)})
    return EXIT_OK


def _impulse_rows(bank):
    times = bank.times if isinstance(bank, SynthesisBank) else np.arange(bank.k * bank.N)
    for j, h in enumerate(bank.impulses):
        for m, c in zip(times, h):
            yield [j, int(m), repr(float(c.real)), repr(float(c.imag)), repr(float(abs(c)))]


def _freq_rows(bank, grid: int):
    times = bank.times if isinstance(bank, SynthesisBank) else np.arange(bank.k * bank.N)
    nu = frequency_grid(grid)
    for j, h in enumerate(bank.impulses):
        mod = np.abs(dtft(h, times, nu))
        db = np.maximum(20 * np.log10(np.maximum(mod, 1e-300)), DB_FLOOR)
        for v, d in zip(nu, db):
            yield [j, repr(float(v)), repr(float(d))]


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def cmd_report(args) -> int:
    opts = _options(args)
    bank = read_bank(args.bank)
    want = {k: getattr(args, k) for k in ("impulse", "freq", "dispersion")}
    if not any(want.values()):
        want = dict.fromkeys(want, True)
    prefix = args.output
    written = []
    if want["impulse"]:
        _write_csv(f"{prefix}_impulse.csv", ["channel", "m", "re", "im", "modulus"], _impulse_rows(bank))
        written.append(f"{prefix}_impulse.csv")
    if want["freq"]:
        _write_csv(f"{prefix}_freq.csv", ["channel", "nu", "modulus_db"], _freq_rows(bank, int(opts["grid"])))
        written.append(f"{prefix}_freq.csv")
    if want["dispersion"]:
        write_dispersion_csv(dispersion_table(bank), f"{prefix}_dispersion.csv")
        written.append(f"{prefix}_dispersion.csv")
    _emit({"written": written})
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    opts = _options(args)
    analysis, synthesis = _analysis(args.analysis), _synthesis(args.synthesis)
    r = pr_residual(analysis, synthesis, int(opts["trials"]), int(opts["len"]), int(opts["seed"]))
    ok = r < ROUNDTRIP_LIMIT
    _emit({"max_residual": r, "trials": int(opts["trials"]), "length": int(opts["len"]),
           "seed": int(opts["seed"]), "rng": "numpy.random.default_rng (PCG64)", "pass": ok})
    return EXIT_OK if ok else EXIT_NEGATIVE


def _window(spec):
    if spec in ("sine", "kaiser"):
        return spec
    try:
        return np.asarray(json.loads(Path(spec).read_text()), dtype=float)
    except (OSError, ValueError) as exc:
        raise CLIError(f"window must be sine, kaiser or a JSON file of coefficients: {exc}") from exc


def cmd_gen(args) -> int:
    opts = _options(args)
    try:
        kp = Fraction(str(args.kp))
    except ValueError as exc:
        raise CLIError(f"bad k' value {args.kp!r}") from exc
    bank = mclt(args.N, args.k, kp, _window(opts["window"]), float(opts["beta"]))
    save_bank(bank, args.output)
    _emit({"M": bank.M, "N": bank.N, "k": bank.k, "window": opts["window"] if isinstance(opts["window"], str) else "custom"})
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fb", description="Oversampled filter bank inversion and optimization")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON file of option defaults")
        p.set_defaults(func=func)
        return p

    p = add("check", cmd_check, "FIR left-invertibility test")
    p.add_argument("bank")

    p = add("invert", cmd_invert, "minimal-order pseudo-inverse synthesis bank")
    p.add_argument("bank")
    p.add_argument("--hs", action="store_const", const=True, default=None)
    p.add_argument("-o", "--output", required=True)

    p = add("optimize", cmd_optimize, "optimize the synthesis bank within the PR solution set")
    p.add_argument("bank")
    p.add_argument("--criterion", choices=["time", "freq"])
    p.add_argument("--hs", action="store_const", const=True, default=None)
    p.add_argument("--alpha", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--p1", type=int)
    p.add_argument("--p2", type=int)
    p.add_argument("-o", "--output", required=True)

    p = add("report", cmd_report, "impulse, frequency and dispersion CSVs")
    p.add_argument("bank")
    p.add_argument("--impulse", action="store_true")
    p.add_argument("--freq", action="store_true")
    p.add_argument("--dispersion", action="store_true")
    p.add_argument("--grid", type=int)
    p.add_argument("-o", "--output", required=True, help="output file prefix")

    p = add("roundtrip", cmd_roundtrip, "signal reconstruction residual")
    p.add_argument("analysis")
    p.add_argument("synthesis")
    p.add_argument("--trials", type=int)
    p.add_argument("--len", type=int)
    p.add_argument("--seed", type=int)

    p = add("gen", cmd_gen, "generate an example analysis bank")
    p.add_argument("family", choices=["mclt"])
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--kp", required=True, help="redundancy k' (e.g. 7/4)")
    p.add_argument("--window", help="sine, kaiser or a JSON file of kN coefficients")
    p.add_argument("--beta", type=float)
    p.add_argument("-o", "--output", required=True)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    del args.verbose
    del args.command
    try:
        return args.func(args)
    except (CLIError, BankFormatError, OrderBudgetExceeded, NotHermitianSymmetric,
            ValueError, OSError) as exc:
        print(f"fb: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
