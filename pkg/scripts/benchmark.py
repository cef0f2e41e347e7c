"""Wall-clock of the optimizer on MCLT banks of growing size (non-binding).

For each decimation N the bank is MCLT(N, k=3, k'=7/4) with a sine window.
The pseudo-inverse order is searched first, then J_f is optimized one order
above it (at the minimal order the pseudo-inverse is already stationary).

    python3 scripts/benchmark.py --sizes 4 8 16 --max-iter 2000 -o bench.csv
"""

import argparse
import csv
import time
import warnings

from obfb.banks import mclt
from obfb.filterbank import to_polyphase
from obfb.inverse import build_system, solve_min_order
from obfb.objective import CostConfig, Objective, make_kernels
from obfb.optimizer import optimize
from obfb.paramspace import build_paramspace


def run(N: int, criterion: str, max_iter: int, repeats: int) -> dict:
    bank = mclt(N, 3, 7 / 4)
    pp = to_polyphase(bank)
    t0 = time.perf_counter()
    pi = solve_min_order(pp)
    t_solve = time.perf_counter() - t0
    p1, p2 = pi.p1 + 1, pi.p2
    ps = build_paramspace(build_system(pp, p1, p2))
    obj = Objective(ps, make_kernels(ps, CostConfig(criterion), bank))
    best = float("inf")
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", "optimize. max_iter")
        for _ in range(repeats):
            t0 = time.perf_counter()
            res = optimize(obj, max_iter=max_iter)
            best = min(best, time.perf_counter() - t0)
    return {"N": N, "M": bank.M, "p1": p1, "p2": p2, "null_dim": ps.dim, "solve_s": t_solve,
            "optimize_s": best, "iterations": res.iterations,
            "per_iter_ms": 1e3 * best / max(res.iterations, 1),
            "initial_cost": res.initial_cost, "final_cost": res.cost, "reason": res.reason}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16])
    ap.add_argument("--criterion", choices=["time", "freq"], default="freq")
    ap.add_argument("--max-iter", type=int, default=2000)
    ap.add_argument("--repeats", type=int, default=1)
    ap.add_argument("-o", "--output", help="optional CSV output")
    args = ap.parse_args()

    rows = [run(N, args.criterion, args.max_iter, args.repeats) for N in args.sizes]
    print(f"{'N':>3} {'M':>3} {'(p1,p2)':>8} {'dim':>4} {'iters':>6} {'time[s]':>8} "
          f"{'ms/iter':>8} {'J0':>10} {'J':>10}  stop")
    for r in rows:
        print(f"{r['N']:>3} {r['M']:>3} {str((r['p1'], r['p2'])):>8} {r['null_dim']:>4} "
              f"{r['iterations']:>6} {r['optimize_s']:>8.3f} {r['per_iter_ms']:>8.3f} "
              f"{r['initial_cost']:>10.4g} {r['final_cost']:>10.4g}  {r['reason']}")
    if args.output:
        with open(args.output, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)


if __name__ == "__main__":
    main()
