"""Numerical experiments: convergence studies and TVD/positivity step sizes.

Writes one CSV per experiment into --out-dir (default ./results).

    python3 scripts/run_experiments.py --out-dir results
"""

import argparse
from pathlib import Path

from ssplab.catalog import method_names
from ssplab.experiments import ConvergenceStudy, run_convergence, step_csv, step_sweep
from ssplab.tableau import atomic_write_text

STUDIES = {
    "vdp": (["lnl-9-6-2", "lnl-9-6-3", "lnl-9-6-4"], list(range(15, 44, 4)), {}),
    "adv-spectral": (["lnl-10-8-4", "lnl-10-9-4", "plin_eq_s/8", "plin_eq_s/9"], list(range(9, 20, 2)),
                     {"cfl": 0.9, "error_floor": 1e-13}),
    "adv-weno5": (["ssprk33", "ssprk104", "lnl-9-6-2", "lnl-9-6-4"], list(range(31, 92, 10)), {"cfl": 0.9}),
    "burgers-weno5": (["plin_eq_s_minus_1/6", "lnl-6-5-4", "lnl-9-6-2", "lnl-9-6-4"], list(range(101, 202, 20)), {}),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    available = set(method_names())

    for problem, (methods, ns, kw) in STUDIES.items():
        methods = [m for m in methods if m in available]
        res = run_convergence(ConvergenceStudy(methods, problem, ns, **kw))
        atomic_write_text(args.out_dir / f"converge-{problem}.csv", res.to_csv())
        print(problem, {m: round(o, 2) for m, o in res.orders.items()})

    # Burgers before the shock forms
    methods = STUDIES["burgers-weno5"][0]
    res = run_convergence(ConvergenceStudy([m for m in methods if m in available], "burgers-weno5",
                                           list(range(101, 202, 20)), t_final=0.15))
    atomic_write_text(args.out_dir / "converge-burgers-pre-shock.csv", res.to_csv())

    linear = ["ssprk104"] + [f"plin_eq_s/{s}" for s in range(1, 11)] + [f"plin_eq_s_minus_1/{s}" for s in range(2, 11)]
    atomic_write_text(args.out_dir / "tvd-linear.csv", step_csv(step_sweep(linear, "adv-upwind")))
    atomic_write_text(args.out_dir / "tvd-buckley-leverett.csv", step_csv(step_sweep(method_names(), "buckley-leverett")))
    print(f"wrote results to {args.out_dir}")


if __name__ == "__main__":
    main()
