"""Run the optimizer for the methods shipped as fixtures in ssplab/data.

    python scripts/find_methods.py --restarts 40 9,6,4 10,8,4
"""

import argparse
import logging
from pathlib import Path

from ssplab.optimizer import OptimizationConfig, optimize, table_value
from ssplab.monotonicity import ssp_radius
from ssplab.tableau import MethodSpec, read_tableau, write_tableau

DATA = Path(__file__).resolve().parents[1] / "src" / "ssplab" / "data"
DEFAULT_SPECS = ["9,6,2", "9,6,3", "9,6,4", "6,5,4", "9,8,4", "10,8,4", "10,9,4"]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("specs", nargs="*", default=DEFAULT_SPECS, help="s,p_lin,p triples")
    ap.add_argument("--restarts", type=int, default=40)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--out-dir", type=Path, default=DATA)
    ap.add_argument("--keep-best", action="store_true", help="only overwrite a fixture with a larger radius")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for text in args.specs:
        s, p_lin, p = map(int, text.split(","))
        spec = MethodSpec(s, p_lin, p)
        out = optimize(OptimizationConfig(spec, restarts=args.restarts, seed=args.seed))
        try:
            ref = table_value(s, p_lin, p)
        except KeyError:
            ref = None
        print(f"{spec.name}: radius={out.radius:.6f} table={ref} residual={out.constraint_residual_max:.1e} valid={out.valid}")
        path = args.out_dir / f"{spec.name}.json"
        if args.keep_best and path.exists() and ssp_radius(read_tableau(path)).radius >= out.radius:
            print(f"{spec.name}: kept existing fixture")
            continue
        if out.valid:
            write_tableau(out.best, path)


if __name__ == "__main__":
    main()
