"""Convergence speed and wrong-password separation as a function of lambda.

For each lambda and password length, enrolls a few random passwords and
records the epochs needed plus the smallest max-diff over random same-length
wrong candidates. Writes one CSV row per (lambda, length, trial).

    python scripts/lambda_sweep.py --out results/lambda_sweep.csv
"""

import argparse
import csv
import warnings
from pathlib import Path

import numpy as np

from neuroauth.errors import NoConvergence
from neuroauth.template import SaturationWarning, enroll, verify
from neuroauth.trainer import TrainingConfig


def rand_pw(rng, n):
    return "".join(chr(c) for c in rng.integers(0x20, 0x7F, n))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("results/lambda_sweep.csv"))
    ap.add_argument("--lambdas", default="1,0.5,0.2,0.1,0.05")
    ap.add_argument("--lengths", default="4,8,12,16")
    ap.add_argument("--trials", type=int, default=3)
    ap.add_argument("--candidates", type=int, default=100)
    ap.add_argument("--max-epochs", type=int, default=100_000)
    args = ap.parse_args()
    warnings.simplefilter("ignore", SaturationWarning)

    rng = np.random.default_rng(0)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lambda", "length", "trial", "epochs", "converged", "smallest_wrong_max_diff"])
        for lam in map(float, args.lambdas.split(",")):
            for length in map(int, args.lengths.split(",")):
                for trial in range(args.trials):
                    pw = rand_pw(rng, length)
                    cfg = TrainingConfig(lam=lam, seed=trial, max_epochs=args.max_epochs)
                    try:
                        tpl = enroll(pw, cfg)
                    except NoConvergence as exc:
                        w.writerow([lam, length, trial, len(exc.curve), False, ""])
                        print(f"lambda={lam:<5} len={length:<3} no convergence")
                        continue
                    worst = min(
                        verify(tpl, c).max_diff
                        for c in (rand_pw(rng, length) for _ in range(args.candidates))
                        if c != pw
                    )
                    w.writerow([lam, length, trial, tpl.meta.epochs, True, f"{worst:.3e}"])
                    print(f"lambda={lam:<5} len={length:<3} epochs={tpl.meta.epochs:<7} min diff {worst:.2e}")


if __name__ == "__main__":
    main()
