"""Large false-accept sweep: enroll random passwords, try random same-length impostors.

    python scripts/false_accept_sweep.py --passwords 100 --candidates 1000 --lam 1.0
"""

import argparse
import warnings

import numpy as np

from neuroauth.errors import NoConvergence
from neuroauth.template import SaturationWarning, enroll, verify
from neuroauth.trainer import TrainingConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--passwords", type=int, default=50)
    ap.add_argument("--candidates", type=int, default=500)
    ap.add_argument("--min-len", type=int, default=4)
    ap.add_argument("--max-len", type=int, default=12)
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    warnings.simplefilter("ignore", SaturationWarning)

    rng = np.random.default_rng(args.seed)
    rand = lambda n: "".join(chr(c) for c in rng.integers(0x20, 0x7F, n))  # noqa: E731
    accepts = skipped = 0
    near = []
    for i in range(args.passwords):
        n = int(rng.integers(args.min_len, args.max_len + 1))
        pw = rand(n)
        try:
            tpl = enroll(pw, TrainingConfig(lam=args.lam, seed=i))
        except NoConvergence:
            skipped += 1
            continue
        diffs = []
        for _ in range(args.candidates):
            c = rand(n)
            if c == pw:
                continue
            out = verify(tpl, c)
            accepts += out.authenticated
            diffs.append(out.max_diff)
        near.append(min(diffs))
    near = np.array(near)
    print(f"false accepts: {accepts}; not converged: {skipped}")
    print(f"per-password smallest max-diff: min {near.min():.2e}, median {np.median(near):.2e}")


if __name__ == "__main__":
    main()
