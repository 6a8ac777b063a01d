"""Rerun both enrollment experiments and optionally plot them.

    python scripts/replicate_experiments.py --out-dir results/replicate [--plot]
"""

import argparse
import csv
from pathlib import Path

from neuroauth.experiments import replicate_experiments


def plot(out_dir: Path, results):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for res in results:
        name = res.experiment.name
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.semilogy(range(1, len(res.curve) + 1), res.curve.errors)
        ax.axhline(res.template.meta.epsilon, ls="--", c="grey")
        ax.set(xlabel="epoch", ylabel="|target - output|", title=f"learning curve: {res.experiment.password}")
        fig.tight_layout()
        fig.savefig(out_dir / f"{name}_curve.png", dpi=120)
        plt.close(fig)

        cands = [c for c, o in res.outcomes.items() if o.diff_vector.size]
        fig, axes = plt.subplots(1, len(cands), figsize=(3.2 * len(cands), 3), sharey=True)
        for ax, cand in zip(axes if len(cands) > 1 else [axes], cands):
            with open(out_dir / f"{name}_diff_{cand}.csv") as fh:
                diffs = [float(r["abs_difference"]) for r in csv.DictReader(fh)]
            colors = ["tab:blue"] * (len(diffs) - 1) + ["tab:red"]
            ax.bar(range(len(diffs)), diffs, color=colors)
            ax.set_title(cand)
            ax.set_xlabel("node")
        fig.tight_layout()
        fig.savefig(out_dir / f"{name}_diffs.png", dpi=120)
        plt.close(fig)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", type=Path, default=Path("results/replicate"))
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    results = replicate_experiments(args.out_dir)
    for res in results:
        print(f"{res.experiment.name}: {len(res.curve)} epochs")
        for cand, o in res.outcomes.items():
            print(f"  {cand:<14} {o.rejected_stage.value:<14} max diff {o.max_diff:.3e}")
    if args.plot:
        plot(args.out_dir, results)


if __name__ == "__main__":
    main()
