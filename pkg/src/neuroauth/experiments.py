"""Reproduce the two enrollment experiments as CSV files.

Experiment 1 enrolls ``neural`` and tests it against three same-length
impostors plus one short candidate; experiment 2 does the same for
``architecture``. Seeds are fixed so reruns produce identical files.

The harness trains with ``lambda = 0.1``. At the library default of 1 the
hidden pre-activations of a 42- or 84-bit input sit deep in saturation, so
wrong passwords still get rejected but only by differences of 1e-5 to 1e-10.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .errors import IoFailure
from .template import Template, VerifyOutcome, enroll_with_curve, verify
from .trainer import LearningCurve, TrainingConfig


HARNESS_LAMBDA = 0.1


@dataclass(frozen=True)
class Experiment:
    name: str
    password: str
    candidates: tuple[str, ...]
    seed: int
    lam: float = HARNESS_LAMBDA


EXPERIMENTS = (
    Experiment("exp1", "neural", ("neural", "meural", "neurba", "signal", "mural"), seed=1),
    Experiment("exp2", "architecture", ("architecture", "manojkrsingh", "manoj_singh"), seed=2),
)


@dataclass
class ExperimentResult:
    experiment: Experiment
    template: Template
    curve: LearningCurve
    outcomes: dict[str, VerifyOutcome]


def run_experiment(exp: Experiment, config: TrainingConfig | None = None) -> ExperimentResult:
    config = config or TrainingConfig(seed=exp.seed, lam=exp.lam)
    template, curve = enroll_with_curve(exp.password, config)
    outcomes = {c: verify(template, c) for c in exp.candidates}
    return ExperimentResult(exp, template, curve, outcomes)


def write_diff_csv(path, outcome: VerifyOutcome) -> None:
    # final-output difference is the last row; an empty body means a length rejection
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node_index", "abs_difference"])
        for i, d in enumerate(outcome.diff_vector):
            w.writerow([i, f"{d:.12e}"])


def replicate_experiments(output_dir, experiments=EXPERIMENTS) -> list[ExperimentResult]:
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        results = []
        summary = [[
            "experiment", "password", "input_count", "hidden_count", "epochs",
            "candidate", "authenticated", "rejected_stage", "max_abs_difference",
        ]]
        for exp in experiments:
            res = run_experiment(exp)
            res.curve.write_csv(out / f"{exp.name}_curve.csv")
            arch = res.template.architecture
            for cand, outcome in res.outcomes.items():
                write_diff_csv(out / f"{exp.name}_diff_{cand}.csv", outcome)
                max_diff = "" if not outcome.diff_vector.size else f"{outcome.max_diff:.12e}"
                summary.append([
                    exp.name, exp.password, arch.input_count, arch.hidden_count, len(res.curve),
                    cand, str(outcome.authenticated).lower(), outcome.rejected_stage.value, max_diff,
                ])
            results.append(res)
        with open(out / "summary.csv", "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(summary)
    except OSError as exc:
        raise IoFailure(f"cannot write experiment output to {out}: {exc}") from exc
    return results
