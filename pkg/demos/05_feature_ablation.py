"""Measure what each ranking signal contributes.

One signal at a time is zeroed out of both training and test vectors,
the model is retrained, and the accuracy drop is averaged over three
train/test splits.  A positive delta means the full model is better,
so removing that signal hurt.
"""

from pathlib import Path

from flowrec import TrainConfig
from flowrec.evaluation import ablate
from flowrec.features import FEATURE_NAMES

PROJECT = Path(__file__).resolve().parents[1] / "tests" / "data" / "projects" / "alpha"


def main() -> None:
    files = [(p.name, p.read_text()) for p in sorted(PROJECT.glob("*.py"))]
    config = TrainConfig(n_trees=12, max_depth=6, seed=5)
    print(f"ablating each of {len(FEATURE_NAMES)} signals on {PROJECT.name}/ ...")
    report = ablate(files, feature_names=list(FEATURE_NAMES), seeds=(0, 1, 2), config=config)

    print("\n  full-model accuracy per split seed:")
    for seed in report.seeds:
        m = report.full[seed]
        print(
            f"    seed {seed}: top-1 {m['top1']:.3f}"
            f"  top-10 {m['top10']:.3f}  mrr {m['mrr']:.3f}"
        )

    print("\n  mean accuracy lost when a signal is removed:")
    print(f"  {'signal':<18} {'top-1':>8} {'top-10':>8} {'mrr':>8}")
    for name in FEATURE_NAMES:
        d = report.deltas[name]
        print(
            f"  {name:<18} {d['top1']:>+8.3f} {d['top10']:>+8.3f} {d['mrr']:>+8.3f}"
        )


if __name__ == "__main__":
    main()
