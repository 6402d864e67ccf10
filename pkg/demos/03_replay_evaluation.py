"""Replay every call site in a project and measure ranking accuracy.

Each mined point is re-posed as a query: the file is truncated at the
dot, the model ranks candidates, and we record where the truth landed.
Folding by file keeps the tested file out of its own training set.
Two naive baselines calibrate the numbers: alphabetical candidate
order, and most-frequently-used-first.
"""

from pathlib import Path

from flowrec import TrainConfig, cross_validate

PROJECT = Path(__file__).resolve().parents[1] / "tests" / "data" / "projects" / "gamma"


def main() -> None:
    files = [(p.name, p.read_text()) for p in sorted(PROJECT.glob("*.py"))]
    print(f"10-fold replay over {len(files)} files of {PROJECT.name}/ ...")
    report = cross_validate(files, folds=10, config=TrainConfig(n_trees=40, seed=0))

    overall = report.overall
    print(f"  {overall.n_queries} queries, containment {overall.containment:.3f}")
    print(f"  latency median {overall.latency_median_ms:.1f} ms")

    print("\n  top-k accuracy, model vs baselines:")
    header = f"  {'k':>4} {'model':>8} {'alpha-order':>12} {'frequency':>10}"
    print(header)
    for k in sorted(overall.topk):
        row = (
            f"  {k:>4}"
            f" {overall.topk[k]:>8.3f}"
            f" {overall.baselines['alphabetical']['topk'][k]:>12.3f}"
            f" {overall.baselines['frequency']['topk'][k]:>10.3f}"
        )
        print(row)

    print(f"\n  MRR: model {overall.mrr:.3f}")
    for name, metrics in overall.baselines.items():
        print(f"       {name} {metrics['mrr']:.3f}")


if __name__ == "__main__":
    main()
