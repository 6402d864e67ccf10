"""Train a model on a small project and complete a dangling dot.

The training corpus is the shop-inventory fixture project that ships
with the test suite.  After mining it, we ask for completions at the
cursor of a file the model has never seen.
"""

from pathlib import Path

from flowrec import Recommender, TrainConfig, train_corpus

PROJECT = Path(__file__).resolve().parents[1] / "tests" / "data" / "projects" / "alpha"

# The editing session: the developer has typed a receiver and a dot.
# Everything after the dot on that line is still unknown.
EDITING = """\
from models import ItemStore

def refill(names):
    store = ItemStore()
    for name in names:
        store.
"""


def main() -> None:
    files = [(p.name, p.read_text()) for p in sorted(PROJECT.glob("*.py"))]
    print(f"training on {len(files)} files from {PROJECT.name}/ ...")
    bundle = train_corpus(files, TrainConfig(n_trees=40, seed=0))
    print(
        f"  mined {bundle.training_rows} training rows,"
        f" {len(bundle.api_frequency)} distinct APIs"
    )

    # The dot sits at line 6; its column is where "." appears.
    line = 6
    col = EDITING.splitlines()[line - 1].rindex(".")

    rec = Recommender(bundle)
    result = rec.recommend(EDITING, line, col, file_id="editing.py", k=5)

    print(f"\ncursor after '{result.receiver}.' with flow path {result.flow_path}")
    print("top suggestions:")
    for item in result.items:
        print(f"  {item.rank}. {item.name:<14} score={item.score:.4f}  [{item.source}]")

    stage_ms = "  ".join(f"{k}={v:.1f}ms" for k, v in result.timings_ms.items())
    print(f"\nstage timings: {stage_ms}")


if __name__ == "__main__":
    main()
