"""The four ranking signals, each computed on a tiny worked example.

Every candidate API is scored with four numbers before the forest sees
it: a flow-sequence language-model log-probability, a sub-token name
similarity, and two co-occurrence confidences (per receiver object and
per nearby context token).
"""

from flowrec import CooccurrenceModel, NgramModel, token_similarity
from flowrec.features import path_similarity


def main() -> None:
    # --- signal 1: how natural is the flow sequence ending in the API?
    sequences = [
        ["db", "cursor"],
        ["db", "cursor", "cur", "execute", "fetchall"],
        ["db", "cursor", "cur", "execute", "fetchone"],
        ["sql", "execute", "fetchall"],
    ]
    ngram = NgramModel(n=3).train(sequences)
    print("flow language model (mean log-probability, higher is better):")
    for api in ("fetchall", "close", "append"):
        lp = ngram.sequence_logprob(["db", "cursor", "cur", "execute", api])
        print(f"  db>cursor>cur>execute>{api:<9} {lp:>8.3f}")

    # --- signal 2: does the candidate's name echo the names in the flow?
    print("\nsub-token similarity (distance-discounted):")
    for x, y in (("counter", "counter"), ("entry_point", "iter_entry_points")):
        print(f"  {x} ~ {y}: {token_similarity(x, y):.2f}")
    path = ("item_store", "store")
    print(f"  path {path} -> add_item: {path_similarity(path, 'add_item'):.3f}")

    # --- signals 3 and 4: counting who appears with whom
    cooccur = CooccurrenceModel()
    for api in ("cursor", "cursor", "close"):
        cooccur.record_invocation("db", api)
    cooccur.record_file(["db", "sql", "rows"], ["cursor", "execute"])
    cooccur.record_file(["db", "handle"], ["close"])

    print("\nobject confidence (share of the receiver's calls):")
    for api in ("cursor", "close", "commit"):
        print(f"  db -> {api:<7} {cooccur.object_confidence('db', api):.3f}")

    print("\ncontext confidence, weighted by token distance:")
    for dist in (1, 3):
        value = cooccur.weighted_context_confidence([("sql", dist)], "execute")
        print(f"  'sql' at distance {dist} -> execute: {value:.3f}")


if __name__ == "__main__":
    main()
