"""Walk through the flow edges extracted from a small file.

The analysis is optimistic: relations come from local names and syntax
only, with no aliasing and no type information.  A variable's incoming
edges are dropped when it is rebound, so each edge reflects the most
recent definition that could have produced the value.
"""

from flowrec import analyze_context, parse_source

SOURCE = '''\
def load_words(path):
    handle = open(path)
    text = handle.read()
    handle.close()
    words = text.split()
    index = {}
    for word in words:
        bucket = index.get(word, [])
        bucket.append(word)
        index[word] = bucket
    return index
'''


def main() -> None:
    print("source under analysis:")
    for no, line in enumerate(SOURCE.splitlines(), 1):
        print(f"  {no:>2}  {line}")

    result = analyze_context(parse_source(SOURCE, "load_words.py"))

    print(f"\n{len(result.edges)} flow edges, grouped by the syntax that made them:")
    by_rule: dict[str, list] = {}
    for edge in result.edges:
        by_rule.setdefault(edge.rule, []).append(edge)
    for rule in sorted(by_rule):
        print(f"\n  {rule}:")
        for edge in by_rule[rule]:
            print(f"    line {edge.line:>2}: {edge.src} -> {edge.dst}")

    # The chain handle -> read -> close shows method calls composing:
    # each attribute access continues the flow of its receiver.
    pairs = result.edge_pairs()
    print("\nchained receiver example:")
    for pair in [("handle", "read"), ("handle", "close"), ("text", "split")]:
        marker = "yes" if pair in pairs else "no"
        print(f"  {pair[0]} -> {pair[1]}: {marker}")


if __name__ == "__main__":
    main()
