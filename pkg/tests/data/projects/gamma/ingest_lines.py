"""Feeding raw text through the parser into the cache."""

from parsing import LineParser, TokenCache


def ingest_text(parser, cache, text):
    pairs = []
    for line in text.splitlines():
        pair = parser.parse_line(line)
        if pair is None:
            continue
        key, value = pair
        cache.store_token(key)
        pairs.append((key, value))
    return pairs


def ingest_many(cache, texts):
    parser = LineParser()
    total = 0
    for text in texts:
        pairs = ingest_text(parser, cache, text)
        total += len(pairs)
    return total, parser.skip_count()


def fresh_cache(tokens):
    cache = TokenCache()
    for token in tokens:
        cache.store_token(token)
    return cache
