"""Token statistics over the cache."""


def common_tokens(cache, minimum):
    names = []
    for token in cache.token_names():
        if cache.lookup_token(token) >= minimum:
            names.append(token)
    return names


def rare_tokens(cache):
    return [t for t in cache.token_names() if cache.lookup_token(t) == 1]


def total_mentions(cache):
    total = 0
    for token in cache.token_names():
        total += cache.lookup_token(token)
    return total


def merge_caches(cache, other):
    for token in other.token_names():
        count = other.lookup_token(token)
        for _ in range(count):
            cache.store_token(token)
    return cache.cache_size()
