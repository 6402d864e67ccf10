"""Shelf label rendering for stocked items."""


def format_label(name, quantity, price):
    shown = name.upper()
    text = "%s  x%d  @ %.2f" % (shown, quantity, price)
    return text


def labels_for_store(store, table):
    labels = []
    for name, quantity in store.iter_items():
        if quantity == 0:
            continue
        price = table.get_price(name)
        text = format_label(name, quantity, price)
        labels.append(text)
    return labels


def write_labels(path, labels):
    written = 0
    with open(path, "w") as handle:
        for text in labels:
            handle.write(text)
            handle.write("\n")
            written += 1
    return written


def label_sheet(store, table, path):
    labels = labels_for_store(store, table)
    count = write_labels(path, labels)
    keys = table.price_keys()
    return count, keys
