"""Order adjustments after checkout."""


def comp_line(order, name, price):
    # A goodwill line, then a ten percent cut on the whole order.
    order.add_line(name, 1, price)
    order.apply_discount(0.10)
    return order.line_count()


def merge_orders(order, other):
    for name, count, price in other.lines:
        order.add_line(name, count, price)
    return order.line_count()


def normalize_names(names):
    cleaned = []
    for raw in names:
        name = raw.strip()
        if not name:
            continue
        name = name.lower()
        if name.startswith("sku "):
            name = name[4:]
        cleaned.append(name)
    return cleaned


def describe(order):
    count = order.line_count()
    label = order.order_id.upper()
    return f"{label}: {count} lines"


def stepped_discount(order, rates):
    for rate in rates:
        order.apply_discount(rate)
    return order.total_price()
