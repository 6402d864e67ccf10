"""Core inventory containers shared by the alpha scripts."""


class ItemStore:
    def __init__(self):
        self.items = {}
        self.history = []

    def add_item(self, name, quantity):
        current = self.items.get(name, 0)
        self.items[name] = current + quantity
        self.history.append(("add", name, quantity))
        return self.items[name]

    def remove_item(self, name, quantity):
        current = self.items.get(name, 0)
        remaining = max(0, current - quantity)
        self.items[name] = remaining
        self.history.append(("remove", name, quantity))
        return remaining

    def find_item(self, name):
        return self.items.get(name, 0)

    def iter_items(self):
        return sorted(self.items.items())

    def count_items(self):
        total = 0
        for name, quantity in self.iter_items():
            total += quantity
        return total

    def clear_items(self):
        self.items = {}
        self.history.append(("clear", "", 0))
        return self


class Order:
    def __init__(self, order_id):
        self.order_id = order_id
        self.lines = []

    def add_line(self, name, quantity, price):
        self.lines.append((name, quantity, price))
        return len(self.lines)

    def line_count(self):
        return len(self.lines)

    def total_price(self):
        total = 0.0
        for name, quantity, price in self.lines:
            total += quantity * price
        return total

    def apply_discount(self, fraction):
        adjusted = []
        for name, quantity, price in self.lines:
            adjusted.append((name, quantity, price * (1.0 - fraction)))
        self.lines = adjusted
        return self.total_price()
