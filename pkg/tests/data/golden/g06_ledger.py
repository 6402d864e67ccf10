"""Running balances with paired updates."""


def split_entry(entry):
    kind, amount = entry
    return kind, amount


def tally(entries):
    credit = debit = 0
    for entry in entries:
        kind, amount = split_entry(entry)
        if kind == "credit":
            credit += amount
        else:
            debit += amount
    net = credit - debit
    return net


def swap(pair):
    left, right = pair
    right, left = left, right
    return left, right


def running(entries):
    totals = []
    balance = 0
    for entry in entries:
        balance += tally([entry])
        totals.append(balance)
    return totals
