"""Group raw order rows into per-customer totals."""

import csv


def read_rows(path):
    handle = open(path, newline="")
    reader = csv.reader(handle)
    rows = list(reader)
    handle.close()
    return rows


def group_totals(rows):
    totals = {}
    for row in rows:
        customer = row[0]
        amount = float(row[2])
        current = totals.get(customer, 0.0)
        totals[customer] = current + amount
    return totals


def top_customer(totals):
    best = None
    high = 0.0
    for customer, amount in totals.items():
        if amount > high:
            high = amount
            best = customer
    return best, high


def report(path):
    rows = read_rows(path)
    totals = group_totals(rows)
    leader, amount = top_customer(totals)
    summary = " ".join([leader, str(amount)])
    return summary
