"""Deterministic synthetic purchase histories and order-file corpora.

The shipped fixtures under ``tests/data`` come from :func:`write_corpus`;
regenerating with the same seed reproduces them byte for byte.
"""
from __future__ import annotations

import datetime as dt
import random
from pathlib import Path

from .orders import Purchase, combine_orders, select_test_instance, write_order_file

EPOCH = dt.date(2024, 1, 1)


def random_purchases(rng: random.Random, customers: int, products: int, days: int = 30,
                     visits: tuple[int, int] = (1, 6), basket: tuple[int, int] = (1, 4),
                     max_quantity: int = 3) -> list[Purchase]:
    """Purchases of ``customers`` shoppers over ``days`` days from ``products`` product ids."""
    rows = []
    for cust in range(1, customers + 1):
        for _ in range(rng.randint(*visits)):
            date = EPOCH + dt.timedelta(days=rng.randrange(days))
            for prod in rng.sample(range(1, products + 1), rng.randint(*basket)):
                rows.append(Purchase(cust, date, prod, rng.randint(1, max_quantity)))
    rows.sort(key=lambda p: (p.customer_id, p.date, p.product_id))
    return rows


def write_purchases(path, purchases):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("customer_id,date,product_id,quantity\n")
        for p in purchases:
            fh.write(f"{p.customer_id},{p.date.isoformat()},{p.product_id},{p.quantity}\n")


def write_corpus(directory, seed: int = 2024, customers: int = 40, products: int = 120,
                 deltas=(5, 10), order_counts=range(5, 11)) -> list[Path]:
    """Purchase CSV plus ``instances_d<DELTA>_ord<O>.txt`` files in ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    purchases = random_purchases(random.Random(seed), customers, products)
    write_purchases(directory / "purchases.csv", purchases)
    written = []
    for delta in deltas:
        combined = combine_orders(purchases, delta)
        for count in order_counts:
            instance = select_test_instance(combined, count, delta)
            path = directory / f"instances_d{delta}_ord{count}.txt"
            write_order_file(path, instance.orders, comment=f"synthetic seed={seed} delta={delta} orders={count}")
            written.append(path)
    return written


if __name__ == "__main__":
    import sys
    for p in write_corpus(sys.argv[1] if len(sys.argv) > 1 else "tests/data"):
        print(p)
