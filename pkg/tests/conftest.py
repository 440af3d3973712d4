import random

import pytest

from jobprp.orders import Order
from jobprp.warehouse import WarehouseConfig, generate_warehouse

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def small_warehouse():
    """2 aisles, 1 block, 3 locations per aisle.

    Pick nodes 2-4 (aisle 0) and 5-7 (aisle 1) front to back; artificial
    nodes 8, 9 (front) and 10, 11 (back); depot 1 hangs off node 8.
    """
    return generate_warehouse(WarehouseConfig(2, 2, 1, 12))


@pytest.fixture
def six_slot_warehouse():
    """2 aisles, 1 block, 6 locations per aisle (pick nodes 2-7 and 8-13)."""
    return generate_warehouse(WarehouseConfig(2, 2, 1, 24))


@pytest.fixture
def three_block_warehouse():
    return generate_warehouse(WarehouseConfig(4, 4, 1, 48))


@pytest.fixture
def medium_warehouse():
    return generate_warehouse(WarehouseConfig(5, 3, 2, 120))


def random_orders(rng: random.Random, products: int, count: int, max_lines: int = 3,
                  max_qty: int = 3) -> list[Order]:
    return [
        Order(i, {p: rng.randint(1, max_qty) for p in rng.sample(range(1, products + 1), rng.randint(1, max_lines))})
        for i in range(1, count + 1)
    ]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
