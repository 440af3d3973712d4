"""Joint order batching and picker routing for rectangular multi-block warehouses."""
from .warehouse import WarehouseConfig, WarehouseGraph, generate_warehouse
from .orders import Order, OrderSet, PickerProfile, parse_order_file
from .routing import CapabilityError, Route, make_router

__version__ = "0.1.0"

__all__ = [
    "CapabilityError", "Order", "OrderSet", "PickerProfile", "Route", "WarehouseConfig",
    "WarehouseGraph", "generate_warehouse", "make_router", "parse_order_file",
]
