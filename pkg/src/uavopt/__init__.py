"""Rate-optimal UAV deployment over IoT device densities."""

__version__ = "0.1.0"
