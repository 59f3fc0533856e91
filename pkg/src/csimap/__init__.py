"""Multi-cell massive-MIMO TDD simulator with CSI-map channel prediction."""

__version__ = "0.1.0"
