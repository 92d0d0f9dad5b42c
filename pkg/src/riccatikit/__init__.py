"""riccatikit: classify, transform and solve time-dependent Riccati equations."""

__version__ = "0.1.0"
