"""One-clean-qubit trace estimation with controlled-SWAP, and factoring built on it."""

__version__ = "0.1.0"
