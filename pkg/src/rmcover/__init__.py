"""rmcover: covering-radius machinery for third-order Reed-Muller codes."""

__version__ = "0.1.0"
