"""vqclab: a desk-scale lab for agent-driven variational quantum circuit design."""

__version__ = "0.1.0"
