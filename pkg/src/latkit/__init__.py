"""latkit: exact lattice computations around even hyperbolic lattices,
chamber graphs in II(1,25), and zero-entropy verdicts."""

__version__ = "0.1.0"
