"""RP^2 ends of cubic differentials with poles of order at most three."""

__version__ = "0.1.0"
