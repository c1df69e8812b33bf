"""modlat: certified second-moment bounds and shortest-vector experiments for
Haar-random module lattices over cyclotomic fields."""

__version__ = "0.1.0"
