from . import congruences, intervals, nonrel, polyhedra, simplex, strings

__all__ = ["congruences", "intervals", "nonrel", "polyhedra", "simplex", "strings"]
