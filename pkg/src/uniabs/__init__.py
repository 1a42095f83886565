"""uniabs: a configurable abstract interpreter for the Universal toy language."""

__version__ = "0.1.0"
