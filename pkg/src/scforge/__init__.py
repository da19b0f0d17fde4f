"""Design of spatially-coupled LDPC codes that minimizes length-8 graph objects."""

__version__ = "0.1.0"
