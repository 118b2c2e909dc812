"""Reduced Verma, coinduced and mixed-product modules over W(k,l,m) in characteristic p."""

__version__ = "0.1.0"
