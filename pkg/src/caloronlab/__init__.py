"""caloronlab: desk-scale numerical checks for circle-bundle Chern-Simons
theory and its two-dimensional caloron BF reformulation."""

__version__ = "0.1.0"
