from ._core import __version__, bond_price, conditional_probs, reduction

__all__ = ["__version__", "bond_price", "conditional_probs", "reduction"]
