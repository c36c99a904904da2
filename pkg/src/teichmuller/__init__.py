"""Exact computational algebra: finite group cohomology, crossed modules and
crossed pairs, Galois extensions of finite commutative rings, crossed-product
algebras, and Teichmuller cocycles of normal algebras."""

__version__ = "0.1.0"
