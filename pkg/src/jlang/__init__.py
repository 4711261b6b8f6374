"""Toolkit for J expressions and the formalisms that accept or generate them."""

__version__ = "0.1.0"
