"""Verification and construction engine for left-invariant Einstein and
weakly-Einstein connections on the special linear and pseudo-unitary
families of simple Lie algebras."""

__version__ = "0.1.0"
