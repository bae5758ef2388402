"""Finite computations with pushforward monads, Kan extensions and filters."""

__version__ = "0.1.0"
