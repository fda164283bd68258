"""A checker for definitions that unfold on demand."""

from .utt_py import Goal, Module, check

__all__ = ["Goal", "Module", "check"]
