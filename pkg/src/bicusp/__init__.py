"""Rigorous certification of the bicuspid parameter space."""

__version__ = "0.1.0"
