"""Monotone decontamination of dynamic graphs by mobile agents."""

__version__ = "0.1.0"
