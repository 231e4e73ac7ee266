"""Electron spin dynamics in counterpropagating polarized laser beams."""

__version__ = "0.1.0"
