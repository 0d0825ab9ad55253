"""Desk-scale toolkit for vision-based lane keeping via behavioral cloning."""

__version__ = "0.1.0"
