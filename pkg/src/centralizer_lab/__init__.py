"""Finite models of centralizers and normalizers of minimal Cantor systems."""

__version__ = "0.1.0"
