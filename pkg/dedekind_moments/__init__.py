"""Verification toolkit for the twisted second moment of zeta(s)L(s, chi)."""

__version__ = "0.3.0"
