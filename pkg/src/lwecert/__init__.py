"""Exact-arithmetic toolkit for LWE injectivity certificates, the LA_Q
proof kernel and its propositional translation."""

__version__ = "0.1.0"
