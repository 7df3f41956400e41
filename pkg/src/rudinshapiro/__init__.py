"""Generalized Rudin-Shapiro sequences from difference matrices over Z_p^k."""

__version__ = "0.1.0"
