"""Matrices transcribed from the literature, shipped as package data."""

from importlib import resources
from pathlib import Path

from .diffmat import DifferenceMatrix, read_matrix

# name -> (file, description)
FIXTURES = {
    "matrix1": ("matrix1_z2xz2.json", "4x4 difference matrix over Z_2 x Z_2"),
    "d8": ("d8_z2cubed.json", "GF(8) table, x^3+x+1, over Z_2^3"),
    "d9": ("d9_z3_gf9.json", "GF(9) table, x^2+1, truncated to Z_3"),
    "d9_left": ("d9_z3_normalized_left.json", "order-normalized D(9,9,Z_3), first class"),
    "d9_right": ("d9_z3_normalized_right.json", "order-normalized D(9,9,Z_3), second class"),
    "example1": ("example1_z3.json", "3x3 difference matrix over Z_3"),
    "ij_mod4": ("ij_mod4_z4.json", "ij mod 4 over Z_4; not a difference matrix"),
}


def fixture_path(name: str) -> Path:
    return Path(str(resources.files(__package__).joinpath("data", FIXTURES[name][0])))


def fixture(name: str) -> DifferenceMatrix:
    return read_matrix(fixture_path(name))
