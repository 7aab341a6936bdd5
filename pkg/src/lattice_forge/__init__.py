"""Finite partial lattices, congruences, Boolean-valued order and amalgamation."""

from .errors import ForgeError, ValidationError
from .order import DistLattice, FinitePoset, as_dist_lattice, build_poset, prime_filters
from .partial import PartialLattice, con_lattice, lattice_pl, validate_pl
from .measured import MeasuredPL, from_phi_table
from .terms import parse_term, theorem_a
from .amalgam import VFormation, pushout, theorem_b

__all__ = [
    "ForgeError", "ValidationError", "DistLattice", "FinitePoset", "as_dist_lattice",
    "build_poset", "prime_filters", "PartialLattice", "con_lattice", "lattice_pl",
    "validate_pl", "MeasuredPL", "from_phi_table", "parse_term", "theorem_a",
    "VFormation", "pushout", "theorem_b",
]

__version__ = "0.1.0"
