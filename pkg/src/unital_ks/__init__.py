"""Positivity and Kadison-Schwarz checks for unital qubit maps."""

from .maps import UnitalQubitMap, identity_map, is_positive, transposition_map
from .pauli import PauliForm
from .ks import KSReport, Verdict, verify_ks
from .family import FamilyParams
from .choi import ChoiMatrix, choi_matrix

__all__ = [
    "PauliForm",
    "UnitalQubitMap",
    "identity_map",
    "transposition_map",
    "is_positive",
    "KSReport",
    "Verdict",
    "verify_ks",
    "FamilyParams",
    "ChoiMatrix",
    "choi_matrix",
]

__version__ = "0.1.0"
