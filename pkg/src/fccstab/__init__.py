"""Six-body stabilizer code on the face-centred cubic lattice."""

from .lattice import LatticeSpec, Window, parse_context
from .pauli import PauliWord, generator

__all__ = ["LatticeSpec", "Window", "parse_context", "PauliWord", "generator"]
__version__ = "0.1.0"
