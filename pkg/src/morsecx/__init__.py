"""Combinatorial complexes of Morse functions on closed orientable surfaces."""

from ._kernels import BACKEND
from .cells import (
    Cell, ComplexPoset, IntegrityError, build_complex, check_branched_covering,
    check_regularity, enumerate_cells, split_cell)
from .molecule import Atom, FramedMolecule, atom_boundary, canonical_key, molecule_validate
from .permutohedron import OrderedPartition, ValidationError, enumerate_faces, refines
from .topology import homology, order_complex, pi1, rank_report
from .winding import CriticalSetup, SeparatingCurve, TwistWord, eval_B, eval_B_abs

__version__ = "0.1.0"
