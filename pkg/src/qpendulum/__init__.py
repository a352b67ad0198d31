"""Spectra, eigensurface topology and SUSY partners of the spherical quantum pendulum.

H = J^2 - eta cos(theta) - zeta cos^2(theta) in units of the rotational constant.
"""

__version__ = "0.1.0"

from .model import InteractionParams, MoleculeSpec, eta_from_molecule, locus_eta, zeta_from_molecule
from .basis import BandedHamiltonian, BasisSpec, assemble
from .spectral import (ConvergenceError, SolverError, Spectrum, alignment_cosine, converge_jmax,
                       orientation_cosine, solve, spectrum)
from .grid import EffectivePotentialSpec, GridWavefunction, ThetaGrid, solve_grid
from .susy import SusyCase, SusyClass, SusyPoint, classify, partner_pair, susy_point
from .topology import CrossingLocus, SurfaceScan, find_crossings, gap_map, level_pattern, scan, sign_changes

__all__ = [
    "InteractionParams", "MoleculeSpec", "eta_from_molecule", "zeta_from_molecule", "locus_eta",
    "BandedHamiltonian", "BasisSpec", "assemble",
    "ConvergenceError", "SolverError", "Spectrum", "solve", "spectrum", "converge_jmax",
    "orientation_cosine", "alignment_cosine",
    "EffectivePotentialSpec", "GridWavefunction", "ThetaGrid", "solve_grid",
    "SusyCase", "SusyClass", "SusyPoint", "classify", "partner_pair", "susy_point",
    "CrossingLocus", "SurfaceScan", "find_crossings", "gap_map", "level_pattern", "scan",
    "sign_changes",
]
