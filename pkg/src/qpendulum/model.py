"""Dimensionless interaction strengths and molecule/field unit conversions.

All energies in this package are expressed in units of the rotational
constant B, so a field enters only through two numbers: the orienting
strength ``eta`` (coefficient of -cos(theta)) and the aligning strength
``zeta`` (coefficient of -cos^2(theta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

# CODATA 2018 (h and c exact; eps0 measured).
PLANCK = 6.62607015e-34  # J s
SPEED_OF_LIGHT = 299792458.0  # m / s
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F / m
DEBYE = 1e-21 / SPEED_OF_LIGHT  # C m

# unit factors to SI
KV_PER_CM = 1e5  # V / m
W_PER_CM2 = 1e4  # W / m^2
ANGSTROM3 = 1e-30  # m^3
PER_CM = 100.0  # m^-1


@dataclass(frozen=True)
class InteractionParams:
    """Orienting (``eta``) and aligning (``zeta``) strengths in units of B.

    ``eta`` may be negative. A negative ``eta`` is the mirror image
    theta -> pi - theta of the problem with ``-eta``.
    """

    eta: float
    zeta: float

    def __post_init__(self):
        if not (math.isfinite(self.eta) and math.isfinite(self.zeta)):
            raise ValueError(f"non-finite interaction strengths: eta={self.eta}, zeta={self.zeta}")
        if self.zeta < 0:
            raise ValueError(f"zeta must be >= 0, got {self.zeta}")

    def mirrored(self) -> "InteractionParams":
        return InteractionParams(-self.eta, self.zeta)

    @property
    def topological_index(self) -> float:
        """eta / (2 sqrt(zeta)); integer values sit on crossing loci."""
        if self.zeta == 0:
            return math.copysign(math.inf, self.eta) if self.eta else math.nan
        return self.eta / (2.0 * math.sqrt(self.zeta))


@dataclass(frozen=True)
class MoleculeSpec:
    """A linear polar, polarizable molecule in collinear fields.

    Units: dipole in debye, rot_const in cm^-1, polarizability volumes in
    Angstrom^3, static field in kV/cm, laser intensity in W/cm^2.
    """

    dipole: float
    rot_const: float
    alpha_par: float = 0.0
    alpha_perp: float = 0.0
    field_static: Optional[float] = None
    intensity: Optional[float] = None

    def __post_init__(self):
        if not self.rot_const > 0:
            raise ValueError(f"rot_const must be > 0, got {self.rot_const}")
        if self.alpha_perp < 0:
            raise ValueError(f"alpha_perp must be >= 0, got {self.alpha_perp}")
        if self.alpha_par < self.alpha_perp:
            raise ValueError(
                f"alpha_par ({self.alpha_par}) < alpha_perp ({self.alpha_perp}) would give zeta < 0"
            )
        if self.field_static is not None and self.field_static < 0:
            raise ValueError(f"field_static must be >= 0, got {self.field_static}")
        if self.intensity is not None and self.intensity < 0:
            raise ValueError(f"intensity must be >= 0, got {self.intensity}")

    @property
    def rot_energy(self) -> float:
        """B in joules."""
        return PLANCK * SPEED_OF_LIGHT * self.rot_const * PER_CM


def eta_from_molecule(spec: MoleculeSpec) -> float:
    """mu * E1 / B for the static field ``spec.field_static``."""
    field = spec.field_static or 0.0
    return spec.dipole * DEBYE * field * KV_PER_CM / spec.rot_energy


def _aligning_field(spec: MoleculeSpec, source: Optional[str]) -> float:
    """Field amplitude (V/m) that polarizes the molecule."""
    if source is None:
        source = "intensity" if spec.intensity is not None else "static"
    if source == "intensity":
        if spec.intensity is None:
            raise ValueError("source='intensity' but no intensity given")
        return math.sqrt(2.0 * spec.intensity * W_PER_CM2 / (SPEED_OF_LIGHT * VACUUM_PERMITTIVITY))
    if source == "static":
        if spec.field_static is None:
            raise ValueError("source='static' but no field_static given")
        return spec.field_static * KV_PER_CM
    raise ValueError(f"unknown aligning-field source {source!r}")


def zeta_from_molecule(spec: MoleculeSpec, source: Optional[str] = None) -> float:
    """(alpha_par - alpha_perp) E2^2 / (2B).

    ``source`` selects the aligning field: ``"intensity"`` (a non-resonant
    laser, E2 = sqrt(2I / (c eps0))) or ``"static"``. By default the laser is
    used when an intensity is given, otherwise the static field.
    """
    field = _aligning_field(spec, source)
    # polarizability volume -> SI polarizability
    delta_alpha = 4.0 * math.pi * VACUUM_PERMITTIVITY * (spec.alpha_par - spec.alpha_perp) * ANGSTROM3
    return delta_alpha * field**2 / (2.0 * spec.rot_energy)


def locus_eta(k: int, zeta: float) -> float:
    """Orienting strength 2 k sqrt(zeta) of the k-th crossing locus."""
    if int(k) != k or k == 0:
        raise ValueError(f"k must be a nonzero integer, got {k}")
    if zeta < 0:
        raise ValueError(f"zeta must be >= 0, got {zeta}")
    return 2.0 * int(k) * math.sqrt(zeta)
