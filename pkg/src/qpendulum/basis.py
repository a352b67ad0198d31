"""Free-rotor basis |j, m> and the pentadiagonal pendulum Hamiltonian.

Only the upper band is stored. ``m`` is taken as |m| everywhere; the matrix
elements depend on m only through m^2 and symmetric (j +- m) products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import InteractionParams


@dataclass(frozen=True)
class BasisSpec:
    m: int
    j_max: int

    def __post_init__(self):
        if int(self.m) != self.m or int(self.j_max) != self.j_max:
            raise ValueError("m and j_max must be integers")
        object.__setattr__(self, "m", abs(int(self.m)))
        object.__setattr__(self, "j_max", int(self.j_max))
        if self.j_max < self.m:
            raise ValueError(f"j_max={self.j_max} < |m|={self.m}: empty basis")

    @property
    def dim(self) -> int:
        return self.j_max - self.m + 1

    @property
    def j(self) -> np.ndarray:
        return np.arange(self.m, self.j_max + 1)


@dataclass(frozen=True, eq=False)
class BandedHamiltonian:
    """Symmetric matrix with half-bandwidth 2 over |j, m>, j = m..j_max.

    ``upper1[i]`` couples rows i and i+1, ``upper2[i]`` couples i and i+2.
    """

    spec: BasisSpec
    diagonal: np.ndarray
    upper1: np.ndarray
    upper2: np.ndarray

    def __post_init__(self):
        n = self.spec.dim
        if self.diagonal.shape != (n,) or self.upper1.shape != (max(n - 1, 0),) \
                or self.upper2.shape != (max(n - 2, 0),):
            raise ValueError("band lengths do not match the basis dimension")
        for a in (self.diagonal, self.upper1, self.upper2):
            a.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.spec.dim

    def dense(self) -> np.ndarray:
        h = np.diag(self.diagonal)
        h += np.diag(self.upper1, 1) + np.diag(self.upper1, -1)
        h += np.diag(self.upper2, 2) + np.diag(self.upper2, -2)
        return h

    def lapack_upper(self) -> np.ndarray:
        """Upper band storage as expected by ``scipy.linalg.eig_banded``."""
        n = self.dim
        ab = np.zeros((3, n))
        ab[0, 2:] = self.upper2
        ab[1, 1:] = self.upper1
        ab[2] = self.diagonal
        return ab

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = self.diagonal[:, None] * v if v.ndim == 2 else self.diagonal * v
        d1 = self.upper1[:, None] if v.ndim == 2 else self.upper1
        d2 = self.upper2[:, None] if v.ndim == 2 else self.upper2
        out[:-1] += d1 * v[1:]
        out[1:] += d1 * v[:-1]
        out[:-2] += d2 * v[2:]
        out[2:] += d2 * v[:-2]
        return out


# cos(theta) and cos^2(theta) couplings. Each takes the lower j of the pair.

def _cos_up1(j, m):
    return np.sqrt((j + m + 1.0) * (j - m + 1.0) / ((2.0 * j + 3.0) * (2.0 * j + 1.0)))


def _cos2_diag(j, m):
    j = np.asarray(j, dtype=float)
    return 1.0 / 3.0 + 2.0 * (2 * j + 1) * (j * (j + 1) - 3.0 * m * m) / (
        3.0 * (2 * j + 3) * (2 * j + 1) * (2 * j - 1))


def _cos2_up2(j, m):
    return np.sqrt((j + m + 2.0) * (j + m + 1.0) * (j - m + 2.0) * (j - m + 1.0)
                   / ((2.0 * j + 3.0) ** 2 * (2.0 * j + 5.0) * (2.0 * j + 1.0)))


def hamiltonian_element(j_row: int, j_col: int, m: int, params: InteractionParams) -> float:
    """<j_row, m| J^2 - eta cos - zeta cos^2 |j_col, m>."""
    m = abs(int(m))
    if j_row < m or j_col < m:
        raise ValueError(f"j must be >= |m|={m}, got ({j_row}, {j_col})")
    lo, dj = min(j_row, j_col), abs(j_row - j_col)
    if dj == 0:
        return float(lo * (lo + 1) - params.zeta * _cos2_diag(lo, m))
    if dj == 1:
        return float(-params.eta * _cos_up1(lo, m))
    if dj == 2:
        return float(-params.zeta * _cos2_up2(lo, m))
    return 0.0


def assemble(spec: BasisSpec, params: InteractionParams) -> BandedHamiltonian:
    j = spec.j.astype(float)
    m = spec.m
    diag = j * (j + 1) - params.zeta * _cos2_diag(j, m)
    up1 = -params.eta * _cos_up1(j[:-1], m)
    up2 = -params.zeta * _cos2_up2(j[:-2], m)
    return BandedHamiltonian(spec, diag, up1, up2)


def cos_matrix(spec: BasisSpec) -> BandedHamiltonian:
    j = spec.j.astype(float)
    return BandedHamiltonian(spec, np.zeros(spec.dim), _cos_up1(j[:-1], spec.m),
                             np.zeros(max(spec.dim - 2, 0)))


def cos2_matrix(spec: BasisSpec) -> BandedHamiltonian:
    j = spec.j.astype(float)
    return BandedHamiltonian(spec, _cos2_diag(j, spec.m), np.zeros(max(spec.dim - 1, 0)),
                             _cos2_up2(j[:-2], spec.m))


def default_jmax(m: int, params: InteractionParams) -> int:
    """Truncation that comfortably holds the librating states."""
    strength = abs(params.eta) + 2.0 * params.zeta
    return abs(int(m)) + max(40, math.ceil(4.0 * math.sqrt(strength)) + 20)
