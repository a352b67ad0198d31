"""Eigenstates of the pendulum in the free-rotor basis and directional observables."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla

from .basis import BandedHamiltonian, BasisSpec, assemble, cos2_matrix, cos_matrix, default_jmax
from .model import InteractionParams

DENSE_BELOW = 256
DEFAULT_CEILING = 16384
ENERGY_CUTOFF = 1.0e4


class SolverError(RuntimeError):
    """The eigensolver failed; the message carries the matrix metadata."""


class ConvergenceError(RuntimeError):
    """Basis truncation did not converge below the configured ceiling."""


@dataclass(frozen=True)
class StateLabel:
    J: int
    m: int


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Lowest eigenpairs at one parameter point.

    ``vectors[:, i]`` holds the |j, m> coefficients of state i.
    """

    params: Optional[InteractionParams]
    basis: BasisSpec
    energies: np.ndarray
    vectors: np.ndarray

    @property
    def m(self) -> int:
        return self.basis.m

    @property
    def labels(self) -> list[StateLabel]:
        # energy rank is a valid adiabatic label because all crossings are avoided
        return [StateLabel(self.m + r, self.m) for r in range(len(self.energies))]

    def __len__(self):
        return len(self.energies)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    for i in range(vectors.shape[1]):
        v = vectors[:, i]
        big = np.abs(v) > 1e-10 * np.abs(v).max()
        if v[np.argmax(big)] < 0:
            vectors[:, i] = -v
    return vectors


def _full_band(h: BandedHamiltonian) -> np.ndarray:
    """Storage for ``solve_banded`` with (l, u) = (2, 2)."""
    ab = np.zeros((5, h.dim))
    ab[0, 2:] = h.upper2
    ab[1, 1:] = h.upper1
    ab[2] = h.diagonal
    ab[3, :-1] = h.upper1
    ab[4, :-2] = h.upper2
    return ab


def _banded_eigenpairs(h: BandedHamiltonian, k: int):
    """Eigenvalues from LAPACK's banded driver; vectors by inverse iteration.

    Forming the full orthogonal transform costs O(n^2) memory, so vectors
    are recovered from the pentadiagonal system directly and then passed
    through a Rayleigh-Ritz step, which keeps them orthonormal inside
    quasi-degenerate tunneling doublets.
    """
    n = h.dim
    w = sla.eig_banded(h.lapack_upper(), eigvals_only=True, select="i",
                       select_range=(0, k - 1))
    ab = _full_band(h)
    rng = np.random.default_rng(12345)
    vecs = np.empty((n, k))
    for i, e in enumerate(w):
        shift = e + 1e-12 * max(1.0, abs(e))
        shifted = ab.copy()
        shifted[2] -= shift
        v = rng.standard_normal(n)
        for _ in range(3):
            v = sla.solve_banded((2, 2), shifted, v, check_finite=False)
            v -= vecs[:, :i] @ (vecs[:, :i].T @ v)
            v /= np.linalg.norm(v)
        vecs[:, i] = v
    q, _ = np.linalg.qr(vecs)
    small = q.T @ h.matvec(q)
    ritz, rot = np.linalg.eigh(0.5 * (small + small.T))
    return ritz, q @ rot


def solve(h: BandedHamiltonian, n_lowest: int, driver: str = "auto") -> Spectrum:
    """Lowest ``n_lowest`` eigenpairs of ``h``.

    ``driver`` is ``"dense"`` (LAPACK syevr on the expanded matrix),
    ``"banded"`` (sbevx + inverse iteration) or ``"auto"``, which picks
    dense below dimension 256.
    """
    n = h.dim
    if not 1 <= n_lowest <= n:
        raise ValueError(f"n_lowest={n_lowest} outside [1, {n}]")
    if driver == "auto":
        driver = "dense" if n < DENSE_BELOW else "banded"
    try:
        if driver == "dense":
            w, v = sla.eigh(h.dense(), subset_by_index=[0, n_lowest - 1])
        elif driver == "banded":
            w, v = _banded_eigenpairs(h, n_lowest)
        else:
            raise ValueError(f"unknown driver {driver!r}")
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise SolverError(f"eigensolver failed for m={h.spec.m}, j_max={h.spec.j_max}, "
                          f"dim={n}, driver={driver}: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise SolverError(f"non-finite eigenvalues for m={h.spec.m}, j_max={h.spec.j_max}")
    return Spectrum(None, h.spec, np.asarray(w), _fix_signs(np.array(v)))


def spectrum(m: int, params: InteractionParams, n_states: int, j_max: Optional[int] = None,
             driver: str = "auto") -> Spectrum:
    """Assemble and solve in one step, using the default truncation if none is given."""
    spec = BasisSpec(m, j_max if j_max is not None else default_jmax(m, params))
    s = solve(assemble(spec, params), n_states, driver=driver)
    return Spectrum(params, s.basis, s.energies, s.vectors)


def _expect(s: Spectrum, op: BandedHamiltonian, state: int) -> float:
    if not 0 <= state < len(s):
        raise IndexError(f"state {state} not among the {len(s)} computed states")
    v = s.vectors[:, state]
    return float(v @ op.matvec(v))


def orientation_cosine(s: Spectrum, state: int) -> float:
    return _expect(s, cos_matrix(s.basis), state)


def alignment_cosine(s: Spectrum, state: int) -> float:
    return _expect(s, cos2_matrix(s.basis), state)


def energies_only(m: int, params: InteractionParams, n_states: int, j_max: int) -> np.ndarray:
    h = assemble(BasisSpec(m, j_max), params)
    if h.dim < DENSE_BELOW:
        return sla.eigh(h.dense(), eigvals_only=True, subset_by_index=[0, n_states - 1])
    return sla.eig_banded(h.lapack_upper(), eigvals_only=True, select="i",
                          select_range=(0, n_states - 1))


def converge_jmax(m: int, params: InteractionParams, n_states: int = 5, tol: float = 1e-8,
                  start: Optional[int] = None, ceiling: int = DEFAULT_CEILING) -> int:
    """Smallest j_max in the doubling sequence whose energies survive doubling.

    The sequence starts at ``default_jmax`` unless ``start`` is given.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    j_max = start if start is not None else default_jmax(m, params)
    j_max = max(j_max, abs(m) + n_states - 1)
    e = energies_only(m, params, n_states, j_max)
    while True:
        nxt = 2 * j_max
        if nxt > ceiling:
            raise ConvergenceError(
                f"no convergence to tol={tol} for m={m}, eta={params.eta}, zeta={params.zeta}: "
                f"j_max={j_max} still moves the energies and {nxt} exceeds the ceiling {ceiling}")
        e2 = energies_only(m, params, n_states, nxt)
        if np.max(np.abs(e2 - e)) <= tol:
            return j_max
        j_max, e = nxt, e2


def doublet_splitting(m: int, params: InteractionParams, lower: int, j_max: Optional[int] = None) -> float:
    """E_{lower+1} - E_lower resolved below the eigensolver's roundoff floor.

    Eigenvalue errors scale with the largest diagonal element (~j_max^2),
    which swamps tunneling splittings of order 1e-12. Block inverse
    iteration at the doublet centre isolates the pair; the splitting is then
    read off a 2x2 projection of H - centre, whose entries are accurate to
    roundoff relative to |E| instead.
    """
    s = spectrum(m, params, lower + 2, j_max)
    h = assemble(s.basis, params)
    centre = 0.5 * (s.energies[lower] + s.energies[lower + 1])
    ab = _full_band(h)
    ab[2] -= centre + 1e-9 * max(1.0, abs(centre))
    v = s.vectors[:, lower:lower + 2]
    for _ in range(2):
        v, _ = np.linalg.qr(sla.solve_banded((2, 2), ab, v, check_finite=False))
    small = v.T @ (h.matvec(v) - centre * v)
    ev = np.linalg.eigvalsh(0.5 * (small + small.T))
    return float(ev[1] - ev[0])


def quasi_degenerate_pairs(energies: Sequence[float], rel_tol: float = 1e-6) -> list[tuple[int, int]]:
    """Adjacent states closer than rel_tol * max(1, |E|)."""
    e = np.asarray(energies)
    return [(i, i + 1) for i in range(len(e) - 1)
            if e[i + 1] - e[i] < rel_tol * max(1.0, abs(e[i]))]


def below_cutoff(energies: np.ndarray, cutoff: float = ENERGY_CUTOFF) -> np.ndarray:
    """Boolean mask of energies that survive the report cutoff."""
    return np.asarray(energies) <= cutoff


# Strong-field limits

def librator_energy_eta(n: int, eta: float) -> float:
    """-eta + n sqrt(2 eta), n = 2J - |m|."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return -eta + n * math.sqrt(2.0 * eta)


def librator_energy_zeta(J: int, m: int, zeta: float, parity: Optional[str] = None) -> float:
    """Harmonic-librator energies of -zeta cos^2, even/odd branch by (J - |m|).

    The branches are the printed closed forms. Note that as printed the
    even branch sits 1/2 above its odd doublet partner and above the exact
    large-zeta asymptote; see the test suite for the measured offsets.
    """
    m = abs(m)
    if J < m:
        raise ValueError("J must be >= |m|")
    actual = "even" if (J - m) % 2 == 0 else "odd"
    if parity is not None and parity != actual:
        raise ValueError(f"J - |m| = {J - m} is {actual}, not {parity}")
    r = math.sqrt(zeta)
    if actual == "even":
        return -zeta + 2 * r + 2 * J * r + m * m / 2 - J * J / 2 - J - 0.5
    return -zeta + 2 * J * r + m * m / 2 - J * J / 2 - 0.5


def librator_energy_combined(n: int, m: int, sign: int, eta: float, zeta: float) -> float:
    """-eta - zeta + sqrt(2 eta + 4 zeta) (2n +- m + 1/2)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return -eta - zeta + math.sqrt(2.0 * eta + 4.0 * zeta) * (2 * n + sign * abs(m) + 0.5)
