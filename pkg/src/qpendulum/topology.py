"""Eigensurface scans over (eta, zeta), gap maps and avoided-crossing loci."""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .model import InteractionParams
from .spectral import alignment_cosine, doublet_splitting, orientation_cosine, spectrum

THREADS_ENV = "QPENDULUM_THREADS"


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"{THREADS_ENV} must be >= 1, got {env!r}")
        return n
    return os.cpu_count() or 1


@dataclass(frozen=True, eq=False)
class SurfaceScan:
    """``energies[state, i_eta, j_zeta]``; ``cosines`` has the same shape when requested."""

    m: int
    eta_grid: np.ndarray
    zeta_grid: np.ndarray
    energies: np.ndarray
    cosines: Optional[np.ndarray] = None
    alignments: Optional[np.ndarray] = None

    @property
    def n_states(self) -> int:
        return self.energies.shape[0]

    def zeta_index(self, zeta: float) -> int:
        hits = np.flatnonzero(np.isclose(self.zeta_grid, zeta, rtol=1e-12, atol=1e-12))
        if len(hits) == 0:
            raise ValueError(f"zeta={zeta} is not a scanned row; rows are {self.zeta_grid.tolist()}")
        return int(hits[0])


def _as_grid(values, name: str) -> np.ndarray:
    g = np.atleast_1d(np.asarray(values, dtype=float))
    if g.ndim != 1 or g.size == 0:
        raise ValueError(f"{name} must be a nonempty 1D sequence")
    if np.any(np.diff(g) <= 0):
        raise ValueError(f"{name} must be strictly increasing")
    return g


def scan(m: int, eta_grid: Sequence[float], zeta_grid: Sequence[float], n_states: int,
         j_max: Optional[int] = None, threads: Optional[int] = None,
         with_cosines: bool = False) -> SurfaceScan:
    """Lowest ``n_states`` energies at every (eta, zeta) grid point.

    Points are solved independently on a thread pool and stored by grid
    index, so the result does not depend on the worker count.
    """
    etas, zetas = _as_grid(eta_grid, "eta_grid"), _as_grid(zeta_grid, "zeta_grid")
    if zetas[0] < 0:
        raise ValueError("zeta_grid must be >= 0")
    points = [(i, j) for i in range(len(etas)) for j in range(len(zetas))]

    def work(ij):
        i, j = ij
        p = InteractionParams(float(etas[i]), float(zetas[j]))
        try:
            s = spectrum(m, p, n_states, j_max)
        except Exception as exc:
            raise type(exc)(f"at grid point m={m}, eta={p.eta}, zeta={p.zeta}: {exc}") from exc
        if not with_cosines:
            return s.energies, None, None
        return (s.energies, [orientation_cosine(s, r) for r in range(n_states)],
                [alignment_cosine(s, r) for r in range(n_states)])

    with ThreadPoolExecutor(max_workers=threads or default_threads()) as pool:
        results = list(pool.map(work, points))

    shape = (n_states, len(etas), len(zetas))
    energies = np.empty(shape)
    cos = np.empty(shape) if with_cosines else None
    cos2 = np.empty(shape) if with_cosines else None
    for (i, j), (e, c, c2) in zip(points, results):
        energies[:, i, j] = e
        if with_cosines:
            cos[:, i, j], cos2[:, i, j] = c, c2
    return SurfaceScan(abs(int(m)), etas, zetas, energies, cos, cos2)


def gap_map(s: SurfaceScan, pair: tuple[int, int]) -> np.ndarray:
    """E_{r+1} - E_r over the (eta, zeta) grid."""
    r, r1 = pair
    if r1 != r + 1 or not 0 <= r < s.n_states - 1:
        raise ValueError(f"pair must be (r, r+1) with r+1 < {s.n_states}, got {pair}")
    return s.energies[r1] - s.energies[r]


@dataclass(frozen=True)
class CrossingLocus:
    k: int
    pair: tuple[int, int]
    zeta: float
    eta_star: float
    gap: float
    predicted: float

    @property
    def index(self) -> float:
        """eta_star / (2 sqrt(zeta)), ideally the integer k."""
        return self.eta_star / (2.0 * math.sqrt(self.zeta))


def _parabolic_min(x, y, i):
    """Vertex of the parabola through points i-1, i, i+1."""
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    den = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den
    if a <= 0:
        return x1, y1
    xv = -b / (2 * a)
    xv = min(max(xv, x0), x2)
    c = y1 - a * x1 * x1 - b * x1
    return xv, max(a * xv * xv + b * xv + c, 0.0)


def find_crossings(s: SurfaceScan, zeta: float, k_max: int) -> list[CrossingLocus]:
    """Interior gap minima along eta in the ``zeta`` row, assigned to the nearest k.

    Every adjacent pair is searched. Minima whose nearest index is outside
    1..k_max are dropped; each k in 1..k_max without any minimum triggers a
    "no minimum found" warning. A zeta = 0 row has no loci and returns [].
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    j = s.zeta_index(zeta)
    if zeta == 0:
        return []
    eta = s.eta_grid
    if len(eta) > 1 and np.max(np.diff(eta)) > 0.25:
        warnings.warn(f"eta spacing {np.max(np.diff(eta)):.3g} > 0.25; loci may be missed",
                      stacklevel=2)
    unit = 2.0 * math.sqrt(zeta)
    found: list[CrossingLocus] = []
    for r in range(s.n_states - 1):
        gap = s.energies[r + 1, :, j] - s.energies[r, :, j]
        for i in range(1, len(eta) - 1):
            if gap[i] < gap[i - 1] and gap[i] <= gap[i + 1]:
                x, g = _parabolic_min(eta, gap, i)
                k = int(round(x / unit))
                if 1 <= k <= k_max:
                    found.append(CrossingLocus(k, (r, r + 1), float(zeta), float(x), float(g),
                                               k * unit))
    for k in range(1, k_max + 1):
        if not any(c.k == k for c in found):
            warnings.warn(f"no minimum found for k={k} at zeta={zeta} "
                          f"(predicted eta={k * unit:.6g}, scanned {eta[0]:.6g}..{eta[-1]:.6g})",
                          stacklevel=2)
    found.sort(key=lambda c: (c.k, c.pair))
    return found


@dataclass(frozen=True)
class LevelPattern:
    m: int
    k: int
    zeta: float
    n_singles: int
    doublet_splittings: list[float] = field(default_factory=list)
    gaps: list[float] = field(default_factory=list)
    inconclusive: bool = False


def level_pattern(m: int, k: int, zeta: float, n_states: Optional[int] = None,
                  ratio: float = 10.0, j_max: Optional[int] = None) -> LevelPattern:
    """Count isolated states below the first tunneling doublet at eta = 2 k sqrt(zeta).

    A doublet starts at the first rank s whose splitting g_s is ``ratio``
    times smaller than both neighbouring gaps; the s states below it are
    the singles. Doublets are then collected pairwise while the same test
    holds, and their splittings recomputed with ``doublet_splitting``.
    Below zeta = 25 the wells are too shallow for doublets and the result
    is flagged inconclusive.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if ratio <= 1:
        raise ValueError("ratio must be > 1")
    n_states = n_states or 2 * k + 8
    p = InteractionParams(2.0 * k * math.sqrt(zeta), zeta)
    e = spectrum(m, p, n_states, j_max).energies
    g = np.diff(e)

    def is_doublet(s):
        if s + 1 >= len(g):
            return False
        return g[s] * ratio < g[s + 1] and (s == 0 or g[s] * ratio < g[s - 1])

    singles = next((s for s in range(len(g)) if is_doublet(s)), len(e))
    splittings = []
    s = singles
    while is_doublet(s):
        # raw eigenvalue differences bottom out near 1e-12; refine each pair
        splittings.append(doublet_splitting(m, p, s, j_max))
        s += 2
    return LevelPattern(abs(int(m)), k, float(zeta), int(singles), splittings,
                        [float(x) for x in g], inconclusive=zeta < 25 or not splittings)


def sign_changes(m: int, J: int, zeta: float, eta_grid: Sequence[float],
                 j_max: Optional[int] = None) -> int:
    """Sign changes of <cos theta> along eta for the state labelled (J, m)."""
    m = abs(int(m))
    if J < m:
        raise ValueError(f"J={J} < |m|={m}")
    etas = _as_grid(eta_grid, "eta_grid")
    if zeta > 0 and len(etas) > 1:
        unit = 2.0 * math.sqrt(zeta)
        mids, steps = 0.5 * (etas[1:] + etas[:-1]), np.diff(etas)
        near = np.abs(mids / unit - np.round(mids / unit)) * unit < 1.0
        if np.any(steps[near] > 0.1):
            warnings.warn("eta spacing exceeds 0.1 near a crossing locus; sign changes may be missed",
                          stacklevel=2)
    rank = J - m
    cos = np.array([orientation_cosine(spectrum(m, InteractionParams(float(x), zeta), rank + 1,
                                                j_max), rank) for x in etas])
    signs = np.sign(np.where(np.abs(cos) > 1e-12, cos, 0.0))
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))
