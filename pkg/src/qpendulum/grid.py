"""One-dimensional theta-grid solver for the effective pendulum potential.

The reduced wavefunction psi(theta) = sqrt(sin theta) chi(theta) obeys
-psi'' + V psi = E psi with

    V = c_csc2 csc^2 + c_cotcsc cot csc + c_cos cos + c_cos2 cos^2 + c_const.

Near theta = 0 and pi the csc^2-type terms force psi to behave as a power
theta^a0 and (pi - theta)^api. For m = 0 the coupling sits exactly at the
critical value -1/4 and psi ~ sqrt(theta), which a plain sine (Dirichlet)
DVR resolves only logarithmically. The default scheme therefore writes

    psi = sin(theta/2)^a0 cos(theta/2)^api g(cos theta)

and collocates the smooth factor g on the same uniform interior nodes
theta_i = i pi / (n + 1), which are the Chebyshev points of the second kind
in x = cos theta. The operator acting on g has polynomial coefficients, so
free-rotor states are represented exactly and combined-field states converge
spectrally. The sine DVR is kept as ``scheme="sine"`` for comparison.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
import scipy.linalg as sla

from .model import InteractionParams

_TERMS = ("csc2", "cotcsc", "cos", "cos2", "const")


class GridSolverError(RuntimeError):
    """Grid eigensolver failure; the message carries the grid metadata."""


@dataclass(frozen=True)
class ThetaGrid:
    n: int = 512

    def __post_init__(self):
        if self.n < 8:
            raise ValueError(f"grid needs at least 8 points, got {self.n}")

    @property
    def spacing(self) -> float:
        return math.pi / (self.n + 1)

    @property
    def nodes(self) -> np.ndarray:
        return _nodes(self.n)

    def integrate(self, f: np.ndarray) -> float:
        """Trapezoidal rule; the excluded endpoints carry zero weight."""
        return float(self.spacing * np.sum(f))


@functools.lru_cache(maxsize=16)
def _nodes(n: int) -> np.ndarray:
    th = np.arange(1, n + 1) * (math.pi / (n + 1))
    th.setflags(write=False)
    return th


@functools.lru_cache(maxsize=8)
def _chebyshev_operators(n: int):
    """First and second derivative matrices in x = cos(theta) on the nodes.

    Barycentric interpolation through the zeros of U_n (weights
    (-1)^j sin^2 theta_j); node differences use the product form of
    cos a - cos b to stay accurate near the poles.
    """
    th = _nodes(n)
    w = (-1.0) ** np.arange(n) * np.sin(th) ** 2
    dx = -2.0 * np.sin(0.5 * (th[:, None] + th[None, :])) * np.sin(0.5 * (th[:, None] - th[None, :]))
    np.fill_diagonal(dx, 1.0)
    d1 = (w[None, :] / w[:, None]) / dx
    np.fill_diagonal(d1, 0.0)
    np.fill_diagonal(d1, -d1.sum(axis=1))
    d2 = 2.0 * d1 * (np.diag(d1)[:, None] - 1.0 / dx)
    np.fill_diagonal(d2, 0.0)
    np.fill_diagonal(d2, -d2.sum(axis=1))
    for a in (d1, d2):
        a.setflags(write=False)
    return d1, d2


@dataclass(frozen=True)
class EffectivePotentialSpec:
    """Effective potential (m^2 - 1/4) csc^2 - eta cos - zeta cos^2 - 1/4 + extra.

    ``extra`` maps any of ``csc2``, ``cotcsc``, ``cos``, ``cos2``, ``const``
    to an additional coefficient; SUSY partner potentials use it.
    """

    m: int
    params: InteractionParams
    extra: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.extra) - set(_TERMS)
        if unknown:
            raise ValueError(f"unknown potential terms {sorted(unknown)}")
        object.__setattr__(self, "extra", dict(self.extra))

    @classmethod
    def from_coefficients(cls, m: int, csc2: float = 0.0, cotcsc: float = 0.0, cos: float = 0.0,
                          cos2: float = 0.0, const: float = 0.0) -> "EffectivePotentialSpec":
        base = cls(m, InteractionParams(0.0, 0.0)).coefficients
        extra = {"csc2": csc2 - base["csc2"], "cotcsc": cotcsc, "cos": cos, "cos2": cos2,
                 "const": const - base["const"]}
        return cls(m, InteractionParams(0.0, 0.0), {k: v for k, v in extra.items() if v != 0.0})

    @property
    def coefficients(self) -> dict[str, float]:
        c = {"csc2": self.m * self.m - 0.25, "cotcsc": 0.0, "cos": -self.params.eta,
             "cos2": -self.params.zeta, "const": -0.25}
        for k, v in self.extra.items():
            c[k] += v
        return c

    @property
    def edge_powers(self) -> tuple[float, float]:
        """Exponents a0, api of the regular solution at theta = 0 and pi."""
        c = self.coefficients
        near0, nearpi = c["csc2"] + c["cotcsc"], c["csc2"] - c["cotcsc"]
        if near0 < -0.25 or nearpi < -0.25:
            raise ValueError("inverse-square coupling below -1/4: spectrum unbounded below")
        return 0.5 + math.sqrt(near0 + 0.25), 0.5 + math.sqrt(nearpi + 0.25)


def effective_potential(spec: EffectivePotentialSpec, theta):
    th = np.asarray(theta, dtype=float)
    if np.any((th <= 0.0) | (th >= math.pi)):
        raise ValueError("effective potential is singular at theta = 0 and pi")
    c = spec.coefficients
    s, co = np.sin(th), np.cos(th)
    v = (c["csc2"] / s**2 + c["cotcsc"] * co / s**2 + c["cos"] * co + c["cos2"] * co**2
         + c["const"])
    return float(v) if np.ndim(theta) == 0 else v


@dataclass(frozen=True, eq=False)
class GridWavefunction:
    """psi(theta) sampled on the grid nodes; e^{i m phi} is implicit.

    ``edge_powers`` records the endpoint exponents (a0, api) used to split
    off the singular factor before spectral differentiation; shifting either
    by an even integer is harmless.
    """

    grid: ThetaGrid
    values: np.ndarray
    m: int = 0
    edge_powers: tuple[float, float] = (0.5, 0.5)

    def norm(self) -> float:
        return math.sqrt(self.grid.integrate(self.values**2))

    def normalized(self) -> "GridWavefunction":
        v = self.values / self.norm()
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        return GridWavefunction(self.grid, v, self.m, self.edge_powers)


@functools.lru_cache(maxsize=16)
def _fejer_weights(n: int) -> np.ndarray:
    """Fejer's second rule on the nodes, as weights for integrals over theta."""
    th = _nodes(n)
    odd = np.arange(1, n + 1, 2)
    wx = 4.0 * np.sin(th) / (n + 1) * (np.sin(np.outer(th, odd)) / odd).sum(axis=1)
    # dtheta = dx / sin(theta)
    w = wx / np.sin(th)
    w.setflags(write=False)
    return w


def expectation(psi: GridWavefunction, f: np.ndarray) -> float:
    """<psi|f|psi> / <psi|psi> by Fejer quadrature in x = cos theta.

    psi^2 / sin(theta) is smooth in x for the pendulum states, so this
    converges spectrally where the trapezoidal rule is only O(h^2).
    """
    w = _fejer_weights(psi.grid.n)
    p2 = psi.values**2
    return float(np.dot(w, p2 * f) / np.dot(w, p2))


def overlap(a: GridWavefunction, b: GridWavefunction) -> float:
    """<a|b> / (|a| |b|) with the trapezoidal rule."""
    return a.grid.integrate(a.values * b.values) / (a.norm() * b.norm())


def _edge_factor(grid: ThetaGrid, powers):
    half = 0.5 * grid.nodes
    return np.sin(half) ** powers[0] * np.cos(half) ** powers[1]


def _exponential_trend(x: np.ndarray, g: np.ndarray) -> float:
    mag = np.abs(g)
    keep = mag > 1e-250 * mag.max()
    if mag.max() == 0.0 or mag[keep].min() > 1e-3 * mag.max():
        return 0.0
    return float(np.polyfit(x[keep], np.log(mag[keep]), 1)[0])


def derivative(psi: GridWavefunction) -> np.ndarray:
    """d psi / d theta by Chebyshev differentiation of the smooth factor."""
    grid = psi.grid
    a0, api = psi.edge_powers
    half = 0.5 * grid.nodes
    w = _edge_factor(grid, psi.edge_powers)
    g = psi.values / w
    d1, _ = _chebyshev_operators(grid.n)
    x = np.cos(grid.nodes)
    # Balance an overall exponential trend e^{s x} out of g first; otherwise
    # roundoff from the large samples swamps the derivative where g is tiny.
    s = _exponential_trend(x, g)
    flat = g * np.exp(-s * x)
    dg = -np.sin(grid.nodes) * np.exp(s * x) * (d1 @ flat + s * flat)
    logw = 0.5 * a0 / np.tan(half) - 0.5 * api * np.tan(half)
    return w * (logw * g + dg)


def _collocation_matrix(spec: EffectivePotentialSpec, grid: ThetaGrid) -> np.ndarray:
    """Operator acting on g = psi / edge factor at the nodes."""
    a0, api = spec.edge_powers
    p, q = 0.5 * a0, 0.5 * api
    c = spec.coefficients
    x = np.cos(grid.nodes)
    d1, d2 = _chebyshev_operators(grid.n)
    op = -(1.0 - x * x)[:, None] * d2 + ((2 * p - 2 * q) + (2 * p + 2 * q + 1) * x)[:, None] * d1
    op[np.diag_indices(grid.n)] += (p + q) ** 2 + c["cos"] * x + c["cos2"] * x * x + c["const"]
    return op


def _polish(op: np.ndarray, energy: float, g: np.ndarray) -> np.ndarray:
    """Inverse iteration on op conjugated by the exponential trend of g.

    The dense eigensolver is accurate relative to the largest component
    only, so exponentially small tails come out noisy. After the similarity
    transform the vector is roughly flat and the tails gain relative accuracy.
    """
    x = np.cos(_nodes(len(g)))
    s = float(np.clip(_exponential_trend(x, g), -300.0, 300.0))
    if s == 0.0:
        return g
    m = op * np.exp(-s * (x[:, None] - x[None, :]))
    m[np.diag_indices(len(g))] -= energy + 1e-10 * max(1.0, abs(energy))
    lu = sla.lu_factor(m, check_finite=False)
    v = g * np.exp(-s * x)
    for _ in range(2):
        v = sla.lu_solve(lu, v, check_finite=False)
        v /= np.linalg.norm(v)
    return v * np.exp(s * x)


def kinetic_matrix(grid: ThetaGrid) -> np.ndarray:
    """-d^2/dtheta^2 on (0, pi) with Dirichlet ends: sine-basis DVR in closed form."""
    n1 = grid.n + 1
    i = np.arange(1, grid.n + 1)
    a, b = i[:, None] - i[None, :], i[:, None] + i[None, :]
    with np.errstate(divide="ignore"):
        t = 0.5 * (-1.0) ** a * (1.0 / np.sin(0.5 * math.pi * a / n1) ** 2
                                 - 1.0 / np.sin(0.5 * math.pi * b / n1) ** 2)
    t[np.diag_indices(grid.n)] = 0.5 * ((2.0 * n1**2 + 1.0) / 3.0 - 1.0 / np.sin(math.pi * i / n1) ** 2)
    return t


def solve_grid(spec: EffectivePotentialSpec, grid: Optional[ThetaGrid] = None, n_states: int = 10,
               scheme: str = "collocation"):
    """Lowest eigenpairs of -d^2/dtheta^2 + V on the grid.

    Returns ``(energies, wavefunctions)``, wavefunctions normalized with the
    largest-magnitude sample positive.
    """
    grid = grid or ThetaGrid()
    if not 1 <= n_states <= grid.n:
        raise ValueError(f"n_states={n_states} outside [1, {grid.n}]")
    powers = spec.edge_powers
    try:
        if scheme == "collocation":
            vals, vecs = sla.eig(_collocation_matrix(spec, grid))
            real = np.abs(vals.imag) <= 1e-8 * np.maximum(1.0, np.abs(vals.real))
            order = np.argsort(vals.real[real])[:n_states]
            energies = vals.real[real][order]
            op = _collocation_matrix(spec, grid)
            gs = np.column_stack([_polish(op, e, g) for e, g in
                                  zip(energies, vecs[:, real][:, order].real.T)])
            psis = gs * _edge_factor(grid, powers)[:, None]
        elif scheme == "sine":
            h = kinetic_matrix(grid) + np.diag(effective_potential(spec, grid.nodes))
            energies, psis = sla.eigh(h, subset_by_index=[0, n_states - 1])
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise GridSolverError(f"grid eigensolver failed: n={grid.n}, scheme={scheme}, "
                              f"coefficients={spec.coefficients}: {exc}") from exc
    if len(energies) < n_states:
        raise GridSolverError(f"only {len(energies)} real eigenvalues on n={grid.n} grid, "
                              f"asked for {n_states}")
    wfs = [GridWavefunction(grid, psis[:, i], spec.m, powers).normalized() for i in range(n_states)]
    return np.asarray(energies), wfs


def apply_hamiltonian(spec: EffectivePotentialSpec, psi: GridWavefunction) -> np.ndarray:
    """(H psi)(theta_i), differentiating through the edge factor of ``spec``."""
    w = _edge_factor(psi.grid, spec.edge_powers)
    return w * (_collocation_matrix(spec, psi.grid) @ (psi.values / w))


def to_3d(psi: GridWavefunction) -> np.ndarray:
    """theta part chi = psi / sqrt(sin theta) of the 3D wavefunction."""
    return psi.values / np.sqrt(np.sin(psi.grid.nodes))
