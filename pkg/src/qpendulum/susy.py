"""Supersymmetric partners of the pendulum built from a three-term superpotential.

The superpotential W = alpha cot + beta sin + gamma csc reproduces the
effective potential as V1 = W^2 - W' + epsilon only on two families of
parameters (Case 1: gamma = 0, Case 2: alpha = -1/2). Each family fixes
eta = 2 k beta and zeta = beta^2 for an integer k, i.e. it lands on a
crossing locus, and yields the nodeless solution

    psi_eps ~ csc(theta)^alpha exp(beta cos theta) cot(theta/2)^gamma

at energy epsilon. Whether psi_eps, its reciprocal, or neither is square
integrable decides between standard, inverted and broken SUSY.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import EffectivePotentialSpec, GridWavefunction, ThetaGrid, derivative, solve_grid
from .model import InteractionParams


class SusyCase(enum.Enum):
    ONE_PLUS = "1+"
    ONE_MINUS = "1-"
    TWO_PLUS = "2+"
    TWO_MINUS = "2-"

    @property
    def family(self) -> int:
        return 1 if self in (SusyCase.ONE_PLUS, SusyCase.ONE_MINUS) else 2

    @property
    def sign(self) -> int:
        return 1 if self in (SusyCase.ONE_PLUS, SusyCase.TWO_PLUS) else -1

    @classmethod
    def parse(cls, text: str) -> "SusyCase":
        t = text.strip().replace("_", "").replace("−", "-")
        for c in cls:
            if t == c.value or t.upper() == c.name.replace("_", ""):
                return c
        raise ValueError(f"unknown SUSY case {text!r}; expected one of 1+, 1-, 2+, 2-")


class SusyClass(enum.Enum):
    STANDARD = "standard"
    INVERTED = "inverted"
    BROKEN = "broken"


@dataclass(frozen=True)
class SuperpotentialParams:
    alpha: float
    beta: float
    gamma: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.alpha, self.beta, self.gamma)):
            raise ValueError("superpotential parameters must be finite")

    def value(self, theta):
        return superpotential(self, theta)

    def derivative(self, theta):
        th = np.asarray(theta, dtype=float)
        s, c = np.sin(th), np.cos(th)
        return -self.alpha / s**2 + self.beta * c - self.gamma * c / s**2


def superpotential(p: SuperpotentialParams, theta):
    th = np.asarray(theta, dtype=float)
    s = np.sin(th)
    return p.alpha * np.cos(th) / s + p.beta * s + p.gamma / s


def resolve_case(m: int, case: SusyCase) -> tuple[float, float]:
    """(alpha, gamma) satisfying the csc^2 and cot csc identities."""
    m = abs(int(m))
    if case.family == 1:
        return case.sign * m - 0.5, 0.0
    return -0.5, float(case.sign * m)


@dataclass(frozen=True)
class SusyPoint:
    m: int
    case: SusyCase
    beta: float
    alpha: float
    gamma: float
    eta: float
    zeta: float
    epsilon: float
    k: int

    @property
    def params(self) -> InteractionParams:
        return InteractionParams(self.eta, self.zeta)

    @property
    def superpotential(self) -> SuperpotentialParams:
        return SuperpotentialParams(self.alpha, self.beta, self.gamma)


def _point(m: int, case: SusyCase, beta: float) -> SusyPoint:
    alpha, gamma = resolve_case(m, case)
    k = round(0.5 - alpha)  # eta = beta (1 - 2 alpha) = 2 k beta
    return SusyPoint(
        m=abs(int(m)), case=case, beta=float(beta), alpha=alpha, gamma=gamma,
        eta=beta * (1.0 - 2.0 * alpha), zeta=beta * beta,
        epsilon=alpha * alpha - beta * beta - 2.0 * beta * gamma - 0.25, k=k)


def susy_point(m: int, case: SusyCase, beta: float) -> SusyPoint:
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta} (use free_rotor_point for beta = 0)")
    return _point(m, case, beta)


def free_rotor_point(m: int) -> SusyPoint:
    """Field-free limit of Case 1-: W = -(m + 1/2) cot."""
    return _point(m, SusyCase.ONE_MINUS, 0.0)


@dataclass(frozen=True)
class PublishedVerdict:
    """Normalizability as stated in the literature for this case."""

    susy_class: SusyClass
    psi_normalizable: bool
    inverse_normalizable: bool


@dataclass(frozen=True)
class Classification:
    susy_class: SusyClass
    psi_powers: tuple[float, float]
    inverse_powers: tuple[float, float]
    psi_normalizable: bool
    inverse_normalizable: bool
    marginal: bool
    published_verdict: PublishedVerdict

    @property
    def agrees_with_published(self) -> bool:
        v = self.published_verdict
        return (v.susy_class, v.psi_normalizable, v.inverse_normalizable) == (
            self.susy_class, self.psi_normalizable, self.inverse_normalizable)


def _square_integrable(powers) -> bool:
    # |theta^p|^2 integrable at the endpoint iff p > -1/2
    return all(p > -0.5 + 1e-12 for p in powers)


def _published_verdict(m: int, case: SusyCase) -> PublishedVerdict:
    if m == 0 or case is SusyCase.ONE_MINUS:
        return PublishedVerdict(SusyClass.STANDARD, True, False)
    if case is SusyCase.ONE_PLUS:
        return PublishedVerdict(SusyClass.INVERTED, False, True)
    if case is SusyCase.TWO_PLUS:
        return PublishedVerdict(SusyClass.BROKEN, False, False)
    return PublishedVerdict(SusyClass.BROKEN, True, True)


def classify(point: SusyPoint) -> Classification:
    """Decide the SUSY type from the endpoint exponents of psi_eps.

    psi_eps ~ theta^p0 at 0 and (pi - theta)^ppi at pi with p0 = -alpha - gamma,
    ppi = -alpha + gamma. A power p = -1/2 is log-divergent and flagged marginal.
    """
    powers = (-point.alpha - point.gamma, -point.alpha + point.gamma)
    inverse = (-powers[0], -powers[1])
    psi_ok, inv_ok = _square_integrable(powers), _square_integrable(inverse)
    if psi_ok:
        cls = SusyClass.STANDARD
    elif inv_ok:
        cls = SusyClass.INVERTED
    else:
        cls = SusyClass.BROKEN
    marginal = any(abs(p + 0.5) < 1e-12 for p in powers + inverse)
    return Classification(cls, powers, inverse, psi_ok, inv_ok, marginal,
                          _published_verdict(point.m, point.case))


@dataclass(frozen=True)
class PartnerPair:
    point: SusyPoint
    v1: EffectivePotentialSpec
    v2: EffectivePotentialSpec
    partner_labels: Optional[tuple[int, int]]
    classification: Classification


def partner_pair(point: SusyPoint) -> PartnerPair:
    """V1 = W^2 - W' + eps (the pendulum itself) and V2 = W^2 + W' + eps."""
    a, b, g = point.alpha, point.beta, point.gamma
    v1 = EffectivePotentialSpec(point.m, point.params)
    if point.case.family == 1:
        # V2 is again a pendulum: m -> m -+ 1 and eta -> eta - 2 beta
        m_t, k_t = abs(point.m - point.case.sign), point.k - 1
        v2 = EffectivePotentialSpec(m_t, InteractionParams(2.0 * b * k_t, point.zeta))
        labels = (m_t, k_t)
    else:
        v2 = EffectivePotentialSpec.from_coefficients(
            point.m, csc2=a * a + g * g - a, cotcsc=2 * a * g - g, cos=b * (1 + 2 * a),
            cos2=-b * b, const=-0.25)
        labels = None
    return PartnerPair(point, v1, v2, labels, classify(point))


def partner_spectra(pair: PartnerPair, grid: Optional[ThetaGrid] = None, n_states: int = 10):
    """Grid spectra (E1, E2) of the two partner Hamiltonians."""
    e1, _ = solve_grid(pair.v1, grid, n_states)
    e2, _ = solve_grid(pair.v2, grid, n_states)
    return e1, e2


def analytic_wavefunction(point: SusyPoint, grid: Optional[ThetaGrid] = None,
                          reciprocal: bool = False) -> GridWavefunction:
    """Samples of psi_eps (or 1/psi_eps).

    Normalized when the classification says the function is square
    integrable; otherwise scaled to unit peak.
    """
    grid = grid or ThetaGrid()
    th = grid.nodes
    sgn = -1.0 if reciprocal else 1.0
    log_psi = sgn * (-point.alpha * np.log(np.sin(th)) + point.beta * np.cos(th)
                     + point.gamma * np.log(1.0 / np.tan(0.5 * th)))
    span = float(log_psi.max() - log_psi.min())
    if span > 700.0:
        raise OverflowError(f"psi_eps spans e^{span:.0f} on the grid; exponents too extreme "
                            f"(alpha={point.alpha}, beta={point.beta}, gamma={point.gamma})")
    values = np.exp(log_psi - log_psi.max())
    powers = (sgn * (-point.alpha - point.gamma), sgn * (-point.alpha + point.gamma))
    psi = GridWavefunction(grid, values, point.m, powers)
    cls = classify(point)
    if (cls.inverse_normalizable if reciprocal else cls.psi_normalizable):
        return psi.normalized()
    return psi


def _shifted(psi: GridWavefunction, values: np.ndarray) -> GridWavefunction:
    a0, api = psi.edge_powers
    return GridWavefunction(psi.grid, values, psi.m, (a0 - 1.0, api - 1.0))


def intertwine_down(p: SuperpotentialParams, psi: GridWavefunction) -> GridWavefunction:
    """A psi = (d/dtheta + W) psi; maps H1 states onto H2 states."""
    return _shifted(psi, derivative(psi) + superpotential(p, psi.grid.nodes) * psi.values)


def intertwine_up(p: SuperpotentialParams, psi: GridWavefunction) -> GridWavefunction:
    """A^dagger psi = (-d/dtheta + W) psi; maps H2 states onto H1 states."""
    return _shifted(psi, -derivative(psi) + superpotential(p, psi.grid.nodes) * psi.values)


def free_rotor_ladder(m: int, j: int, grid: Optional[ThetaGrid] = None) -> GridWavefunction:
    """theta part of Y_{j,m} (times sqrt(sin theta)) from the stretched state.

    Starts at sin^{j+1/2} (Y_{j,j}) and lowers m one step at a time with
    A^dagger of W = -(m' + 1/2) cot, m' = j-1, ..., m.
    """
    m = abs(int(m))
    if j < m:
        raise ValueError(f"j={j} < |m|={m}")
    grid = grid or ThetaGrid()
    top = j + 0.5
    psi = GridWavefunction(grid, np.sin(grid.nodes) ** top, j, (top, top))
    for mp in range(j - 1, m - 1, -1):
        psi = intertwine_up(SuperpotentialParams(-(mp + 0.5), 0.0, 0.0), psi)
    return GridWavefunction(grid, psi.values, m, psi.edge_powers).normalized()
