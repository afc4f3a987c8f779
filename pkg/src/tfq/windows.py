"""Weyl-Heisenberg systems over the lattice Delta = B x B_*.

Inner products are conjugate-linear in the first slot. The W-H system of a
window ``g`` is ``{g_(b, b_*)}`` with ``g_(x, x*)(a) = g(a - x) chi_{x*}(a)``;
lattice points are enumerated with ``b`` major and ``b_*`` minor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from tfq.errors import DomainError, InvalidWindowError, ShapeError
from tfq.groups import GroupElement, Subgroup, unit_root
from tfq.transforms import (
    RESTRICTED,
    Signal,
    ZakArray,
    inverse_zak,
    restrict_to_t,
    zak_direct,
    zak_fast,
)

DEFAULT_TOL = 1e-8
NORM_TOL = 1e-10


class Lattice:
    def __init__(self, subgroup: Subgroup):
        self.subgroup = subgroup
        self.tables = subgroup.tables
        self.annihilator = self.tables.annihilator
        nb, ns = subgroup.order, self.annihilator.order
        self.shape = (nb, ns)
        # delta[k] = (position in B, position in B_*)
        self.delta = np.stack(np.divmod(np.arange(nb * ns), ns), axis=1)

    @property
    def group(self):
        return self.subgroup.parent

    def __len__(self):
        return len(self.delta)

    def points(self):
        """Lattice points as ``(b, b_*)`` coordinate arrays, in enumeration order."""
        b = self.subgroup.elements[self.delta[:, 0]]
        s = self.annihilator.elements[self.delta[:, 1]]
        return b, s

    def same_as(self, other) -> bool:
        return self.subgroup.same_as(other.subgroup)

    def translates(self, g: Signal) -> np.ndarray:
        """Matrix whose row ``k`` is ``g_(b, b_*)`` for lattice point ``k``."""
        G = self.group
        b, s = self.points()
        shifted = g.values[G.index(G.elements[None, :, :] - b[:, None, :])]
        mod = G.characters(s, G.elements)
        return shifted * mod


@dataclass
class Window:
    g: Signal
    lattice: Lattice
    zak_g: ZakArray
    valid: bool
    deviation: float
    tol: float
    phases: np.ndarray | None = field(default=None, repr=False)

    @property
    def status(self) -> str:
        return "validated-orthonormal" if self.valid else "invalid"

    @property
    def target_modulus(self) -> float:
        g = self.lattice.group
        return float(np.sqrt(self.lattice.subgroup.order / g.order))

    def zak_on_t(self) -> np.ndarray:
        return restrict_to_t(self.zak_g).values

    def require_valid(self):
        if not self.valid:
            raise InvalidWindowError(
                f"window is not orthonormal over {self.lattice.subgroup.spec} "
                f"(max modulus deviation {self.deviation:.3e} > {self.tol:g})"
            )


@dataclass
class WHCoefficients:
    lattice: Lattice
    alpha: np.ndarray

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=np.complex128)
        if self.alpha.size != len(self.lattice):
            raise ShapeError(f"need {len(self.lattice)} coefficients, got {self.alpha.size}")
        self.alpha = self.alpha.reshape(self.lattice.shape)

    @property
    def flat(self) -> np.ndarray:
        return self.alpha.reshape(-1)


@dataclass
class PeriodicCorrelation:
    lattice: Lattice
    values: np.ndarray


def tf_translate(g: Signal, x: GroupElement, x_star: GroupElement) -> Signal:
    """``a -> g(a - x) chi_{x*}(a)``."""
    G = g.group
    if x.group != G or x_star.group != G:
        raise DomainError("translate parameters live on a different group")
    shifted = g.values[G.index(G.elements - np.asarray(x.coords))]
    return Signal(G, shifted * G.characters(x_star.coords, G.elements)[0])


def _modulus_deviation(zak_full, subgroup):
    target = np.sqrt(subgroup.order / subgroup.parent.order)
    return float(np.max(np.abs(np.abs(zak_full.values) - target)))


def check_window(g: Signal, subgroup: Subgroup, tol: float = DEFAULT_TOL, norm_tol: float = NORM_TOL) -> Window:
    """Orthonormality test ``|Z(B)g| == sqrt(|B|/|A|)`` on all of A x A*.

    ``tol`` bounds the modulus deviation; ``norm_tol`` is the unit-norm precondition.
    """
    if abs(g.norm - 1.0) > max(tol, norm_tol):
        raise InvalidWindowError(f"window must have unit norm, got {g.norm:.17g}")
    zak = zak_direct(g, subgroup)
    dev = _modulus_deviation(zak, subgroup)
    return Window(g, Lattice(subgroup), zak, dev <= tol, dev, tol)


def window_from_phases(theta, subgroup: Subgroup, tol: float = DEFAULT_TOL) -> Window:
    """Window whose Zak transform on T is ``sqrt(|B|/|A|) exp(i theta)``.

    ``theta`` has one angle per point of T1 x T2 (T1 major).
    """
    tables = subgroup.tables
    theta = np.asarray(theta, dtype=np.float64)
    if theta.size != subgroup.parent.order:
        raise ShapeError(f"need {subgroup.parent.order} phases, got {theta.size}")
    theta = theta.reshape(tables.shape)
    scale = np.sqrt(subgroup.order / subgroup.parent.order)
    g = inverse_zak(ZakArray(tables, RESTRICTED, scale * np.exp(1j * theta)))
    window = check_window(g, subgroup, tol)
    window.phases = theta
    return window


def window_from_rational_phases(pq, subgroup: Subgroup, tol: float = DEFAULT_TOL) -> Window:
    """As :func:`window_from_phases` with angles given exactly as ``2 pi p / q``."""
    pq = np.asarray(pq, dtype=np.int64).reshape(-1, 2)
    if np.any(pq[:, 1] <= 0):
        raise ShapeError("phase denominators must be positive")
    tables = subgroup.tables
    if len(pq) != subgroup.parent.order:
        raise ShapeError(f"need {subgroup.parent.order} phases, got {len(pq)}")
    scale = np.sqrt(subgroup.order / subgroup.parent.order)
    roots = np.array([complex(unit_root(p, q)) for p, q in pq]).reshape(tables.shape)
    g = inverse_zak(ZakArray(tables, RESTRICTED, scale * roots))
    window = check_window(g, subgroup, tol)
    window.phases = (2 * np.pi * pq[:, 0] / pq[:, 1]).reshape(tables.shape)
    return window


def _require_lattice(window, lattice):
    if not window.lattice.same_as(lattice):
        raise DomainError(
            f"coefficients over {lattice.subgroup.spec}, window over {window.lattice.subgroup.spec}"
        )


def wh_analyze(f: Signal, window: Window, method: str = "direct") -> WHCoefficients:
    """Coefficients ``alpha(b, b_*) = <g_(b,b_*) | f>``.

    ``method="zak"`` uses the factorisation ``F = G P`` instead: the quotient
    ``F / G`` on T is expanded in the characters of Delta.
    """
    window.require_valid()
    lat = window.lattice
    if f.group != lat.group:
        raise DomainError(f"signal on {f.group}, window on {lat.group}")
    if method == "direct":
        alpha = np.conj(lat.translates(window.g)) @ f.values
        return WHCoefficients(lat, alpha)
    if method != "zak":
        raise ValueError(f"unknown analysis method {method!r}")
    G = lat.group
    t = lat.tables
    ratio = zak_fast(f, lat.subgroup).values / window.zak_on_t()
    # alpha[b, b_*] = |A|^-1 sum_{x, t} P(x, t) conj(chi_{b_*}(x)) chi_t(b)
    c1 = G.characters(lat.annihilator.elements, t.t1, conjugate=True)
    c2 = G.characters(t.t2, lat.subgroup.elements)
    alpha = (c2.T @ ratio.T @ c1.T) / G.order
    return WHCoefficients(lat, alpha)


def wh_synthesize(alpha: WHCoefficients, window: Window) -> Signal:
    """``f = sum alpha(b, b_*) g_(b, b_*)``."""
    window.require_valid()
    _require_lattice(window, alpha.lattice)
    return Signal(window.lattice.group, window.lattice.translates(window.g).T @ alpha.flat)


def periodic_correlation(alpha: WHCoefficients, lattice: Lattice | None = None) -> PeriodicCorrelation:
    """``P(a, a*) = sum alpha(b, b_*) chi_{b_*}(a) conj(chi_{a*}(b))``."""
    lat = alpha.lattice
    if lattice is not None and not lattice.same_as(lat):
        raise DomainError("coefficients belong to a different lattice")
    G = lat.group
    c1 = G.characters(lat.annihilator.elements, G.elements)
    c2 = G.characters(G.elements, lat.subgroup.elements, conjugate=True)
    return PeriodicCorrelation(lat, c1.T @ alpha.alpha.T @ c2.T)


def correlation_coefficients(corr: PeriodicCorrelation) -> WHCoefficients:
    """Fourier coefficients of ``P`` over A x A*, read off on Delta."""
    lat = corr.lattice
    G = lat.group
    c1 = G.characters(lat.annihilator.elements, G.elements, conjugate=True)
    c2 = G.characters(G.elements, lat.subgroup.elements)
    alpha = (c1 @ corr.values @ c2).T / G.order**2
    return WHCoefficients(lat, alpha)


def verify_fgp(f: Signal, window: Window) -> float:
    """Max over A x A* of ``|F - G P|`` with ``P`` from the W-H expansion of ``f``."""
    window.require_valid()
    F = zak_direct(f, window.lattice.subgroup).values
    P = periodic_correlation(wh_analyze(f, window)).values
    return float(np.max(np.abs(F - window.zak_g.values * P)))


def gram_matrix(window: Window | Signal, subgroup: Subgroup | None = None) -> np.ndarray:
    """``gram[k, l] = <g_k | g_l>`` over the lattice; works for invalid windows too."""
    if isinstance(window, Window):
        g, lat = window.g, window.lattice
    else:
        if subgroup is None:
            raise ValueError("a bare signal needs a subgroup")
        g, lat = window, Lattice(subgroup)
    W = lat.translates(g)
    return np.conj(W) @ W.T


def is_orthonormal(gram: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return bool(np.max(np.abs(gram - np.eye(len(gram)))) <= tol)
