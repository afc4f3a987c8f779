"""Fourier and Zak transforms over a finite abelian group.

Conventions: the forward Fourier transform is unitary with conjugated kernel,

    fourier(f)(a*) = |A|^{-1/2} sum_a conj(chi_{a*}(a)) f(a),

and the Zak transform over B is the unnormalised sum

    Z(B)f(a, a*) = sum_{b in B} f(a + b) conj(chi_{a*}(b)).

A full Zak array is indexed ``[a, a*]`` by flat indices; the restricted form is
indexed ``[i, j]`` by positions in T1 and T2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tfq import fft
from tfq.errors import DomainError, ShapeError
from tfq.groups import CosetTables, FiniteAbelianGroup, Subgroup, unit_root

FULL = "full"
RESTRICTED = "T"


@dataclass
class Signal:
    group: FiniteAbelianGroup
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if self.values.shape[0] != self.group.order:
            raise ShapeError(
                f"signal on {self.group} needs {self.group.order} values, got {self.values.shape[0]}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def __getitem__(self, coords):
        return self.values[self.group.index(coords)]


@dataclass
class ZakArray:
    tables: CosetTables
    domain: str
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        n = self.tables.group.order
        expected = (n, n) if self.domain == FULL else self.tables.shape
        if self.domain not in (FULL, RESTRICTED):
            raise ValueError(f"unknown Zak domain {self.domain!r}")
        if self.values.size != expected[0] * expected[1]:
            raise ShapeError(f"{self.domain} Zak array needs shape {expected}, got {self.values.shape}")
        self.values = self.values.reshape(expected)

    @property
    def subgroup(self) -> Subgroup:
        return self.tables.subgroup

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.tables.group

    def at(self, a, a_star) -> complex:
        """Value at ``(a, a*)``, extending quasi-periodically if restricted."""
        g = self.group
        if self.domain == FULL:
            return complex(self.values[g.index(a), g.index(a_star)])
        return complex(_quasi_periodic_full(self)[g.index(a), g.index(a_star)])


def _check_signal(signal, subgroup):
    if signal.group != subgroup.parent:
        raise DomainError(f"signal on {signal.group} but subgroup of {subgroup.parent}")


def fourier_matrix(group: FiniteAbelianGroup) -> np.ndarray:
    E = group.elements
    return group.characters(E, E, conjugate=True) / np.sqrt(group.order)


def fourier(signal: Signal) -> Signal:
    """Dense evaluation of the unitary Fourier transform; the output is indexed by A*."""
    return Signal(signal.group, fourier_matrix(signal.group) @ signal.values)


def fourier_fast(signal: Signal, backend=None) -> Signal:
    """Row-column mixed-radix evaluation of :func:`fourier`."""
    g = signal.group
    out = fft.fftn(signal.values.reshape(g.moduli), sign=-1, backend=backend)
    return Signal(g, out.reshape(-1) / np.sqrt(g.order))


def _shift_index(group, subgroup):
    # S[a, k] = flat index of a + B[k]
    return group.index(group.elements[:, None, :] + subgroup.elements[None, :, :])


def zak_direct(signal: Signal, subgroup: Subgroup) -> ZakArray:
    """Full Zak array by the defining sum at every ``(a, a*)``."""
    _check_signal(signal, subgroup)
    g = signal.group
    fibers = signal.values[_shift_index(g, subgroup)]
    kernel = g.characters(g.elements, subgroup.elements, conjugate=True)
    return ZakArray(subgroup.tables, FULL, fibers @ kernel.T)


def _aligned_layout(subgroup):
    g = subgroup.parent
    d = subgroup.divisors
    M = tuple(n // dj for n, dj in zip(g.moduli, d))
    # a_j = m_j d_j + x_j: split each axis into (m_j, x_j)
    split = tuple(s for pair in zip(M, d) for s in pair)
    k = g.rank
    m_axes = tuple(2 * j for j in range(k))
    x_axes = tuple(2 * j + 1 for j in range(k))
    return M, split, m_axes, x_axes


def zak_fast(signal: Signal, subgroup: Subgroup, backend=None) -> ZakArray:
    """Zak array on T1 x T2.

    For aligned B each fibre ``b -> f(x + b)`` is a function on
    ``prod Z_{M_j}`` and ``a* -> F(x, a*)`` on T2 is its unnormalised DFT, so the
    whole table is one multi-axis FFT. Other subgroups use the defining sum on T.
    """
    _check_signal(signal, subgroup)
    tables = subgroup.tables
    g = signal.group
    if not subgroup.is_aligned:
        t1_flat = g.index(tables.t1)
        fibers = signal.values[_shift_index(g, subgroup)[t1_flat]]
        kernel = g.characters(tables.t2, subgroup.elements, conjugate=True)
        return ZakArray(tables, RESTRICTED, fibers @ kernel.T)
    M, split, m_axes, x_axes = _aligned_layout(subgroup)
    cube = signal.values.reshape(split)
    spectrum = fft.fftn(cube, axes=m_axes, sign=-1, backend=backend)
    values = np.transpose(spectrum, x_axes + m_axes).reshape(tables.shape)
    return ZakArray(tables, RESTRICTED, values)


def restrict_to_t(zak: ZakArray) -> ZakArray:
    if zak.domain == RESTRICTED:
        return zak
    t = zak.tables
    g = t.group
    vals = zak.values[np.ix_(g.index(t.t1), g.index(t.t2))]
    return ZakArray(t, RESTRICTED, vals)


def _quasi_periodic_full(zak: ZakArray) -> np.ndarray:
    # F(a, a*) = conj(chi_{a*}(x_a - a)) F(x_a, t(a*))
    t = zak.tables
    g = t.group
    offsets = g.elements[t.rep] - g.elements
    phase = g.characters(g.elements, offsets, conjugate=True).T
    base = zak.values[t.t1_pos[:, None], t.t2_pos[None, :]]
    return phase * base


def extend_from_t(zak: ZakArray) -> ZakArray:
    """Full array from values on T by the quasi-periodicity rule."""
    if zak.domain == FULL:
        return zak
    return ZakArray(zak.tables, FULL, _quasi_periodic_full(zak))


def inverse_zak(zak: ZakArray, subgroup: Subgroup | None = None) -> Signal:
    """``f(a) = |B|^{-1} sum_{t in T2} F(a, t)``."""
    t = zak.tables
    if subgroup is not None and not subgroup.same_as(t.subgroup):
        raise DomainError(f"Zak array is over {t.subgroup.spec}, not {subgroup.spec}")
    g = t.group
    if zak.domain == FULL:
        cols = zak.values[:, g.index(t.t2)]
    else:
        # rows a of the extension, restricted to columns in T2
        offsets = g.elements[t.rep] - g.elements
        phase = unit_root(-g.residues(t.t2, offsets), g.exponent).T
        cols = phase * zak.values[t.t1_pos]
    return Signal(g, cols.sum(axis=1) / t.subgroup.order)

