"""Finite abelian groups as products of cyclic factors.

A group is given by its moduli ``[n_1, ..., n_k]``; elements are coordinate
tuples with ``0 <= a_j < n_j`` and are enumerated in mixed-radix order (last
coordinate fastest), which is also lexicographic order. The dual group A* uses
the same coordinate space, with the character of ``a*`` given by

    chi_{a*}(a) = exp(2 pi i sum_j a*_j a_j / n_j).

Characters are handled internally as exact integer residues ``r mod L``
(``L`` the exponent of the group) with ``chi = exp(2 pi i r / L)``, so tests like
``chi(b) == 1`` are decided without floating point.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from tfq.errors import (
    DomainError,
    InvalidGroupError,
    InvalidSubgroupError,
    UnsupportedIsomorphismError,
)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    moduli: tuple[int, ...]

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.moduli)

    @cached_property
    def elements(self) -> np.ndarray:
        """All elements as an ``(order, rank)`` int array in mixed-radix order."""
        grids = np.meshgrid(*[np.arange(n) for n in self.moduli], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)

    @cached_property
    def _strides(self) -> np.ndarray:
        strides = np.ones(self.rank, dtype=np.int64)
        for j in range(self.rank - 2, -1, -1):
            strides[j] = strides[j + 1] * self.moduli[j + 1]
        return strides

    @cached_property
    def _mod(self) -> np.ndarray:
        return np.asarray(self.moduli, dtype=np.int64)

    def reduce(self, coords) -> np.ndarray:
        return np.mod(np.asarray(coords, dtype=np.int64), self._mod)

    def index(self, coords) -> np.ndarray | int:
        """Flat mixed-radix index of coordinates (last axis holds coordinates)."""
        flat = self.reduce(coords) @ self._strides
        return int(flat) if np.ndim(flat) == 0 else flat

    def element(self, coords) -> GroupElement:
        return GroupElement(self, tuple(int(c) for c in self._checked(coords)))

    def dual(self, coords) -> DualElement:
        return DualElement(self, tuple(int(c) for c in self._checked(coords)))

    def _checked(self, coords):
        coords = tuple(coords)
        if len(coords) != self.rank:
            raise DomainError(f"expected {self.rank} coordinates for {self}, got {coords}")
        return self.reduce(coords)

    def residues(self, duals, elems) -> np.ndarray:
        """Integer table ``r[i, j]`` with ``chi_{duals[i]}(elems[j]) = exp(2 pi i r / L)``."""
        L = self.exponent
        weights = np.array([L // n for n in self.moduli], dtype=np.int64)
        duals = np.atleast_2d(np.asarray(duals, dtype=np.int64))
        elems = np.atleast_2d(np.asarray(elems, dtype=np.int64))
        return np.mod((duals * weights) @ elems.T, L)

    def characters(self, duals, elems, conjugate=False) -> np.ndarray:
        sign = -1 if conjugate else 1
        return unit_root(sign * self.residues(duals, elems), self.exponent)

    def __str__(self):
        return "x".join(f"Z{n}" for n in self.moduli)


def unit_root(r, L) -> np.ndarray:
    """``exp(2 pi i r / L)`` with exact values at multiples of a quarter turn."""
    r = np.mod(np.asarray(r, dtype=np.int64), L)
    out = np.exp(2j * np.pi * r / L)
    if L % 4 == 0:
        q = L // 4
        for k, val in enumerate((1, 1j, -1, -1j)):
            out = np.where(r == k * q, val, out)
    elif L % 2 == 0:
        out = np.where(r == 0, 1, np.where(r == L // 2, -1, out))
    else:
        out = np.where(r == 0, 1, out)
    return out.astype(np.complex128)


@dataclass(frozen=True)
class GroupElement:
    group: FiniteAbelianGroup
    coords: tuple[int, ...]

    def _other(self, other):
        if not isinstance(other, GroupElement) or other.group != self.group:
            raise DomainError(f"cannot combine elements of {self.group} and {other}")
        return other

    def __add__(self, other):
        other = self._other(other)
        return type(self)(self.group, tuple(int(c) for c in self.group.reduce(np.add(self.coords, other.coords))))

    def __sub__(self, other):
        other = self._other(other)
        return type(self)(self.group, tuple(int(c) for c in self.group.reduce(np.subtract(self.coords, other.coords))))

    def __neg__(self):
        return type(self)(self.group, tuple(int(c) for c in self.group.reduce(np.negative(self.coords))))

    @property
    def index(self) -> int:
        return self.group.index(self.coords)

    def __iter__(self):
        return iter(self.coords)


class DualElement(GroupElement):
    """A character of the group, labelled by its index tuple."""

    def __call__(self, a: GroupElement) -> complex:
        return char_eval(self, a)


def make_group(moduli) -> FiniteAbelianGroup:
    moduli = list(moduli)
    if not moduli:
        raise InvalidGroupError("a group needs at least one cyclic factor")
    for n in moduli:
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise InvalidGroupError(f"invalid modulus {n!r}; moduli must be positive integers")
    return FiniteAbelianGroup(tuple(int(n) for n in moduli))


def char_eval(a_star: DualElement, a: GroupElement) -> complex:
    if a_star.group != a.group:
        raise DomainError(f"character on {a_star.group} evaluated at element of {a.group}")
    r = a_star.group.residues(a_star.coords, a.coords)[0, 0]
    return complex(unit_root(r, a_star.group.exponent))


class Subgroup:
    """A subgroup of ``parent``, stored as its sorted element list.

    An *aligned* subgroup is ``prod_j d_j Z_{n_j}``; a *generated* one is the
    closure of a list of generators. Annihilators are stored as subgroups of
    the same coordinate space (``is_dual`` set).
    """

    def __init__(self, parent, elements, divisors=None, generators=None, is_dual=False):
        self.parent = parent
        self.elements = np.asarray(elements, dtype=np.int64).reshape(-1, parent.rank)
        self.divisors = None if divisors is None else tuple(divisors)
        self.generators = None if generators is None else tuple(tuple(g) for g in generators)
        self.is_dual = is_dual
        self.flat = parent.index(self.elements)
        order = np.argsort(self.flat)
        self.elements, self.flat = self.elements[order], self.flat[order]
        self._pos = np.full(parent.order, -1, dtype=np.int64)
        self._pos[self.flat] = np.arange(len(self.flat))

    @property
    def order(self) -> int:
        return len(self.flat)

    @property
    def is_aligned(self) -> bool:
        return self.divisors is not None

    @property
    def kind(self) -> str:
        return "aligned" if self.is_aligned else "generated"

    @property
    def spec(self) -> str:
        if self.is_aligned:
            return "div:" + ",".join(map(str, self.divisors))
        return "gen:" + ";".join("(" + ",".join(map(str, g)) + ")" for g in self.generators)

    def position(self, coords) -> np.ndarray | int:
        """Position in the sorted element list, or -1 if not a member."""
        pos = self._pos[self.parent.index(coords)]
        return int(pos) if np.ndim(pos) == 0 else pos

    def contains(self, coords) -> bool:
        return self.position(coords) >= 0

    def same_as(self, other) -> bool:
        return self.parent == other.parent and np.array_equal(self.flat, other.flat)

    @cached_property
    def tables(self) -> CosetTables:
        return CosetTables(self)

    def __repr__(self):
        return f"Subgroup({self.parent}, {self.spec}, order={self.order})"


def subgroup_from_divisors(group, divisors) -> Subgroup:
    divisors = list(divisors)
    if len(divisors) != group.rank:
        raise InvalidSubgroupError(f"need {group.rank} divisors for {group}, got {divisors}")
    for d, n in zip(divisors, group.moduli):
        if not isinstance(d, (int, np.integer)) or d < 1 or n % d:
            raise InvalidSubgroupError(f"{d} does not divide {n}")
    axes = [np.arange(0, n, d) for d, n in zip(divisors, group.moduli)]
    elements = list(itertools.product(*axes))
    return Subgroup(group, elements, divisors=[int(d) for d in divisors])


def subgroup_from_generators(group, generators) -> Subgroup:
    gens = [tuple(int(c) for c in group._checked(g)) for g in generators]
    seen = {tuple([0] * group.rank)}
    frontier = list(seen)
    mod = group.moduli
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                s = tuple((x + y) % n for x, y, n in zip(e, g, mod))
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return Subgroup(group, sorted(seen), generators=gens)


def annihilator(subgroup: Subgroup) -> Subgroup:
    """B_* = characters equal to 1 on every element of B."""
    group = subgroup.parent
    r = group.residues(group.elements, subgroup.elements)
    members = group.elements[np.all(r == 0, axis=1)]
    divisors = None
    if subgroup.is_aligned:
        divisors = [n // d for n, d in zip(group.moduli, subgroup.divisors)]
    return Subgroup(group, members, divisors=divisors, is_dual=not subgroup.is_dual)


def _coset_reps(group, sub: Subgroup):
    """Lexicographically minimal representative of each coset of ``sub``.

    Returns ``(rep_flat, reps)``: the representative's flat index for every
    element, and the sorted distinct representatives.
    """
    E = group.elements
    sums = group.index(E[:, None, :] + sub.elements[None, :, :])
    rep_flat = sums.min(axis=1)
    return rep_flat, np.unique(rep_flat)


class CosetTables:
    """Coset representatives of B in A (T1) and of B_* in A* (T2).

    For every flat index ``a``: ``rep[a]`` is the flat index of ``x_a``,
    ``t1_pos[a]`` its position in T1 and ``b_pos[a]`` the position in B of
    ``x_a - a``. ``t2_pos[a*]`` is the position in T2 of the representative of
    ``a* + B_*``. ``restrict[j, k]`` is the residue of T2[j] evaluated on B[k].
    """

    def __init__(self, subgroup: Subgroup):
        group = subgroup.parent
        self.group = group
        self.subgroup = subgroup
        self.annihilator = annihilator(subgroup)

        self.rep, t1_flat = _coset_reps(group, subgroup)
        self.t1 = group.elements[t1_flat]
        self.t1_pos = np.searchsorted(t1_flat, self.rep)
        offsets = group.elements[self.rep] - group.elements
        self.b_pos = subgroup.position(offsets)

        self.dual_rep, t2_flat = _coset_reps(group, self.annihilator)
        self.t2 = group.elements[t2_flat]
        self.t2_pos = np.searchsorted(t2_flat, self.dual_rep)
        self.restrict = group.residues(self.t2, subgroup.elements)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.t1), len(self.t2)

    def coset_decompose(self, a) -> tuple[GroupElement, GroupElement]:
        return coset_decompose(self, a)

    def bstar_label(self, j: int) -> tuple[int, ...]:
        """Label of the character of B obtained by restricting T2[j].

        Aligned subgroups use the closed form ``m`` with
        ``b*(d m') = exp(2 pi i sum m_j m'_j / M_j)``; otherwise the label is ``(j,)``.
        """
        if self.subgroup.is_aligned:
            M = [n // d for n, d in zip(self.group.moduli, self.subgroup.divisors)]
            return tuple(int(t % m) for t, m in zip(self.t2[j], M))
        return (int(j),)


def coset_tables(subgroup: Subgroup) -> CosetTables:
    return subgroup.tables


def coset_decompose(tables: CosetTables, a) -> tuple[GroupElement, GroupElement]:
    """Split ``a`` into ``(x_a, x_a - a)`` with ``x_a`` in T1 and ``x_a - a`` in B."""
    group = tables.group
    coords = a.coords if isinstance(a, GroupElement) else a
    i = group.index(coords)
    x = group.element(group.elements[tables.rep[i]])
    return x, x - group.element(coords)


class IsomorphismPhi:
    """Explicit isomorphisms A -> A*, B -> B* and A/B -> B_* for an aligned B.

    With ``B = prod d_j Z_{n_j}`` and ``M_j = n_j / d_j``:

    * ``a -> a`` (a character with the same index tuple),
    * ``d m -> m`` (B* labelled by T2 representatives, ``0 <= m_j < M_j``),
    * ``x -> M x`` for a coset representative ``0 <= x_j < d_j``.
    """

    def __init__(self, group: FiniteAbelianGroup, subgroup: Subgroup):
        if not subgroup.is_aligned:
            raise UnsupportedIsomorphismError(
                f"explicit isomorphisms need an aligned subgroup, got {subgroup.spec}"
            )
        if subgroup.parent != group:
            raise DomainError(f"{subgroup} is not a subgroup of {group}")
        self.group = group
        self.subgroup = subgroup
        self.d = np.asarray(subgroup.divisors, dtype=np.int64)
        self.M = np.asarray(group.moduli, dtype=np.int64) // self.d

    def map_a_to_dual(self, a):
        return self.group.reduce(a)

    def map_dual_to_a(self, a_star):
        return self.group.reduce(a_star)

    def map_b_to_bstar(self, b):
        b = np.asarray(b, dtype=np.int64)
        if not np.all(self.subgroup.position(b) >= 0):
            raise DomainError(f"{b.tolist()} is not in {self.subgroup.spec}")
        return b // self.d

    def map_bstar_to_b(self, t):
        return np.mod(np.asarray(t, dtype=np.int64), self.M) * self.d

    def map_quot_to_ann(self, a):
        """Image of the coset ``a + B`` (any representative) in B_*."""
        return np.mod(np.asarray(a, dtype=np.int64), self.d) * self.M

    def map_ann_to_quot(self, b_star):
        b_star = np.asarray(b_star, dtype=np.int64)
        if not np.all(self.subgroup.tables.annihilator.position(b_star) >= 0):
            raise DomainError(f"{b_star.tolist()} is not in the annihilator")
        return b_star // self.M


def make_phi(group, aligned_subgroup) -> IsomorphismPhi:
    return IsomorphismPhi(group, aligned_subgroup)


def parse_group(spec: str) -> FiniteAbelianGroup:
    """Parse ``Z4`` or ``Z2xZ4`` (case-insensitive)."""
    text = spec.strip().lower()
    if not re.fullmatch(r"z\d+(?:xz\d+)*", text):
        raise InvalidGroupError(f"cannot parse group spec {spec!r}")
    return make_group([int(tok[1:]) for tok in text.split("x")])


def parse_subgroup(group: FiniteAbelianGroup, spec: str) -> Subgroup:
    """Parse ``div:2`` / ``div:1,2`` or ``gen:(2)`` / ``gen:(1,2);(0,2)``."""
    kind, sep, body = spec.strip().partition(":")
    kind = kind.lower()
    if not sep or kind not in ("div", "gen"):
        raise InvalidSubgroupError(f"cannot parse subgroup spec {spec!r}")
    try:
        if kind == "div":
            return subgroup_from_divisors(group, [int(t) for t in body.split(",")])
        gens = []
        for tok in filter(None, (t.strip() for t in body.split(";"))):
            if not (tok.startswith("(") and tok.endswith(")")):
                raise ValueError(tok)
            inner = tok[1:-1].strip()
            if inner:
                gens.append([int(t) for t in inner.split(",")])
        return subgroup_from_generators(group, gens)
    except (ValueError, DomainError) as exc:
        raise InvalidSubgroupError(f"cannot parse subgroup spec {spec!r}: {exc}") from exc
