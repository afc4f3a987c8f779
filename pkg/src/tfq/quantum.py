"""State-vector simulation of the quantum Zak and Weyl-Heisenberg transforms.

Operators are pipelines of structured stages. Every stage can produce its dense
matrix, and the dense builders ``direct_qzt_matrix`` / ``direct_qwht_matrix``
evaluate the defining formulas independently of the stage decomposition.

Register layouts are two registers (first major) after the coset split. Tags:

    A          one register holding a group element
    T1, B      coset representative, element of B
    T1, B*     coset representative, character of B (labelled by its T2 rep)
    B_*, B     after the explicit isomorphisms
    B, B_*     a lattice point of Delta = B x B_*
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from tfq import fft
from tfq.errors import DomainError, ShapeError
from tfq.groups import CosetTables, IsomorphismPhi, unit_root
from tfq.windows import Window

UNITARY_TOL = 1e-10
NORM_TOL = 1e-12


def unitarity_error(U: np.ndarray) -> float:
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[1]))))


class RegisterLayout:
    def __init__(self, tables: CosetTables, tags: tuple[str, ...]):
        self.tables = tables
        self.tags = tuple(tags)
        self.dims = tuple(len(self._labels(t)) for t in self.tags)
        if int(np.prod(self.dims)) != tables.group.order:
            raise ShapeError(f"layout {self.tags} has dimension {self.dims}")

    def _labels(self, tag):
        t = self.tables
        return {
            "A": t.group.elements,
            "T1": t.t1,
            "B": t.subgroup.elements,
            "B*": t.t2,
            "B_*": t.annihilator.elements,
        }[tag]

    @property
    def dim(self) -> int:
        return self.tables.group.order

    def split(self, k):
        return np.unravel_index(k, self.dims)

    def flat(self, *positions):
        return np.ravel_multi_index(positions, self.dims)

    def labels(self):
        """Per flat index, the coordinates held by each register."""
        idx = np.unravel_index(np.arange(self.dim), self.dims)
        return [self._labels(tag)[i] for tag, i in zip(self.tags, idx)]


@dataclass
class StateVector:
    layout: RegisterLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if self.amplitudes.shape[0] != self.layout.dim:
            raise ShapeError(f"state needs {self.layout.dim} amplitudes")
        n = np.linalg.norm(self.amplitudes)
        if abs(n - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {n:.17g} is not 1")

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


class Stage:
    kind = "dense"

    def __init__(self, name, dim, in_tags, out_tags):
        self.name = name
        self.dim = dim
        self.in_tags = tuple(in_tags)
        self.out_tags = tuple(out_tags)

    def apply(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def matrix(self) -> np.ndarray:
        return self.apply(np.eye(self.dim, dtype=np.complex128))

    def params(self) -> dict:
        return {}

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r}, dim={self.dim})"


class DenseStage(Stage):
    def __init__(self, name, U, in_tags, out_tags):
        super().__init__(name, U.shape[0], in_tags, out_tags)
        self.U = np.asarray(U, dtype=np.complex128)

    def apply(self, v):
        return self.U @ v

    def matrix(self):
        return self.U.copy()


class PermutationStage(Stage):
    """Basis state ``k`` goes to ``perm[k]``."""

    kind = "permutation"

    def __init__(self, name, perm, in_tags, out_tags):
        super().__init__(name, len(perm), in_tags, out_tags)
        self.perm = np.asarray(perm, dtype=np.int64)
        if not np.array_equal(np.sort(self.perm), np.arange(self.dim)):
            raise ValueError(f"{name} is not a permutation")

    def apply(self, v):
        out = np.empty_like(np.asarray(v, dtype=np.complex128))
        out[self.perm] = v
        return out

    def matrix(self):
        U = np.zeros((self.dim, self.dim), dtype=np.complex128)
        U[self.perm, np.arange(self.dim)] = 1
        return U

    def params(self):
        return {"perm": self.perm.tolist()}


class DiagonalPhaseStage(Stage):
    kind = "diagonal"

    def __init__(self, name, diag, in_tags, out_tags):
        diag = np.asarray(diag, dtype=np.complex128).reshape(-1)
        super().__init__(name, len(diag), in_tags, out_tags)
        self.diag = diag

    def apply(self, v):
        v = np.asarray(v, dtype=np.complex128)
        return self.diag.reshape((-1,) + (1,) * (v.ndim - 1)) * v

    def matrix(self):
        return np.diag(self.diag)

    def params(self):
        return {"phases": np.angle(self.diag).tolist()}


class FourierFactor:
    """A square transform on one register: a dense matrix, plus optionally the
    equivalent scaled multi-axis FFT used by :meth:`apply`."""

    def __init__(self, dense, fft_shape=None, sign=None):
        self.dense = np.asarray(dense, dtype=np.complex128)
        self.fft_shape = None if fft_shape is None else tuple(int(s) for s in fft_shape)
        self.sign = sign

    @property
    def n(self):
        return self.dense.shape[0]

    def apply(self, x, axis):
        x = np.moveaxis(x, axis, 0)
        if self.fft_shape is None:
            y = np.tensordot(self.dense, x, axes=(1, 0))
        else:
            rest = x.shape[1:]
            cube = x.reshape(self.fft_shape + rest)
            y = fft.fftn(cube, axes=range(len(self.fft_shape)), sign=self.sign)
            y = y.reshape((self.n,) + rest) / np.sqrt(self.n)
        return np.moveaxis(y, 0, axis)

    def describe(self):
        if self.fft_shape is None:
            return {"dense": self.n}
        return {"fft_shape": list(self.fft_shape), "sign": self.sign}


class BlockFourierStage(Stage):
    """``left (x) right`` on a two-register layout, optionally swapping the
    registers on output; ``left=None`` means identity on the first register."""

    kind = "block_fourier"

    def __init__(self, name, dims, left, right, in_tags, out_tags, swap=False):
        super().__init__(name, dims[0] * dims[1], in_tags, out_tags)
        self.dims = tuple(dims)
        self.left = left
        self.right = right
        self.swap = swap

    def apply(self, v):
        v = np.asarray(v, dtype=np.complex128)
        tail = v.shape[1:]
        x = v.reshape(self.dims + tail)
        if self.right is not None:
            x = self.right.apply(x, 1)
        if self.left is not None:
            x = self.left.apply(x, 0)
        if self.swap:
            x = np.swapaxes(x, 0, 1)
        return x.reshape((self.dim,) + tail)

    def matrix(self):
        L = np.eye(self.dims[0]) if self.left is None else self.left.dense
        R = np.eye(self.dims[1]) if self.right is None else self.right.dense
        U = np.kron(L, R)
        if self.swap:
            n1, n2 = self.dims
            k = np.arange(self.dim)
            i, j = np.divmod(k, n2)
            P = np.zeros((self.dim, self.dim))
            P[j * n1 + i, k] = 1
            U = P @ U
        return U

    def params(self):
        return {
            "dims": list(self.dims),
            "left": None if self.left is None else self.left.describe(),
            "right": None if self.right is None else self.right.describe(),
            "swap": self.swap,
        }


@dataclass
class Pipeline:
    name: str
    stages: list
    tables: CosetTables
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for left, right in zip(self.stages, self.stages[1:]):
            if left.out_tags != right.in_tags:
                raise DomainError(f"{left.name} outputs {left.out_tags}, {right.name} expects {right.in_tags}")

    @property
    def dim(self):
        return self.tables.group.order

    @property
    def in_layout(self):
        return RegisterLayout(self.tables, self.stages[0].in_tags)

    @property
    def out_layout(self):
        return RegisterLayout(self.tables, self.stages[-1].out_tags)

    def apply(self, v: np.ndarray) -> np.ndarray:
        for stage in self.stages:
            v = stage.apply(v)
        return v

    def run(self, state: StateVector) -> StateVector:
        """Apply stage by stage; each intermediate state is norm-checked."""
        if state.layout.tags != self.stages[0].in_tags:
            raise DomainError(f"state layout {state.layout.tags} does not match {self.name}")
        for stage in self.stages:
            state = StateVector(RegisterLayout(self.tables, stage.out_tags), stage.apply(state.amplitudes))
        return state

    def matrix(self) -> np.ndarray:
        U = np.eye(self.dim, dtype=np.complex128)
        for stage in self.stages:
            U = stage.matrix() @ U
        return U


def stage_pb(tables: CosetTables) -> PermutationStage:
    """``|a> -> |x_a>|x_a - a>``."""
    nb = tables.subgroup.order
    perm = tables.t1_pos * nb + tables.b_pos
    return PermutationStage("P(B)", perm, ("A",), ("T1", "B"))


def _fb_dense(tables, kernel_sign=1):
    g = tables.group
    r = g.residues(tables.t2, tables.subgroup.elements)
    return unit_root(kernel_sign * r, g.exponent) / np.sqrt(tables.subgroup.order)


def stage_fb(tables: CosetTables, kernel_sign: int = 1) -> BlockFourierStage:
    """Fourier transform of B on the second register: ``|b> -> |B|^-1/2 sum_j chi_{t_j}(b) |j>``.

    The plain (unconjugated) kernel reproduces the QZT amplitudes
    ``chi_{t_j}(x_a - a)``; ``kernel_sign=-1`` gives the conjugate kernel and is
    used only as a negative control.
    """
    sub = tables.subgroup
    dense = _fb_dense(tables, kernel_sign)
    if sub.is_aligned:
        M = [n // d for n, d in zip(tables.group.moduli, sub.divisors)]
        right = FourierFactor(dense, M, kernel_sign)
    else:
        right = FourierFactor(dense)
    dims = tables.shape
    return BlockFourierStage("F_B", dims, None, right, ("T1", "B"), ("T1", "B*"))


def qzt_pipeline(tables: CosetTables, kernel_sign: int = 1) -> Pipeline:
    return Pipeline("qzt", [stage_pb(tables), stage_fb(tables, kernel_sign)], tables)


def direct_qzt_matrix(tables: CosetTables) -> np.ndarray:
    """Column ``a``: ``|B|^-1/2 chi_{t_j}(x_a - a)`` at row ``(x_a, t_j)``."""
    g = tables.group
    n, nb = g.order, tables.subgroup.order
    U = np.zeros((n, n), dtype=np.complex128)
    for a in range(n):
        x = g.elements[tables.rep[a]]
        offset = g.reduce(x - g.elements[a])
        row0 = tables.t1_pos[a] * len(tables.t2)
        for j, t in enumerate(tables.t2):
            r = int(np.dot(t * (g.exponent // np.asarray(g.moduli)), offset)) % g.exponent
            U[row0 + j, a] = complex(unit_root(r, g.exponent)) / np.sqrt(nb)
    return U


def bstar_formulation_matrix(tables: CosetTables):
    """QZT with the second register labelled by characters of B directly.

    Characters of B are enumerated independently of T2: aligned subgroups by
    their closed-form labels, others as the distinct restrictions of A* in
    order of first appearance. Returns ``(matrix, labels, restriction)`` where
    ``restriction[j]`` is the B* position of ``T2[j]``.
    """
    g, sub = tables.group, tables.subgroup
    L = g.exponent
    if sub.is_aligned:
        M = np.asarray(g.moduli) // np.asarray(sub.divisors)
        labels = [tuple(int(v) for v in m) for m in np.ndindex(*M)]
        m_of_b = sub.elements // np.asarray(sub.divisors)
        table = np.array([np.mod(np.sum(np.asarray(m) * m_of_b * (L // M), axis=1), L) for m in labels])
    else:
        every = g.residues(g.elements, sub.elements)
        _, first = np.unique(every, axis=0, return_index=True)
        table = every[np.sort(first)]
        labels = [(k,) for k in range(len(table))]
    restriction = []
    for row in tables.restrict:
        matches = np.nonzero(np.all(table == row, axis=1))[0]
        restriction.append(int(matches[0]))
    nb = sub.order
    U = np.zeros((g.order, g.order), dtype=np.complex128)
    for a in range(g.order):
        row0 = tables.t1_pos[a] * nb
        U[row0:row0 + nb, a] = unit_root(table[:, tables.b_pos[a]], L) / np.sqrt(nb)
    return U, labels, np.asarray(restriction)


def _require_window(window: Window, tables: CosetTables):
    window.require_valid()
    if not window.lattice.subgroup.same_as(tables.subgroup):
        raise DomainError(
            f"window is over {window.lattice.subgroup.spec}, tables over {tables.subgroup.spec}"
        )


def stage_phi(window: Window, tables: CosetTables) -> DiagonalPhaseStage:
    """Phase of ``1/G`` on T, i.e. ``exp(-i arg G(x_i, t_j))``.

    Exact phases are used when the window was built from a phase table.
    """
    _require_window(window, tables)
    if window.phases is not None:
        theta = np.asarray(window.phases).reshape(-1)
    else:
        theta = np.angle(window.zak_on_t()).reshape(-1)
    return DiagonalPhaseStage("Phi(g)", np.exp(-1j * theta), ("T1", "B*"), ("T1", "B*"))


def _check_phi(phi: IsomorphismPhi, tables: CosetTables):
    if not phi.subgroup.same_as(tables.subgroup):
        raise DomainError("isomorphisms and tables refer to different subgroups")


def stage_reinterpret(phi: IsomorphismPhi, tables: CosetTables) -> PermutationStage:
    """Registers ``(x, t)`` reread as ``(phi(x), phi^-1(t))`` in ``B_* x B``."""
    _check_phi(phi, tables)
    n1, n2 = tables.shape
    i, j = np.divmod(np.arange(n1 * n2), n2)
    first = tables.annihilator.position(phi.map_quot_to_ann(tables.t1[i]))
    second = tables.subgroup.position(phi.map_bstar_to_b(tables.t2[j]))
    perm = first * tables.subgroup.order + second
    return PermutationStage("phi", perm, ("T1", "B*"), ("B_*", "B"))


def stage_f_delta(phi: IsomorphismPhi, tables: CosetTables) -> BlockFourierStage:
    """Fourier transform of ``B_* x B`` with output labelled by Delta = B x B_*.

    With the pairings induced by phi, ``<b_*, b_*'> = chi_{b_*}(phi^-1(b_*'))``
    (conjugated) and ``<b, b'> = chi_{phi(b')}(b)``, output ``(b, b_*)`` receives
    ``|A|^-1/2 conj<b_*, b_*'> <b, b'>`` from input ``(b_*', b)``.
    """
    _check_phi(phi, tables)
    g = tables.group
    ann, sub = tables.annihilator, tables.subgroup
    quot = phi.map_ann_to_quot(ann.elements)
    left = unit_root(-g.residues(ann.elements, quot), g.exponent) / np.sqrt(ann.order)
    chars = phi.map_b_to_bstar(sub.elements)
    right = unit_root(g.residues(chars, sub.elements).T, g.exponent) / np.sqrt(sub.order)
    left_f = FourierFactor(left, phi.d, -1)
    right_f = FourierFactor(right, phi.M, 1)
    dims = (ann.order, sub.order)
    return BlockFourierStage("F_Delta", dims, left_f, right_f, ("B_*", "B"), ("B", "B_*"), swap=True)


def qwht_pipeline(window: Window, phi: IsomorphismPhi, tables: CosetTables | None = None) -> Pipeline:
    tables = tables or phi.subgroup.tables
    _require_window(window, tables)
    stages = [
        stage_pb(tables),
        stage_fb(tables),
        stage_phi(window, tables),
        stage_reinterpret(phi, tables),
        stage_f_delta(phi, tables),
    ]
    return Pipeline("qwht", stages, tables)


def direct_qwht_matrix(window: Window, tables: CosetTables | None = None, literal: bool = False) -> np.ndarray:
    """Row ``(b, b_*)``, column ``a``: ``<g_(b,b_*)|a> = conj(g_(b,b_*)(a))``.

    This is the W-H analysis operator, the linear map the stage pipeline
    computes. ``literal=True`` returns the unconjugated ``g_(b,b_*)(a)``.
    """
    window.require_valid()
    if tables is not None:
        _require_window(window, tables)
    W = window.lattice.translates(window.g)
    return W if literal else np.conj(W)


@dataclass
class EquivalenceReport:
    max_deviation: float
    relabeling: str
    best_relabeling: str
    best_deviation: float
    tol: float
    candidates: dict

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol

    def as_dict(self):
        return {
            "max_deviation": self.max_deviation,
            "relabeling": self.relabeling,
            "best_relabeling": self.best_relabeling,
            "best_deviation": self.best_deviation,
            "tol": self.tol,
            "passed": self.passed,
            "candidates": self.candidates,
        }


def output_relabelings(layout: RegisterLayout) -> dict:
    """Row permutations from alternative consistent labelings of the output.

    Each maps a canonical output index to the index a pipeline using the
    alternative labeling would produce: negation of either register's group
    label (for B*, negation of the character).
    """
    t = layout.tables
    g = t.group
    labels = layout.labels()
    out = {"identity": np.arange(layout.dim)}
    if len(layout.tags) != 2:
        return out

    def negated(tag, coords):
        neg = g.reduce(-coords)
        if tag == "B*":
            return t.t2_pos[g.index(neg)]
        return _position(layout, tag, neg)

    pos = [negated(tag, lab) for tag, lab in zip(layout.tags, labels)]
    base = layout.split(np.arange(layout.dim))
    choices = {"negate-first": (pos[0], base[1]), "negate-second": (base[0], pos[1]), "negate-both": (pos[0], pos[1])}
    for name, (p0, p1) in choices.items():
        out[name] = layout.flat(p0, p1)
    return out


def _position(layout, tag, coords):
    t = layout.tables
    if tag == "T1":
        return t.t1_pos[t.group.index(coords)]
    sub = {"B": t.subgroup, "B_*": t.annihilator, "A": None}[tag]
    if sub is None:
        return t.group.index(coords)
    return sub.position(coords)


def verify_equivalence(pipeline: Pipeline, direct: np.ndarray, tol: float = UNITARY_TOL) -> EquivalenceReport:
    """Compare the composed pipeline with a dense reference.

    The verdict uses the canonical labeling only. Alternative labelings are
    searched and reported but never turn a failure into a pass.
    """
    U = pipeline.matrix()
    if U.shape != direct.shape:
        raise ShapeError(f"pipeline is {U.shape}, reference {direct.shape}")
    canonical = float(np.max(np.abs(U - direct))) if U.size else 0.0
    candidates = {"identity": canonical}
    if canonical > tol:
        for name, perm in output_relabelings(pipeline.out_layout).items():
            if name == "identity":
                continue
            relabeled = np.empty_like(U)
            relabeled[np.arange(len(perm))] = U[perm]
            candidates[name] = float(np.max(np.abs(relabeled - direct)))
    best = min(candidates, key=candidates.get)
    return EquivalenceReport(canonical, "identity", best, candidates[best], tol, candidates)
