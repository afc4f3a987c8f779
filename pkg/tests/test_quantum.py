import numpy as np
import pytest

import oracles
from tfq.errors import DomainError, InvalidWindowError, ShapeError, UnsupportedIsomorphismError
from tfq.groups import make_group, make_phi, parse_group, subgroup_from_divisors, subgroup_from_generators
from tfq.quantum import (
    BlockFourierStage,
    FourierFactor,
    Pipeline,
    PermutationStage,
    RegisterLayout,
    StateVector,
    bstar_formulation_matrix,
    direct_qwht_matrix,
    direct_qzt_matrix,
    output_relabelings,
    qwht_pipeline,
    qzt_pipeline,
    stage_f_delta,
    stage_fb,
    stage_pb,
    stage_phi,
    stage_reinterpret,
    unitarity_error,
    verify_equivalence,
)
from tfq.transforms import Signal, fourier_matrix
from tfq.verify import BATTERY, aligned_subgroups, generated_subgroups
from tfq.windows import check_window, window_from_phases, window_from_rational_phases

H = 2 ** -0.5
Z4 = make_group([4])
B2 = subgroup_from_divisors(Z4, [2])
TRIV = subgroup_from_divisors(Z4, [4])
RECT = check_window(Signal(Z4, [H, H, 0, 0]), B2)

PAIRS = [(parse_group(s), B) for s in BATTERY for B in aligned_subgroups(parse_group(s)) + generated_subgroups(parse_group(s))]
PAIR_IDS = [f"{G}-{B.spec}" for G, B in PAIRS]
ALIGNED = [(G, B) for G, B in PAIRS if B.is_aligned]
ALIGNED_IDS = [f"{G}-{B.spec}" for G, B in ALIGNED]


def random_window(B, seed):
    return window_from_phases(np.random.default_rng(seed).uniform(0, 2 * np.pi, B.parent.order), B)


# --- QZT stages ------------------------------------------------------------------

def test_stage_pb_examples():
    st = stage_pb(B2.tables)
    # a = 3 -> (x = 1, b = 2): T1 position 1, B position 1
    assert st.perm[3] == 1 * 2 + 1
    assert np.array_equal(stage_pb(TRIV.tables).perm, np.arange(4))
    U = st.matrix()
    assert np.array_equal(U.sum(axis=0), np.ones(4)) and np.array_equal(U.sum(axis=1), np.ones(4))


def test_stage_fb_examples():
    assert np.allclose(stage_fb(TRIV.tables).matrix(), np.eye(4))
    U = stage_fb(B2.tables).matrix()
    block = H * np.array([[1, 1], [1, -1]])
    assert np.allclose(U, np.kron(np.eye(2), block), atol=1e-15)


def test_qzt_examples():
    pipe = qzt_pipeline(B2.tables)
    out = pipe.apply(np.eye(4)[3])
    # registers (T1, B*): index 2 is (1, 0), index 3 is (1, 1)
    assert np.allclose(out, [0, 0, H, -H], atol=1e-15)
    assert np.allclose(direct_qzt_matrix(B2.tables)[:, 0], [H, H, 0, 0], atol=1e-15)
    assert np.array_equal(qzt_pipeline(TRIV.tables).matrix(), np.eye(4))
    full = subgroup_from_divisors(Z4, [1])
    assert np.max(np.abs(qzt_pipeline(full.tables).matrix() - fourier_matrix(Z4))) < 1e-15


@pytest.mark.parametrize("G, B", PAIRS, ids=PAIR_IDS)
def test_qzt_matches_zak_oracle(G, B):
    # QZT |f> holds Z(B)f / sqrt|B| on T1 x T2
    t = B.tables
    f = np.random.default_rng(G.order + B.order).normal(size=G.order) + 0j
    F = np.array(oracles.zak(G.moduli, list(f), [tuple(b) for b in B.elements]))
    expected = F[np.ix_(G.index(t.t1), G.index(t.t2))].reshape(-1) / np.sqrt(B.order)
    assert np.max(np.abs(direct_qzt_matrix(t) @ f - expected)) < 1e-10
    pipe = qzt_pipeline(t)
    assert np.max(np.abs(pipe.apply(f) - expected)) < 1e-10
    assert np.max(np.abs(pipe.matrix() - direct_qzt_matrix(t))) < 1e-10
    for stage in pipe.stages:
        assert np.max(np.abs(stage.apply(np.eye(G.order)) - stage.matrix())) < 1e-12


@pytest.mark.parametrize("G, B", PAIRS, ids=PAIR_IDS)
def test_bstar_formulation(G, B):
    t = B.tables
    U, labels, restriction = bstar_formulation_matrix(t)
    assert len(labels) == B.order and sorted(restriction.tolist()) == list(range(B.order))
    assert unitarity_error(U) < 1e-10
    # relabel rows (x, b*) -> (x, j) through the restriction map
    nb = B.order
    perm = np.array([i * nb + restriction[j] for i in range(len(t.t1)) for j in range(nb)])
    assert np.max(np.abs(U[perm] - direct_qzt_matrix(t))) < 1e-10


def test_wrong_kernel_sign_is_caught():
    G = make_group([3, 9])
    t = subgroup_from_divisors(G, [1, 3]).tables
    rep = verify_equivalence(qzt_pipeline(t, kernel_sign=-1), direct_qzt_matrix(t))
    assert not rep.passed and rep.max_deviation > 0.1
    assert rep.relabeling == "identity"
    # conjugated characters are the negated B* labels, so a relabeled search finds them
    assert rep.best_relabeling == "negate-second" and rep.best_deviation < 1e-10


def test_identical_matrices_report_zero():
    t = B2.tables
    rep = verify_equivalence(qzt_pipeline(t), qzt_pipeline(t).matrix())
    assert rep.max_deviation == 0 and rep.passed and rep.candidates == {"identity": 0.0}
    with pytest.raises(ShapeError):
        verify_equivalence(qzt_pipeline(t), np.eye(3))


def test_output_relabelings_are_permutations():
    layout = RegisterLayout(B2.tables, ("T1", "B*"))
    for perm in output_relabelings(layout).values():
        assert sorted(perm.tolist()) == list(range(4))


# --- QWHT stages ---------------------------------------------------------------------

def test_stage_phi_examples():
    const = check_window(Signal(Z4, [0.5] * 4), TRIV)
    assert np.allclose(stage_phi(const, TRIV.tables).matrix(), np.eye(4))
    assert np.allclose(stage_phi(RECT, B2.tables).matrix(), np.eye(4))
    w = window_from_rational_phases([[1, 4], [0, 1], [0, 1], [0, 1]], B2)
    diag = np.diag(stage_phi(w, B2.tables).matrix())
    assert diag[0] == pytest.approx(-1j) and np.allclose(diag[1:], 1)
    bad = check_window(Signal(Z4, [1, 0, 0, 0]), B2)
    with pytest.raises(InvalidWindowError):
        stage_phi(bad, B2.tables)
    with pytest.raises(DomainError):
        stage_phi(RECT, TRIV.tables)


def test_stage_phi_removes_window_phase():
    # P(B) and F_B map g to exp(i theta) / sqrt|A| on T; Phi then removes the phase
    G = make_group([2, 4])
    B = subgroup_from_divisors(G, [1, 2])
    w = random_window(B, 3)
    pipe = qwht_pipeline(w, make_phi(G, B))
    v = w.g.values
    for stage in pipe.stages[:3]:
        v = stage.apply(v)
    assert np.allclose(v, np.full(G.order, 1 / np.sqrt(G.order)), atol=1e-12)


def test_stage_reinterpret_examples():
    phi = make_phi(Z4, B2)
    st = stage_reinterpret(phi, B2.tables)
    # input (T1 pos 1, T2 pos 0) -> (B_* element (2), B element (0))
    assert st.perm[2] == 1 * 2 + 0
    assert st.perm[0] == 0
    U = st.matrix()
    assert set(np.unique(U)) <= {0, 1} and unitarity_error(U) == 0


@pytest.mark.parametrize("G, B", ALIGNED, ids=ALIGNED_IDS)
def test_f_delta_stage(G, B):
    t = B.tables
    st = stage_f_delta(make_phi(G, B), t)
    assert st.dim == t.annihilator.order * B.order == G.order
    assert unitarity_error(st.matrix()) < 1e-10
    assert np.max(np.abs(st.apply(np.eye(G.order)) - st.matrix())) < 1e-12


def test_f_delta_trivial_subgroup_is_fourier():
    st = stage_f_delta(make_phi(Z4, TRIV), TRIV.tables)
    # B trivial, B_* = A*: only the conjugated-kernel factor on A* = A remains
    assert np.allclose(st.matrix(), fourier_matrix(Z4), atol=1e-15)


def test_qwht_examples():
    const = check_window(Signal(Z4, [0.5] * 4), TRIV)
    U = qwht_pipeline(const, make_phi(Z4, TRIV)).matrix()
    assert np.max(np.abs(U - fourier_matrix(Z4))) < 1e-15
    out = qwht_pipeline(RECT, make_phi(Z4, B2)).apply(np.eye(4)[0])
    # output order (b, b_*): (0,0), (0,2), (2,0), (2,2)
    assert np.allclose(out, [H, H, 0, 0], atol=1e-15)


@pytest.mark.parametrize("G, B", ALIGNED, ids=ALIGNED_IDS)
def test_qwht_matches_inner_product_oracle(G, B):
    w = random_window(B, G.order * 11 + B.order)
    pipe = qwht_pipeline(w, make_phi(G, B))
    f = np.random.default_rng(1).normal(size=G.order) + 1j * np.random.default_rng(2).normal(size=G.order)
    b, s = w.lattice.points()
    g = list(w.g.values)
    ref = [oracles.inner(oracles.translate(G.moduli, g, tuple(bb), tuple(ss)), list(f)) for bb, ss in zip(b, s)]
    assert np.max(np.abs(pipe.apply(f) - ref)) < 1e-10
    D = direct_qwht_matrix(w)
    assert np.max(np.abs(D @ D.conj().T - np.eye(G.order))) < 1e-10
    assert verify_equivalence(pipe, D).passed


def test_literal_matrix_differs_for_complex_windows():
    G = make_group([2, 4])
    B = subgroup_from_divisors(G, [1, 2])
    w = random_window(B, 6)
    pipe = qwht_pipeline(w, make_phi(G, B))
    literal = direct_qwht_matrix(w, literal=True)
    assert np.max(np.abs(pipe.matrix() - literal)) > 0.1
    assert np.max(np.abs(pipe.matrix() - literal.conj())) < 1e-12
    # constant window: literal entry ((0, b_*), a) = chi_{b_*}(a) / sqrt|A|
    const = check_window(Signal(Z4, [0.5] * 4), TRIV)
    lit = direct_qwht_matrix(const, literal=True)
    assert np.allclose(lit, Z4.characters(Z4.elements, Z4.elements) / 2)


def test_qwht_rejects_generated_subgroup():
    with pytest.raises(UnsupportedIsomorphismError):
        make_phi(Z4, subgroup_from_generators(Z4, [(2,)]))


# --- state vectors and pipelines ----------------------------------------------------

def test_state_vector_norm_checks():
    layout = RegisterLayout(B2.tables, ("A",))
    StateVector(layout, [1, 0, 0, 0])
    with pytest.raises(ValueError):
        StateVector(layout, [1, 1, 0, 0])
    with pytest.raises(ShapeError):
        StateVector(layout, [1, 0, 0])
    with pytest.raises(ShapeError):
        RegisterLayout(B2.tables, ("A", "B"))


def test_run_tracks_layouts_and_probabilities():
    G = make_group([3, 9])
    B = subgroup_from_divisors(G, [3, 3])
    w = random_window(B, 8)
    pipe = qwht_pipeline(w, make_phi(G, B))
    f = np.random.default_rng(0).normal(size=G.order) + 0j
    f /= np.linalg.norm(f)
    out = pipe.run(StateVector(pipe.in_layout, f))
    assert out.layout.tags == ("B", "B_*")
    p = out.probabilities()
    assert abs(p.sum() - 1) < 1e-12
    b_lab, s_lab = out.layout.labels()
    assert np.array_equal(b_lab, w.lattice.points()[0]) and np.array_equal(s_lab, w.lattice.points()[1])
    with pytest.raises(DomainError):
        pipe.run(StateVector(RegisterLayout(B.tables, ("T1", "B")), f))


def test_pipeline_checks_tag_chain():
    t = B2.tables
    with pytest.raises(DomainError):
        Pipeline("bad", [stage_fb(t), stage_pb(t)], t)


def test_pipeline_matrix_is_product_of_stages():
    w = random_window(B2, 1)
    pipe = qwht_pipeline(w, make_phi(Z4, B2))
    U = np.eye(4)
    for stage in pipe.stages:
        U = stage.matrix() @ U
    assert np.allclose(pipe.matrix(), U)


def test_permutation_stage_validates():
    with pytest.raises(ValueError):
        PermutationStage("bad", [0, 0, 1], ("A",), ("A",))


def test_block_fourier_fft_and_dense_paths_agree():
    n = 6
    k = np.arange(n)
    dense = np.exp(2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)
    fast = BlockFourierStage("x", (2, n), None, FourierFactor(dense, [n], 1), ("T1", "B"), ("T1", "B*"))
    slow = BlockFourierStage("x", (2, n), None, FourierFactor(dense), ("T1", "B"), ("T1", "B*"))
    assert np.max(np.abs(fast.apply(np.eye(12)) - slow.apply(np.eye(12)))) < 1e-12
    assert np.max(np.abs(fast.matrix() - slow.apply(np.eye(12)))) < 1e-12
