"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured worst-case
deviation; the lines are repeated in the pytest terminal summary. Run alone with
``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""

import timeit

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from tfq import fft
from tfq.groups import make_phi, parse_group
from tfq.quantum import (
    direct_qwht_matrix,
    direct_qzt_matrix,
    qwht_pipeline,
    qzt_pipeline,
    unitarity_error,
    verify_equivalence,
)
from tfq.transforms import (
    Signal,
    fourier,
    fourier_fast,
    fourier_matrix,
    inverse_zak,
    restrict_to_t,
    zak_direct,
    zak_fast,
)
from tfq.verify import (
    BATTERY,
    aligned_subgroups,
    battery,
    broken_windows,
    generated_subgroups,
    random_phase_window,
    random_signal,
    rng_for,
)
from tfq.windows import check_window, gram_matrix, is_orthonormal, verify_fgp, wh_analyze

PAIRS = list(battery())
ALIGNED = list(battery(generated=False))


def _report(number, title, worst, tol, extra="", ok=None):
    ok = bool(worst <= tol) if ok is None else ok
    measured = "" if worst is None else f": worst {worst:.3e} (tol {tol:g})"
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}{measured}{extra}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _max(x):
    return float(np.max(np.abs(x)))


def test_battery_shape():
    # every divisor choice per group, plus at least three generator-built subgroups
    for spec in BATTERY:
        group = parse_group(spec)
        n_divisor_choices = int(np.prod([sum(n % d == 0 for d in range(1, n + 1)) for n in group.moduli]))
        assert len(aligned_subgroups(group)) == n_divisor_choices
        assert len(generated_subgroups(group)) >= 3


def test_c01_qzt_equivalence():
    worst = 0.0
    for group, sub in PAIRS:
        t = sub.tables
        rep = verify_equivalence(qzt_pipeline(t), direct_qzt_matrix(t), 1e-10)
        assert rep.relabeling == "identity"
        worst = max(worst, rep.max_deviation)
    _report(1, "QZT pipeline == direct matrix", worst, 1e-10, f" over {len(PAIRS)} pairs")


def test_c02_unitarity():
    worst = 0.0
    mats = 0
    for group, sub in PAIRS:
        pipes = [qzt_pipeline(sub.tables)]
        if sub.is_aligned:
            rng = rng_for("acceptance-unitary", str(group), sub.spec)
            pipes.append(qwht_pipeline(random_phase_window(sub, rng), make_phi(group, sub), sub.tables))
        for p in pipes:
            for U in [s.matrix() for s in p.stages] + [p.matrix()]:
                worst = max(worst, unitarity_error(U))
                mats += 1
    _report(2, "stage and pipeline unitarity", worst, 1e-10, f" over {mats} matrices")


def test_c03_endpoints():
    ident = fourier_dev = 0.0
    for group, sub in PAIRS:
        if sub.order == 1:
            ident = max(ident, _max(qzt_pipeline(sub.tables).matrix() - np.eye(group.order)))
        if sub.order == group.order:
            fourier_dev = max(fourier_dev, _max(qzt_pipeline(sub.tables).matrix() - fourier_matrix(group)))
    _report(3, "B={0} gives identity", ident, 1e-12)
    _report(3, "B=A gives Fourier matrix", fourier_dev, 1e-10)


def test_c04_impulse_closed_form():
    worst = 0.0
    for group, sub in PAIRS:
        E = group.elements
        n = group.order
        for a0 in range(n):
            F = zak_direct(Signal(group, np.eye(n)[a0]), sub).values
            # value chi_{a*}(a - a0) where a0 - a lies in B, zero elsewhere
            phase = np.exp(2j * np.pi * ((E - E[a0]) / np.array(group.moduli)) @ E.T)
            member = np.isin(group.index(E[a0] - E), group.index(sub.elements))
            worst = max(worst, _max(F - np.where(member[:, None], phase, 0)))
    _report(4, "impulse Zak closed form", worst, 1e-12)


def test_c05_round_trip():
    worst = 0.0
    for group, sub in PAIRS:
        rng = rng_for("acceptance-roundtrip", str(group), sub.spec)
        for _ in range(100):
            f = random_signal(group, rng)
            worst = max(worst, _max(inverse_zak(zak_direct(f, sub)).values - f.values))
    _report(5, "inverse_zak(zak_direct(f)) == f", worst, 1e-12, " (100 signals/pair)")


def test_c06_window_criterion():
    disagreements = cases = valid = 0
    for group, sub in ALIGNED:
        rng = rng_for("acceptance-window", str(group), sub.spec)
        windows = [random_phase_window(sub, rng) for _ in range(50)]
        windows += [check_window(g, sub) for g in broken_windows(sub, rng, 10)]
        for w in windows:
            cases += 1
            valid += w.valid
            disagreements += w.valid != is_orthonormal(gram_matrix(w), 1e-8)
    _report(6, "window criterion agrees with Gram test", float(disagreements), 0.0,
            f" ({disagreements} disagreements in {cases} cases, {valid} orthonormal)")


def test_c07_fgp():
    worst = 0.0
    for group, sub in ALIGNED:
        rng = rng_for("acceptance-fgp", str(group), sub.spec)
        for _ in range(100):
            w = random_phase_window(sub, rng)
            worst = max(worst, verify_fgp(random_signal(group, rng), w))
    _report(7, "F = G P residual", worst, 1e-10, " (100 pairs/pair)")


def test_c08_qwht_equivalence():
    worst = 0.0
    for group, sub in ALIGNED:
        rng = rng_for("acceptance-qwht", str(group), sub.spec)
        phi = make_phi(group, sub)
        for _ in range(10):
            w = random_phase_window(sub, rng)
            rep = verify_equivalence(qwht_pipeline(w, phi, sub.tables), direct_qwht_matrix(w, sub.tables), 1e-10)
            assert rep.relabeling == "identity"
            worst = max(worst, rep.max_deviation)
    _report(8, "QWHT pipeline == direct matrix", worst, 1e-10)

    const_dev = 0.0
    for spec in BATTERY:
        group = parse_group(spec)
        sub = next(s for g, s in ALIGNED if g == group and s.order == 1)
        w = check_window(Signal(group, np.full(group.order, group.order ** -0.5)), sub)
        U = qwht_pipeline(w, make_phi(group, sub), sub.tables).matrix()
        const_dev = max(const_dev, _max(U - fourier_matrix(group)))
    _report(8, "constant window, B={0} gives Fourier matrix", const_dev, 1e-10)


def test_c09_parseval():
    worst = 0.0
    count = 0
    for group, sub in ALIGNED:
        rng = rng_for("acceptance-parseval", str(group), sub.spec)
        for _ in range(10):
            w = random_phase_window(sub, rng)
            assert w.valid
            for method in ("direct", "zak"):
                f = random_signal(group, rng)
                alpha = wh_analyze(f, w, method=method)
                worst = max(worst, abs(float(np.sum(np.abs(alpha.flat) ** 2)) - f.norm ** 2))
                count += 1
    _report(9, "Parseval sum |alpha|^2 == |f|^2", worst, 1e-10, f" over {count} analyses")


def test_c10_fast_paths():
    four = zak = 0.0
    for spec in BATTERY:
        group = parse_group(spec)
        rng = rng_for("acceptance-fourier", spec)
        for _ in range(10):
            f = random_signal(group, rng)
            for backend in fft.available_backends():
                four = max(four, _max(fourier_fast(f, backend).values - fourier(f).values))
    for group, sub in PAIRS:
        rng = rng_for("acceptance-zakfast", str(group), sub.spec)
        for _ in range(5):
            f = random_signal(group, rng)
            for backend in fft.available_backends():
                zak = max(zak, _max(zak_fast(f, sub, backend).values - restrict_to_t(zak_direct(f, sub)).values))
    _report(10, "fourier_fast == fourier", four, 1e-10, f" (backends: {', '.join(fft.available_backends())})")
    _report(10, "zak_fast == restricted zak_direct", zak, 1e-10)

    group = parse_group("Z256")
    f = random_signal(group, np.random.default_rng(256))
    dense = min(timeit.repeat(lambda: fourier(f), number=5, repeat=5))
    fast = min(timeit.repeat(lambda: fourier_fast(f), number=5, repeat=5))
    speedup = dense / fast
    _report(10, "fast Fourier speedup over dense at |A|=256", None, None,
            f": {speedup:.1f}x (need 2x, backend {fft.BACKEND})", ok=speedup >= 2.0)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
