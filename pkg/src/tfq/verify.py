"""Property suites over the built-in battery of groups and subgroups.

Each suite returns a list of :class:`Check` records in a fixed order. Random
inputs are drawn from generators seeded by the check name, so reports are
reproducible run to run.
"""

from __future__ import annotations

import itertools
import zlib
from dataclasses import dataclass, field

import numpy as np

from tfq import fft
from tfq.groups import make_phi, parse_group, subgroup_from_divisors, subgroup_from_generators
from tfq.quantum import (
    direct_qwht_matrix,
    direct_qzt_matrix,
    qwht_pipeline,
    qzt_pipeline,
    unitarity_error,
    verify_equivalence,
)
from tfq.transforms import (
    RESTRICTED,
    Signal,
    ZakArray,
    fourier,
    fourier_fast,
    fourier_matrix,
    inverse_zak,
    restrict_to_t,
    zak_direct,
    zak_fast,
)
from tfq.windows import (
    check_window,
    gram_matrix,
    is_orthonormal,
    verify_fgp,
    wh_analyze,
    window_from_phases,
)

BATTERY = ["Z4", "Z6", "Z8", "Z12", "Z2xZ4", "Z2xZ2xZ3", "Z3xZ9"]

GENERATED = {
    "Z4": [[(2,)], [(1,)], [(3,)], []],
    "Z6": [[(2,)], [(3,)], [(4,), (3,)]],
    "Z8": [[(2,)], [(6,)], [(4,)]],
    "Z12": [[(8,)], [(9,)], [(4,), (6,)]],
    "Z2xZ4": [[(1, 2)], [(1, 1)], [(0, 2), (1, 0)]],
    "Z2xZ2xZ3": [[(1, 1, 0)], [(1, 1, 1)], [(1, 0, 0), (0, 1, 1)]],
    "Z3xZ9": [[(1, 3)], [(1, 1)], [(2, 6)]],
}

SUITES = ("fourier", "zak", "window", "fgp", "qzt", "qwht")

TOL_TRANSFORM = 1e-10
TOL_ROUNDTRIP = 1e-12
TOL_WINDOW = 1e-8


@dataclass
class Check:
    suite: str
    name: str
    group: str
    subgroup: str
    deviation: float
    tol: float
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tol)

    def as_dict(self):
        return {
            "suite": self.suite,
            "name": self.name,
            "group": self.group,
            "subgroup": self.subgroup,
            "max_deviation": self.deviation,
            "tol": self.tol,
            "passed": self.passed,
            **({"detail": self.detail} if self.detail else {}),
        }


def rng_for(*key) -> np.random.Generator:
    return np.random.default_rng(zlib.crc32("/".join(map(str, key)).encode()))


def random_signal(group, rng, unit=False) -> Signal:
    v = rng.normal(size=group.order) + 1j * rng.normal(size=group.order)
    if unit:
        v /= np.linalg.norm(v)
    return Signal(group, v)


def aligned_subgroups(group):
    divs = [[d for d in range(1, n + 1) if n % d == 0] for n in group.moduli]
    return [subgroup_from_divisors(group, list(c)) for c in itertools.product(*divs)]


def generated_subgroups(group):
    return [subgroup_from_generators(group, gens) for gens in GENERATED.get(str(group), [])]


def battery(aligned=True, generated=True):
    """``(group, subgroup)`` pairs in a fixed order."""
    for spec in BATTERY:
        group = parse_group(spec)
        if aligned:
            for sub in aligned_subgroups(group):
                yield group, sub
        if generated:
            for sub in generated_subgroups(group):
                yield group, sub


def random_phase_window(sub, rng):
    return window_from_phases(rng.uniform(0, 2 * np.pi, sub.parent.order), sub)


def broken_windows(sub, rng, count, impulses=3):
    """``count`` unit-norm windows violating the modulus criterion, then impulses.

    Zeroed or rescaled Zak tables fail by construction; impulses may or may
    not pass depending on the subgroup and serve as additional cases.
    """
    group = sub.parent
    tables = sub.tables
    scale = np.sqrt(sub.order / group.order)
    out = []
    for k in range(count):
        table = scale * np.exp(1j * rng.uniform(0, 2 * np.pi, tables.shape))
        flat = table.reshape(-1)
        hits = rng.choice(flat.size, size=rng.integers(1, max(2, flat.size // 2)), replace=False)
        if k % 2:
            flat[hits] = 0
        else:
            flat[hits] *= rng.uniform(0.2, 0.8, size=len(hits))
        g = inverse_zak(ZakArray(tables, RESTRICTED, table))
        out.append(Signal(group, g.values / g.norm))
    for a0 in rng.choice(group.order, size=min(impulses, group.order), replace=False):
        out.append(Signal(group, np.eye(group.order)[a0]))
    return out


def suite_fourier(tol=None):
    checks = []
    for spec in BATTERY:
        group = parse_group(spec)
        rng = rng_for("fourier", spec)
        dev = {}
        for backend in fft.available_backends():
            worst = 0.0
            for _ in range(10):
                f = random_signal(group, rng)
                worst = max(worst, float(np.max(np.abs(fourier_fast(f, backend).values - fourier(f).values))))
            dev[backend] = worst
        checks.append(Check("fourier", "fourier_fast == fourier", spec, "-", max(dev.values()), tol or TOL_TRANSFORM, dev))
    return checks


def _zak_pair_checks(group, sub, n_signals, tol):
    key = (str(group), sub.spec)
    rng = rng_for("zak", *key)
    t = sub.tables
    E = group.elements
    # impulse closed form: F(a, a*) = chi_{a*}(a - a0) on a0 + B, else 0
    delta_dev = 0.0
    for a0 in range(group.order):
        F = zak_direct(Signal(group, np.eye(group.order)[a0]), sub).values
        diff = E - E[a0]
        in_coset = sub.position(diff) >= 0
        expected = np.where(in_coset[:, None], group.characters(E, diff).T, 0)
        delta_dev = max(delta_dev, float(np.max(np.abs(F - expected))))

    quasi = round_trip = fast = iso = 0.0
    nb, ns = sub.order, t.annihilator.order
    for _ in range(n_signals):
        f = random_signal(group, rng)
        F = zak_direct(f, sub)
        # F(a + b, a* + b_*) = chi_{a*}(b) F(a, a*)
        for k in rng.choice(nb, size=min(nb, 2), replace=False):
            s = rng.integers(ns)
            b, bs = sub.elements[k], t.annihilator.elements[s]
            lhs = F.values[np.ix_(group.index(E + b), group.index(E + bs))]
            rhs = group.characters(E, b).reshape(1, -1) * F.values
            quasi = max(quasi, float(np.max(np.abs(lhs - rhs))))
        round_trip = max(round_trip, float(np.max(np.abs(inverse_zak(F).values - f.values))))
        Ft = zak_fast(f, sub)
        fast = max(fast, float(np.max(np.abs(Ft.values - restrict_to_t(F).values))))
        iso = max(iso, abs(float(np.sum(np.abs(Ft.values) ** 2)) - nb * f.norm**2))
    checks = [
        Check("zak", "impulse closed form", *key, delta_dev, tol or TOL_ROUNDTRIP),
        Check("zak", "quasi-periodicity", *key, quasi, tol or TOL_TRANSFORM),
        Check("zak", "inverse_zak round trip", *key, round_trip, tol or TOL_ROUNDTRIP),
        Check("zak", "zak_fast == restricted zak_direct", *key, fast, tol or TOL_TRANSFORM),
        Check("zak", "isometry on T", *key, iso, tol or TOL_TRANSFORM),
    ]
    return checks


def suite_zak(tol=None, n_signals=100):
    checks = []
    for group, sub in battery():
        checks.extend(_zak_pair_checks(group, sub, n_signals, tol))
    return checks


def suite_window(tol=None, n_random=50, n_broken=10, n_signals=2):
    checks = []
    crit_tol = tol or TOL_WINDOW
    for group, sub in battery(generated=False):
        key = (str(group), sub.spec)
        rng = rng_for("window", *key)
        disagreements = []
        valid_count = 0
        phase_dev = parseval = 0.0
        cases = [("random-phase", None) for _ in range(n_random)]
        cases += [("broken", g) for g in broken_windows(sub, rng, n_broken)]
        for kind, g in cases:
            if g is None:
                theta = rng.uniform(0, 2 * np.pi, group.order)
                w = window_from_phases(theta, sub, crit_tol)
                G_t = restrict_to_t(w.zak_g).values.reshape(-1)
                target = np.sqrt(sub.order / group.order) * np.exp(1j * theta)
                phase_dev = max(phase_dev, float(np.max(np.abs(G_t - target))))
            else:
                w = check_window(g, sub, crit_tol)
            gram_ok = is_orthonormal(gram_matrix(w), crit_tol)
            if gram_ok != w.valid:
                disagreements.append({"kind": kind, "criterion": w.valid, "gram": gram_ok, "deviation": w.deviation})
            if w.valid:
                valid_count += 1
                for _ in range(n_signals):
                    f = random_signal(group, rng)
                    alpha = wh_analyze(f, w)
                    parseval = max(parseval, abs(float(np.sum(np.abs(alpha.flat) ** 2)) - f.norm**2))
        detail = {"cases": len(cases), "validated": valid_count, "disagreements": disagreements[:5]}
        checks.append(Check("window", "criterion agrees with Gram test", *key, float(len(disagreements)), 0.0, detail))
        checks.append(Check("window", "phase table round trip", *key, phase_dev, tol or TOL_ROUNDTRIP))
        checks.append(Check("window", "Parseval", *key, parseval, tol or TOL_TRANSFORM))
    return checks


def suite_fgp(tol=None, n_pairs=100):
    checks = []
    for group, sub in battery(generated=False):
        key = (str(group), sub.spec)
        rng = rng_for("fgp", *key)
        resid = zak_route = 0.0
        for _ in range(n_pairs):
            w = random_phase_window(sub, rng)
            f = random_signal(group, rng)
            resid = max(resid, verify_fgp(f, w))
            a1, a2 = wh_analyze(f, w), wh_analyze(f, w, method="zak")
            zak_route = max(zak_route, float(np.max(np.abs(a1.alpha - a2.alpha))))
        checks.append(Check("fgp", "F = G P residual", *key, resid, tol or TOL_TRANSFORM))
        checks.append(Check("fgp", "analysis via F/G == direct", *key, zak_route, tol or TOL_TRANSFORM))
    return checks


def suite_qzt(tol=None):
    checks = []
    for group, sub in battery():
        key = (str(group), sub.spec)
        t = sub.tables
        pipe = qzt_pipeline(t)
        report = verify_equivalence(pipe, direct_qzt_matrix(t), tol or TOL_TRANSFORM)
        checks.append(Check("qzt", "pipeline == direct", *key, report.max_deviation, tol or TOL_TRANSFORM,
                            {"relabeling": report.relabeling, "kind": sub.kind}))
        unit = max([unitarity_error(s.matrix()) for s in pipe.stages] + [unitarity_error(pipe.matrix())])
        checks.append(Check("qzt", "unitarity", *key, unit, tol or TOL_TRANSFORM))
        if sub.order == 1:
            dev = float(np.max(np.abs(pipe.matrix() - np.eye(group.order))))
            checks.append(Check("qzt", "B={0} gives identity", *key, dev, tol or TOL_ROUNDTRIP))
        if sub.order == group.order:
            dev = float(np.max(np.abs(pipe.matrix() - fourier_matrix(group))))
            checks.append(Check("qzt", "B=A gives Fourier matrix", *key, dev, tol or TOL_TRANSFORM))
    return checks


def suite_qwht(tol=None, n_windows=10):
    checks = []
    for group, sub in battery(generated=False):
        key = (str(group), sub.spec)
        rng = rng_for("qwht", *key)
        t = sub.tables
        phi = make_phi(group, sub)
        worst = unit = measure = 0.0
        relabelings = set()
        for _ in range(n_windows):
            w = random_phase_window(sub, rng)
            pipe = qwht_pipeline(w, phi, t)
            report = verify_equivalence(pipe, direct_qwht_matrix(w, t), tol or TOL_TRANSFORM)
            worst = max(worst, report.max_deviation)
            relabelings.add(report.relabeling)
            unit = max([unit, unitarity_error(pipe.matrix())] + [unitarity_error(s.matrix()) for s in pipe.stages])
            f = random_signal(group, rng, unit=True)
            probs = np.abs(pipe.apply(f.values)) ** 2
            alpha = wh_analyze(f, w).flat
            measure = max(measure, float(np.max(np.abs(probs - np.abs(alpha) ** 2))))
        checks.append(Check("qwht", "pipeline == direct", *key, worst, tol or TOL_TRANSFORM,
                            {"relabeling": sorted(relabelings), "windows": n_windows}))
        checks.append(Check("qwht", "unitarity", *key, unit, tol or TOL_TRANSFORM))
        checks.append(Check("qwht", "measurement probabilities == |alpha|^2", *key, measure, tol or TOL_TRANSFORM))
        if sub.order == 1:
            const = check_window(Signal(group, np.full(group.order, group.order ** -0.5)), sub)
            U = qwht_pipeline(const, phi, t).matrix()
            dev = float(np.max(np.abs(U - fourier_matrix(group))))
            checks.append(Check("qwht", "constant window gives Fourier matrix", *key, dev, tol or TOL_TRANSFORM))
    return checks


SUITE_FUNCS = {
    "fourier": suite_fourier,
    "zak": suite_zak,
    "window": suite_window,
    "fgp": suite_fgp,
    "qzt": suite_qzt,
    "qwht": suite_qwht,
}


def run_suites(suite="all", tol=None) -> dict:
    names = SUITES if suite == "all" else (suite,)
    checks = []
    for name in names:
        checks.extend(SUITE_FUNCS[name](tol=tol))
    failed = [c for c in checks if not c.passed]
    return {
        "suite": suite,
        "tol_override": tol,
        "fft_backend": fft.BACKEND,
        "passed": not failed,
        "n_checks": len(checks),
        "n_failed": len(failed),
        "checks": [c.as_dict() for c in checks],
    }
