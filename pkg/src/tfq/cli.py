"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 parse error, 3 dimension
mismatch, 4 invalid window, 5 unsupported subgroup.
"""

from __future__ import annotations

import argparse
import sys

from tfq import io
from tfq.errors import DomainError, ParseError, TFQError
from tfq.groups import make_group, make_phi, parse_group, parse_subgroup
from tfq.quantum import (
    NORM_TOL,
    StateVector,
    direct_qwht_matrix,
    direct_qzt_matrix,
    qwht_pipeline,
    qzt_pipeline,
    verify_equivalence,
)
from tfq.transforms import (
    FULL,
    RESTRICTED,
    extend_from_t,
    fourier,
    fourier_fast,
    inverse_zak,
    restrict_to_t,
    zak_direct,
    zak_fast,
)
from tfq.verify import SUITES, run_suites
from tfq.windows import DEFAULT_TOL, wh_analyze, wh_synthesize


def _emit(doc, args):
    text = io.write(doc, getattr(args, "out", None))
    if getattr(args, "out", None) is None:
        sys.stdout.write(text)


def _group_from(args, doc=None):
    """Group from ``--group`` and/or the input document; they must agree."""
    named = parse_group(args.group) if getattr(args, "group", None) else None
    if doc is not None and "group" in doc:
        found = make_group(doc["group"])
        if named is not None and named != found:
            raise DomainError(f"--group {named} but input is on {found}")
        return found
    if named is None:
        raise ParseError("no group given (use --group)")
    return named


def _subgroup_from(args, group, doc=None):
    spec = getattr(args, "subgroup", None) or (doc or {}).get("subgroup")
    if spec is None:
        raise ParseError("no subgroup given (use --subgroup)")
    return parse_subgroup(group, spec)


def _load_window(args):
    doc = io.read(args.window)
    group = _group_from(args, doc)
    sub = parse_subgroup(group, args.subgroup) if args.subgroup else None
    return io.window_from_json(doc, sub, args.tol or DEFAULT_TOL)


def cmd_group_info(args):
    group = parse_group(args.spec)
    report = {
        "group": str(group),
        "moduli": list(group.moduli),
        "order": group.order,
    }
    if args.subgroup:
        sub = parse_subgroup(group, args.subgroup)
        t = sub.tables
        report.update({
            "subgroup": sub.spec,
            "kind": sub.kind,
            "subgroup_order": sub.order,
            "subgroup_elements": sub.elements.tolist(),
            "T1": t.t1.tolist(),
            "T2": t.t2.tolist(),
            "annihilator": t.annihilator.elements.tolist(),
            "bstar_labels": [list(t.bstar_label(j)) for j in range(len(t.t2))],
        })
        if sub.is_aligned:
            phi = make_phi(group, sub)
            report["phi"] = {
                "b_to_bstar": [[b.tolist(), phi.map_b_to_bstar(b).tolist()] for b in sub.elements],
                "quotient_to_annihilator": [[x.tolist(), phi.map_quot_to_ann(x).tolist()] for x in t.t1],
            }
    _emit(report, args)
    return 0


def cmd_transform(args):
    kind = args.kind
    if args.input is None:
        raise ParseError("--in is required")
    doc = io.read(args.input)
    if kind == "fourier":
        f = io.signal_from_json({**doc, "group": list(_group_from(args, doc).moduli)})
        out = fourier_fast(f) if args.fast else fourier(f)
        _emit(io.signal_to_json(out, domain="dual"), args)
        return 0
    if kind == "zak":
        group = _group_from(args, doc)
        f = io.signal_from_json({**doc, "group": list(group.moduli)})
        sub = _subgroup_from(args, group)
        if args.domain == FULL:
            zak = extend_from_t(zak_fast(f, sub)) if args.fast else zak_direct(f, sub)
        else:
            zak = zak_fast(f, sub) if args.fast else restrict_to_t(zak_direct(f, sub))
        _emit(io.zak_to_json(zak), args)
        return 0
    if kind == "izak":
        group = _group_from(args, doc)
        sub = _subgroup_from(args, group, doc)
        zak = io.zak_from_json({**doc, "subgroup": sub.spec})
        _emit(io.signal_to_json(inverse_zak(zak, sub)), args)
        return 0
    if args.window is None:
        raise ParseError(f"{kind} needs --window")
    window = _load_window(args)
    window.require_valid()
    if kind == "wht":
        f = io.signal_from_json(doc)
        if f.group != window.lattice.group:
            raise DomainError(f"signal on {f.group}, window on {window.lattice.group}")
        alpha = wh_analyze(f, window, method="zak" if args.fast else "direct")
        _emit(io.coefficients_to_json(alpha), args)
        return 0
    alpha = io.coefficients_from_json(doc)
    _emit(io.signal_to_json(wh_synthesize(alpha, window)), args)
    return 0


def cmd_window(args):
    if args.action == "make":
        doc = io.read(args.path)
        if doc.get("kind") != "phases":
            raise ParseError("window make expects a phase file (kind: phases)")
        group = _group_from(args, doc)
        sub = parse_subgroup(group, args.subgroup) if args.subgroup else None
        window = io.window_from_json(doc, sub, args.tol or DEFAULT_TOL)
        _emit(io.window_to_json(window), args)
        return 0
    doc = io.read(args.path)
    group = _group_from(args, doc)
    sub = parse_subgroup(group, args.subgroup) if args.subgroup else None
    window = io.window_from_json(doc, sub, args.tol or DEFAULT_TOL)
    report = {
        "group": str(group),
        "subgroup": window.lattice.subgroup.spec,
        "status": window.status,
        "passed": window.valid,
        "target_modulus": window.target_modulus,
        "max_deviation": window.deviation,
        "tol": window.tol,
    }
    _emit(report, args)
    return 0 if window.valid else 4


def cmd_sim(args):
    if args.kind == "qwht":
        if args.window is None:
            raise ParseError("sim qwht needs --window")
        wdoc = io.read(args.window)
        group = _group_from(args, wdoc)
        sub = _subgroup_from(args, group, wdoc)
        phi = make_phi(group, sub)
        window = io.window_from_json(wdoc, sub, args.tol or DEFAULT_TOL)
        window.require_valid()
        pipe = qwht_pipeline(window, phi, sub.tables)
        direct = direct_qwht_matrix(window, sub.tables)
    else:
        doc = io.read(args.input) if args.input else None
        group = _group_from(args, doc)
        sub = _subgroup_from(args, group)
        pipe = qzt_pipeline(sub.tables)
        direct = direct_qzt_matrix(sub.tables)

    if args.state:
        if args.input is None:
            raise ParseError("--state needs --in")
        f = io.signal_from_json(io.read(args.input))
        if f.group != group:
            raise DomainError(f"state on {f.group}, pipeline on {group}")
        if abs(f.norm - 1) > NORM_TOL:
            raise DomainError(f"input state has norm {f.norm:.17g}, expected 1")
        state = pipe.run(StateVector(pipe.in_layout, f.values))
        _emit(io.state_to_json(pipe, state.amplitudes), args)
        return 0
    report = verify_equivalence(pipe, direct)
    _emit(io.pipeline_to_json(pipe, include_matrix=True, report=report), args)
    return 0


def cmd_verify(args):
    report = run_suites(args.suite, tol=args.tol)
    _emit(report, args)
    for c in report["checks"]:
        if not c["passed"]:
            print(f"FAIL {c['suite']}: {c['name']} [{c['group']} {c['subgroup']}] "
                  f"deviation {c['max_deviation']:.3e} > {c['tol']:g}", file=sys.stderr)
    print(f"{report['n_checks'] - report['n_failed']}/{report['n_checks']} checks passed", file=sys.stderr)
    return 0 if report["passed"] else 1


def _common(p, window=False):
    p.add_argument("--group", help="group spec, e.g. Z4 or Z2xZ4")
    p.add_argument("--subgroup", help="subgroup spec, e.g. div:2 or gen:(1,2)")
    p.add_argument("--in", dest="input", help="input JSON file")
    p.add_argument("--out", help="output JSON file (default: stdout)")
    p.add_argument("--tol", type=float, help="tolerance override")
    if window:
        p.add_argument("--window", help="window JSON file")


def build_parser():
    parser = argparse.ArgumentParser(prog="tfq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    grp = sub.add_parser("group", help="group and subgroup tables")
    grp_sub = grp.add_subparsers(dest="action", required=True)
    info = grp_sub.add_parser("info")
    info.add_argument("spec")
    info.add_argument("--subgroup")
    info.add_argument("--out")
    info.set_defaults(func=cmd_group_info)

    for kind in ("fourier", "zak", "izak", "wht", "iwht"):
        p = sub.add_parser(kind, help=f"{kind} transform")
        _common(p, window=kind in ("wht", "iwht"))
        p.add_argument("--fast", action="store_true", help="use the fast path")
        if kind == "zak":
            p.add_argument("--domain", choices=[RESTRICTED, FULL], default=RESTRICTED)
        p.set_defaults(func=cmd_transform, kind=kind)

    win = sub.add_parser("window", help="window tools")
    win.add_argument("action", choices=["check", "make"])
    win.add_argument("path")
    win.add_argument("--group")
    win.add_argument("--subgroup")
    win.add_argument("--out")
    win.add_argument("--tol", type=float)
    win.set_defaults(func=cmd_window)

    sim = sub.add_parser("sim", help="simulate the QZT or QWHT")
    sim.add_argument("kind", choices=["qzt", "qwht"])
    _common(sim, window=True)
    mode = sim.add_mutually_exclusive_group()
    mode.add_argument("--state", action="store_true", help="apply to the --in signal")
    mode.add_argument("--matrix", action="store_true", help="dump stage and composed matrices (default)")
    sim.set_defaults(func=cmd_sim)

    ver = sub.add_parser("verify", help="run the verification suites")
    ver.add_argument("--suite", choices=("all",) + SUITES, default="all")
    ver.add_argument("--tol", type=float)
    ver.add_argument("--out")
    ver.add_argument("--fast", action="store_true", help="accepted for symmetry; fast and dense paths are always both checked")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TFQError as exc:
        print(f"tfq: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except KeyError as exc:
        print(f"tfq: error: input document is missing field {exc}", file=sys.stderr)
        return ParseError.exit_code


if __name__ == "__main__":
    sys.exit(main())
