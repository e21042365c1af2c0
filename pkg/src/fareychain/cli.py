"""Command-line front end: tables, sweeps and verification reports.

Subcommands mirror the library modules; all tabular output is CSV or
JSON-lines with a metadata header (tool version, echoed arguments,
arithmetic mode) so that runs are self-describing.  Outputs are
deterministic for a fixed argument list: exact-mode tables are
byte-identical across runs, float sweeps fix the reduction order.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import __version__, coding, spinchain, thermo, transfer, twisted, verify
from . import tree as treemod
from .rings import Params
from .words import SpinWord, all_words


def _params(args) -> Params:
    mode = getattr(args, "mode", "float")
    r = getattr(args, "r", None)
    if mode == "symbolic":
        return Params.symbolic()
    if r is None:
        raise SystemExit("error: --r is required in numeric modes")
    if mode == "exact":
        return Params.exact(Fraction(r))
    return Params.floating(float(Fraction(r)))


def parse_values(spec: str) -> List[float]:
    """Parse '0.5', '0.5,1,2' or 'start:stop:step' (stop inclusive)."""
    if ":" in spec:
        start, stop, step = (float(x) for x in spec.split(":"))
        n = int(round((stop - start) / step))
        return [start + i * step for i in range(n + 1)]
    return [float(x) for x in spec.split(",")]


@contextmanager
def _open_out(path: Optional[str]):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _meta(args, mode: str) -> Dict[str, str]:
    echo = " ".join(
        f"--{k.replace('_', '-')}={v}"
        for k, v in sorted(vars(args).items())
        if k not in ("func", "out") and v is not None
    )
    return {"tool": f"fareychain {__version__}", "args": echo, "mode": mode}


def emit(records: Iterable[Dict], fieldnames: Sequence[str], args) -> None:
    mode = getattr(args, "mode", "float")
    fmt = getattr(args, "format", "csv")
    meta = _meta(args, mode)
    with _open_out(getattr(args, "out", None)) as fh:
        if fmt == "csv":
            for key, val in meta.items():
                fh.write(f"# {key}: {val}\n")
            writer = csv.DictWriter(fh, fieldnames=fieldnames)
            writer.writeheader()
            for rec in records:
                writer.writerow(rec)
        else:
            fh.write(json.dumps({"meta": meta}) + "\n")
            for rec in records:
                fh.write(json.dumps(rec) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_tree(args) -> int:
    p = _params(args)
    records: List[Dict] = []
    for n in range(1, args.rows + 1):
        row = treemod.extended_row(n, p) if args.extended else treemod.build_row(n, p)
        records.extend(treemod.node_records(row))
    if args.adjacency:
        with _open_out(args.out) as fh:
            fh.write(json.dumps(treemod.tree_adjacency(args.rows, p), indent=1) + "\n")
        return 0
    emit(records, ["level", "sigma", "p", "q", "value"], args)
    return 0


def cmd_code(args) -> int:
    p = _params(args)
    xs = parse_values(args.x)
    records = []
    for x in xs:
        code = coding.encode_point(x, p, args.depth)
        records.append({"x": repr(x), "code": "".join(map(str, code.bits))})
    emit(records, ["x", "code"], args)
    return 0


def cmd_conjugacy(args) -> int:
    p = _params(args)
    records = []
    for i in range(args.grid + 1):
        x = i / args.grid
        records.append({"x": repr(x), "h": repr(coding.conjugacy_h(x, p, args.depth)), "depth": args.depth})
    emit(records, ["x", "h", "depth"], args)
    return 0


def cmd_spin(args) -> int:
    p = _params(args)
    k = args.k
    records = []
    if args.table == "q":
        table = spinchain.pq_tables(k, p)
        for w in all_words(k):
            records.append({"t": "".join(map(str, w.to_bits())), "value": str(table.q[w.index])})
    elif args.table == "qhat":
        table = spinchain.pq_tables(k, p.as_float() if p.mode == "float" else p)
        vals = spinchain.fourier_transform(
            np.asarray(table.q, dtype=float) if p.mode == "float" else list(table.q), k
        )
        for w in all_words(k):
            records.append({"t": "".join(map(str, w.to_bits())), "value": str(vals[w.index])})
    else:  # interaction
        q_hat = spinchain.interaction_coefficients(k, p)
        worst = spinchain.ferromagnetic_violation(k, p)
        for w in all_words(k):
            records.append({"t": "".join(map(str, w.to_bits())), "value": repr(float(-q_hat[w.index]))})
        print(f"# ferromagnetic check: max Q^(t), t != 0 is {worst:.3e} (needs <= 1e-12)", file=sys.stderr)
    emit(records, ["t", "value"], args)
    return 0


def _json_records(args, rows: List[Dict]) -> int:
    args.format = "jsonl"
    emit(rows, [], args)
    return 0


def cmd_trace(args) -> int:
    rows = []
    for n in range(1, args.n + 1):
        q = transfer.TransferQuery(args.s, args.r, n)
        val = transfer.trace_power(q, signed=args.signed)
        rows.append(
            {"r": args.r, "s": args.s, "n": n, "value": [val.real, val.imag],
             "method": "leaf trace pairs" + (" (signed)" if args.signed else ""),
             "error_estimate": 1e-13 * abs(val)}
        )
    return _json_records(args, rows)


def cmd_xi(args) -> int:
    rows = []
    for n in range(1, args.n + 1):
        q = transfer.TransferQuery(args.s, args.r, n)
        val = transfer.periodic_sum_xi(q)
        rows.append({"r": args.r, "s": args.s, "n": n, "value": [val.real, val.imag],
                     "method": "closed leaf sum", "error_estimate": 1e-13 * abs(val)})
    return _json_records(args, rows)


def cmd_zeta(args) -> int:
    if args.m is not None:
        records = []
        for q in range(1, args.qmax + 1):
            records.append({"q": q, "mu_m": twisted.mu_twisted(args.m, q)})
        emit(records, ["q", "mu_m"], args)
        return 0
    fz = transfer.fredholm_and_zeta(complex(args.z), args.s, args.r, N=args.N)
    rows = [{
        "r": args.r, "s": args.s, "z": args.z, "n": args.N,
        "det": [fz.det.real, fz.det.imag],
        "zeta_orbit_sum": [fz.zeta_exp.real, fz.zeta_exp.imag],
        "zeta_det_ratio": [fz.zeta_ratio.real, fz.zeta_ratio.imag],
        "method": "trace power series + orbit sums",
        "error_estimate": fz.tail_estimate,
        "converged": fz.converged,
    }]
    return _json_records(args, rows)


def cmd_lambda(args) -> int:
    res = transfer.spectral_radius(args.s, args.r, tol=args.tol)
    rows = [{"r": args.r, "s": args.s, "n": res.iterations, "value": res.value,
             "method": res.method, "error_estimate": res.error}]
    return _json_records(args, rows)


def cmd_thermo(args) -> int:
    s_values = parse_values(args.s)
    points = []

    def work(s: float):
        out = []
        for n in range(2, args.n + 1):
            out.append(thermo.thermo_point(args.r, s, n))
        return out

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            for chunk in pool.map(work, s_values):
                points.extend(chunk)
    else:
        for s in s_values:
            points.extend(work(s))
    records = [
        {"r": pt.r, "s": pt.s, "n": pt.n, "ZC": repr(pt.ZC), "Fn": repr(pt.Fn), "Mn": repr(pt.Mn)}
        for pt in points
    ]
    emit(records, ["r", "s", "n", "ZC", "Fn", "Mn"], args)
    return 0


def cmd_phase(args) -> int:
    r_values = parse_values(args.r_grid)

    def work(r: float) -> thermo.CriticalPoint:
        return thermo.critical_line(Params.floating(r), tol=args.tol)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            pts = list(pool.map(work, r_values))
    else:
        pts = [work(r) for r in r_values]
    records = [
        {"r": pt.r, "s_cr": repr(pt.s_cr), "error": repr(pt.error), "method": pt.method}
        for pt in pts
    ]
    emit(records, ["r", "s_cr", "error", "method"], args)
    return 0


def cmd_twisted(args) -> int:
    rows = []
    for n in range(1, args.n + 1):
        val = twisted.twisted_Z(n, args.s, args.m, Params.floating(args.r))
        rows.append({"r": args.r, "s": args.s, "m": args.m, "n": n,
                     "value": [val.real, val.imag], "method": "tree-row sum",
                     "error_estimate": 1e-13 * abs(val)})
    return _json_records(args, rows)


def cmd_verify(args) -> int:
    results = verify.run_suite(args.suite, seed=args.seed)
    width = max(len(c.name) for c in results)
    failures = 0
    for c in results:
        status = "pass" if c.passed else "FAIL"
        print(f"[{status}] {c.suite:<9} {c.name:<{width}}  residual {c.residual:.3e}  tol {c.tol:.1e}")
        failures += 0 if c.passed else 1
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------


def _add_common(sp, *, mode=True, fmt=True):
    if mode:
        sp.add_argument("--mode", choices=("float", "exact", "symbolic"), default="float")
    if fmt:
        sp.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fareychain",
        description="Generalized Farey trees, transfer operators and spin-chain thermodynamics.",
    )
    ap.add_argument("--version", action="version", version=f"fareychain {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("tree", help="emit tree rows (or the extended tree)")
    sp.add_argument("--rows", "--n", dest="rows", type=int, required=True)
    sp.add_argument("--r", default=None)
    sp.add_argument("--extended", action="store_true")
    sp.add_argument("--adjacency", action="store_true", help="emit rooted-tree JSON instead of rows")
    _add_common(sp)
    sp.set_defaults(func=cmd_tree)

    sp = sub.add_parser("code", help="edge-label codes of points")
    sp.add_argument("--r", required=True)
    sp.add_argument("--x", required=True, help="comma list or start:stop:step")
    sp.add_argument("--depth", type=int, default=32)
    _add_common(sp)
    sp.set_defaults(func=cmd_code)

    sp = sub.add_parser("conjugacy", help="(x, h_r(x)) table of the conjugacy to the tent map")
    sp.add_argument("--r", required=True)
    sp.add_argument("--depth", type=int, default=40)
    sp.add_argument("--grid", type=int, default=256)
    _add_common(sp)
    sp.set_defaults(func=cmd_conjugacy)

    sp = sub.add_parser("spin", help="spin-chain tables: q, its Fourier transform, interactions")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--r", default=None)
    sp.add_argument("--table", choices=("q", "qhat", "interaction"), default="q")
    _add_common(sp)
    sp.set_defaults(func=cmd_spin)

    for name, fn, extra in (
        ("trace", cmd_trace, ("signed",)),
        ("xi", cmd_xi, ()),
    ):
        sp = sub.add_parser(name, help=f"transfer-operator {name} values up to n")
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--s", type=float, required=True)
        sp.add_argument("--r", type=float, required=True)
        if "signed" in extra:
            sp.add_argument("--signed", action="store_true")
        _add_common(sp, mode=False, fmt=False)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("zeta", help="dynamical zeta/determinant, or mu^(m) tables with --m")
    sp.add_argument("--m", type=int, default=None, help="emit the twisted Moebius table instead")
    sp.add_argument("--qmax", type=int, default=100)
    sp.add_argument("--z", type=float, default=0.5)
    sp.add_argument("--s", type=float, default=1.0)
    sp.add_argument("--r", type=float, default=0.5)
    sp.add_argument("--N", type=int, default=14)
    _add_common(sp)
    sp.set_defaults(func=cmd_zeta)

    sp = sub.add_parser("lambda", help="spectral radius of the transfer operator")
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    _add_common(sp, mode=False, fmt=False)
    sp.set_defaults(func=cmd_lambda)

    sp = sub.add_parser("thermo", help="Z^C, F_n, M_n sweep")
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--s", required=True, help="value, comma list, or start:stop:step")
    sp.add_argument("--n", type=int, required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_thermo)

    sp = sub.add_parser("phase", help="critical curve (r, s_cr)")
    sp.add_argument("--r-grid", dest="r_grid", required=True, help="start:stop:step")
    sp.add_argument("--tol", type=float, default=1e-4)
    _add_common(sp)
    sp.set_defaults(func=cmd_phase)

    sp = sub.add_parser("twisted", help="character-twisted partition sums Z_n^(m)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--r", type=float, required=True)
    _add_common(sp, mode=False, fmt=False)
    sp.set_defaults(func=cmd_twisted)

    sp = sub.add_parser("verify", help="run an invariant suite and report residuals")
    sp.add_argument("suite", choices=("tree", "spin", "transfer", "thermo", "zeta", "all"))
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)

    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
