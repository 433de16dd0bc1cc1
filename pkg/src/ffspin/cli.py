"""Command-line interface.

Exit codes: 0 success, 1 frustrated when the caller expected otherwise,
2 input error, 3 oracle verification mismatch.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import generators as gen
from . import io
from .config import max_oracle_spins
from .entanglement import (default_exponent, entanglement_report, lattice_constants,
                           LatticeConstants, rank3_cascade_classify)
from .errors import FFSpinError
from .groundspace import GroundSpace, ProductBasis, expectation_ground_manifold
from .hamiltonian import Hamiltonian, validate
from .oracle import ground_expectation, incremental_kernel, oracle, schmidt_rank_across
from .percolation import monte_carlo_scaling, theta_curve
from .reduction import reduce_to_complete
from .variational import PerturbedProblem, variational_energy

OK, UNEXPECTED, INPUT_ERROR, MISMATCH = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load(path, normalize=True) -> Hamiltonian:
    try:
        return io.load_hamiltonian(path, normalize)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _emit(obj, out):
    text = json.dumps(obj, indent=2, default=str)
    if out:
        Path(out).write_text(text)
    else:
        print(text)


def _can_verify(h: Hamiltonian) -> bool:
    if h.n > max_oracle_spins():
        print(f"verify: skipped ({h.n} spins exceeds the oracle cap)", file=sys.stderr)
        return False
    return True


def _verdict_line(h, res, space) -> str:
    if res.frustrated:
        if rank3_cascade_classify(h).kind == "Frustrated":
            return "FRUSTRATED (rank-3 cascade)"
        return f"FRUSTRATED ({res.reason} at {list(res.location)})"
    return f"UNFRUSTRATED, dim ker = {space.dim}"


# ---------------------------------------------------------------- subcommands

def cmd_check(args) -> int:
    h = _load(args.model)
    rep = validate(h)
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if not rep.valid:
        raise InputError("; ".join(rep.errors))
    res = reduce_to_complete(h)
    space = None if res.frustrated else GroundSpace.from_result(res)
    print(_verdict_line(h, res, space))
    if args.trace:
        _emit(io.result_to_dict(res), args.trace)
    code = OK
    if args.verify and _can_verify(h):
        o = oracle(h)
        same = o.frustration_free == (not res.frustrated)
        if same and space is not None:
            same = o.kernel_dim == space.dim
        print(f"verify: oracle E0 = {o.energy:.3e}, dim ker = {o.kernel_dim}, {'agree' if same else 'MISMATCH'}")
        if not same:
            return MISMATCH
    if args.expect == "unfrustrated" and res.frustrated:
        code = UNEXPECTED
    if args.expect == "frustrated" and not res.frustrated:
        code = UNEXPECTED
    return code


def cmd_reduce(args) -> int:
    h = _load(args.model)
    res = reduce_to_complete(h)
    _emit(io.result_to_dict(res), args.output)
    if args.verify and _can_verify(h):
        o = oracle(h)
        if o.frustration_free != (not res.frustrated):
            print("verify: MISMATCH", file=sys.stderr)
            return MISMATCH
    return UNEXPECTED if (res.frustrated and args.expect_unfrustrated) else OK


def _component_export(c) -> dict:
    d = {"vertices": list(c.vertices), "dim": c.dim, "kind": type(c).__name__}
    if isinstance(c, ProductBasis):
        d["seeds"] = [io.encode_matrix(s) for s in c.seeds]
        d["gauge"] = {str(v): io.encode_matrix(c.gauge.operators[v]) for v in c.vertices}
    return d


def cmd_ground(args) -> int:
    h = _load(args.model)
    res = reduce_to_complete(h)
    if res.frustrated:
        print(f"FRUSTRATED ({res.reason})", file=sys.stderr)
        return UNEXPECTED
    space = GroundSpace.from_result(res)
    out = {"dim_ker": space.dim, "n_c": res.n_c, "components": [_component_export(c) for c in space.components]}
    if args.vectors:
        b = space.ground_basis()
        out["basis"] = [io.encode_matrix(b[:, k]) for k in range(b.shape[1])]
    _emit(out, args.output)
    if args.verify and _can_verify(h):
        o = oracle(h)
        if o.kernel_dim != space.dim:
            print(f"verify: MISMATCH oracle dim ker = {o.kernel_dim}", file=sys.stderr)
            return MISMATCH
    return OK


def cmd_expect(args) -> int:
    h = _load(args.model)
    try:
        om = io.load_observable(args.observable)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise InputError(f"cannot read {args.observable}: {exc}") from exc
    res = reduce_to_complete(h)
    if res.frustrated:
        print(f"FRUSTRATED ({res.reason})", file=sys.stderr)
        return UNEXPECTED
    val = expectation_ground_manifold(res, om, max_support=args.max_support)
    print(json.dumps({"expectation": val}))
    if args.verify and _can_verify(h):
        ref = ground_expectation(h, om.support, om.matrix)
        if abs(ref - val) > 1e-8:
            print(f"verify: MISMATCH oracle {ref:.12g}", file=sys.stderr)
            return MISMATCH
    return OK


def _rect_region(spec: str, cols: int) -> list:
    r0, c0, r1, c1 = (int(x) for x in spec.split(","))
    return [r * cols + c for r in range(r0, r1) for c in range(c0, c1)]


def cmd_entangle(args) -> int:
    h = _load(args.model)
    if args.region:
        try:
            region = io.load_region(args.region)
        except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
            raise InputError(f"cannot read {args.region}: {exc}") from exc
    elif args.rect:
        if not args.grid:
            raise InputError("--rect needs --grid ROWS,COLS")
        region = _rect_region(args.rect, int(args.grid.split(",")[1]))
    else:
        raise InputError("give --region or --rect")
    consts = None
    if args.K is not None:
        consts = LatticeConstants(args.c if args.c is not None else 1.0, args.K, "user supplied")
    elif args.auto_constants:
        c = args.c if args.c is not None else default_exponent(2 if args.grid else 1)
        consts = lattice_constants(h.graph(), c)
    rep = entanglement_report(h, region, consts)
    print(rep.table(), file=sys.stderr)
    _emit(json.loads(rep.to_json()), args.output)
    if args.verify and _can_verify(h):
        q = incremental_kernel(h)
        idx = [h.vertices.index(v) for v in region]
        worst = max((np.log2(schmidt_rank_across(q[:, k], idx, h.n)) for k in range(q.shape[1])), default=0.0)
        if worst > rep.schmidt_bound + 1e-9:
            print(f"verify: MISMATCH log2 Schmidt rank {worst:.3f} > bound", file=sys.stderr)
            return MISMATCH
    return OK


def cmd_percolate(args) -> int:
    sizes = [int(x) for x in args.L.split(",")]
    rep = monte_carlo_scaling(args.d, args.p, sizes, args.trials, args.seed, args.periodic)
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    summary = json.loads(rep.to_json())
    if args.theta:
        lo, hi, step = (float(x) for x in args.theta.split(":"))
        curve = theta_curve(args.d, sizes[-1], np.arange(lo, hi + step / 2, step), args.trials, args.seed)
        summary["theta_curve"] = {"L": curve.L, "p": curve.ps.tolist(), "theta": curve.theta.tolist(),
                                  "onset": curve.onset}
    _emit(summary, args.json)
    return OK


def cmd_variational(args) -> int:
    h0 = _load(args.h0)
    h1 = _load(args.h1, normalize=False)
    r = variational_energy(PerturbedProblem(h0, h1, args.lam))
    out = {"energy": r.energy, "coefficients": io.encode_matrix(r.coefficients), "dims": list(r.dims)}
    _emit(out, args.output)
    if args.verify and _can_verify(h0):
        h = Hamiltonian.build(h0.vertices, [(a, b, m) for (a, b), m in h0.edges.items()]
                              + [(a, b, args.lam * m) for (a, b), m in h1.edges.items()],
                              [(v, m) for v, m in h0.singles.items()]
                              + [(v, args.lam * m) for v, m in h1.singles.items()], normalize=False)
        from .oracle import build_full
        e0 = float(np.linalg.eigvalsh(build_full(h).matrix)[0])
        if r.energy < e0 - 1e-9:
            print(f"verify: MISMATCH energy below oracle E0 = {e0:.12g}", file=sys.stderr)
            return MISMATCH
    return OK


def cmd_generate(args) -> int:
    kind = args.kind
    if kind == "golden":
        ex = gen.golden_examples()
        if args.name not in ex:
            raise InputError(f"unknown example {args.name!r}; choose from {sorted(ex)}")
        h = ex[args.name]
    elif kind == "planted":
        h = gen.planted_complete(args.n, args.seed)
    elif kind == "chain":
        h = gen.reverse_network_instance(gen.chain_graph(args.n), args.seed, args.lock_fraction).hamiltonian
    elif kind == "grid":
        rows, cols = (int(x) for x in args.grid.split(","))
        h = gen.reverse_network_instance(gen.grid_graph(rows, cols), args.seed, args.lock_fraction).hamiltonian
    else:
        h = gen.random_instance(args.n, args.seed)
    text = json.dumps(io.hamiltonian_to_dict(h))
    if args.output:
        Path(args.output).write_text(text)
    else:
        print(text)
    return OK


def cmd_oracle(args) -> int:
    h = _load(args.model)
    o = oracle(h)
    print(json.dumps({"E0": o.energy, "frustration_free": o.frustration_free, "kernel_dim": o.kernel_dim,
                      "threshold": o.threshold}))
    return OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ffspin", description="Frustration-free 2-local spin Hamiltonians")
    sub = p.add_subparsers(dest="command", required=True)

    def verify(sp):
        sp.add_argument("--verify", action="store_true", help="cross-check against exact diagonalization")

    s = sub.add_parser("check", help="frustration verdict")
    s.add_argument("model")
    s.add_argument("--trace", help="write the reduction result here")
    s.add_argument("--expect", choices=["frustrated", "unfrustrated"])
    verify(s)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("reduce", help="reduce to a complete homogeneous Hamiltonian")
    s.add_argument("model")
    s.add_argument("-o", "--output")
    s.add_argument("--expect-unfrustrated", action="store_true")
    verify(s)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("ground", help="ground-space dimension and product basis")
    s.add_argument("model")
    s.add_argument("-o", "--output")
    s.add_argument("--vectors", action="store_true", help="also export dense ground vectors")
    verify(s)
    s.set_defaults(func=cmd_ground)

    s = sub.add_parser("expect", help="observable averaged over the ground manifold")
    s.add_argument("model")
    s.add_argument("observable")
    s.add_argument("--max-support", type=int, default=4)
    verify(s)
    s.set_defaults(func=cmd_expect)

    s = sub.add_parser("entangle", help="entanglement bounds for a region")
    s.add_argument("model")
    s.add_argument("--region", help="JSON list of vertices")
    s.add_argument("--rect", help="r0,c0,r1,c1 (half-open) on a grid")
    s.add_argument("--grid", help="ROWS,COLS of the grid labelling")
    s.add_argument("--c", type=float)
    s.add_argument("--K", type=float)
    s.add_argument("--auto-constants", action="store_true")
    s.add_argument("-o", "--output")
    verify(s)
    s.set_defaults(func=cmd_entangle)

    s = sub.add_parser("percolate", help="Monte-Carlo cluster statistics")
    s.add_argument("-d", type=int, default=2)
    s.add_argument("-L", default="16,32,64")
    s.add_argument("-p", type=float, required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--periodic", action="store_true")
    s.add_argument("--csv")
    s.add_argument("--json")
    s.add_argument("--theta", help="P0:P1:STEP grid for the largest-cluster curve")
    s.set_defaults(func=cmd_percolate)

    s = sub.add_parser("variational", help="energy of H0 + lambda H1 over ker(H0)")
    s.add_argument("--h0", required=True)
    s.add_argument("--h1", required=True)
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("-o", "--output")
    verify(s)
    s.set_defaults(func=cmd_variational)

    s = sub.add_parser("generate", help="write an instance as JSON")
    s.add_argument("kind", choices=["golden", "planted", "chain", "grid", "random"])
    s.add_argument("--name", default="xx4cycle")
    s.add_argument("-n", type=int, default=6)
    s.add_argument("--grid", default="3,3")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--lock-fraction", type=float, default=0.3)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("oracle", help="exact diagonalization summary")
    s.add_argument("model")
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except FFSpinError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
