"""Reduce a planted instance, describe its ground space and check it against ED.

    python scripts/ground_space_demo.py --rows 3 --cols 3
    python scripts/ground_space_demo.py --chain 10 --lock 0.3

Any lock edge pins the planted gauge to span{(x)L^{-1}|0..0>, (x)L^{-1}|1..1>},
so instances with locks contract down to a single spin and dim ker = 2.
"""
import argparse

import numpy as np

from ffspin import generators as gen
from ffspin.entanglement import entanglement_report, intervals, lattice_constants, rectangles
from ffspin.groundspace import GroundSpace, expectation_ground_manifold
from ffspin.hamiltonian import LocalObservable
from ffspin.oracle import build_full, ground_expectation, oracle
from ffspin.reduction import reduce_to_complete


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--chain", type=int, help="use a chain of this length instead of a grid")
    ap.add_argument("--rows", type=int, default=3)
    ap.add_argument("--cols", type=int, default=3)
    ap.add_argument("--lock", type=float, default=0.0)
    ap.add_argument("--seed", type=int, default=4)
    args = ap.parse_args()

    if args.chain:
        g = gen.chain_graph(args.chain)
        regions, c = list(intervals(args.chain)), 1.0
    else:
        g = gen.grid_graph(args.rows, args.cols)
        regions, c = list(rectangles(args.rows, args.cols)), 0.5
    inst = gen.reverse_network_instance(g, args.seed, args.lock)
    h = inst.hamiltonian
    kinds = list(inst.kinds.values())
    print(f"{h.n} spins, {len(h.edges)} terms: "
          f"{kinds.count('light')} light, {kinds.count('lock')} lock")

    res = reduce_to_complete(h)
    if res.frustrated:
        print("frustrated:", res.reason)
        return
    space = GroundSpace.from_result(res)
    kinds_of_steps = [s.kind for s in res.trace]
    print(f"reduction: {len(res.trace)} steps "
          f"({kinds_of_steps.count('contract')} contractions, {kinds_of_steps.count('induce')} inductions)")
    print(f"complete core: {res.n_c} spins in components {space.dims}; dim ker = {space.dim}")

    data = oracle(h)
    q = space.ground_basis()
    print(f"ED: dim ker = {data.kernel_dim}; max |H q| = {np.abs(build_full(h).matrix @ q).max():.1e}")

    zz = LocalObservable((0, 1), np.diag([1.0, -1.0, -1.0, 1.0]))
    print(f"<Z0 Z1> over ker: {expectation_ground_manifold(res, zz, space=space):.10f} "
          f"(ED {ground_expectation(h, (0, 1), zz.matrix, data=data):.10f})")

    k = lattice_constants(g, c)
    region = next(r for r in regions if len(r) == 4)
    print(f"\nregion {list(region)}")
    print(entanglement_report(h, region, k).table())


if __name__ == "__main__":
    main()
