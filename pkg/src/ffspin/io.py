"""JSON formats for Hamiltonians, observables, regions and reduction results.

Matrices are row-major lists of [re, im] pairs.  Two-spin matrices are in
a (x) b order with a the smaller vertex.  Python's float repr round-trips
exactly, so write-then-read is bit-exact.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .hamiltonian import Hamiltonian, LocalObservable
from .reduction import step_from_dict, step_to_dict, trace_from_json


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in m]


def decode_matrix(x, dim: int) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape != (dim * dim, 2):
        raise ValueError(f"expected {dim * dim} [re, im] pairs, got shape {arr.shape}")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim)


def hamiltonian_to_dict(h: Hamiltonian) -> dict:
    return {
        "vertices": list(h.vertices),
        "edges": [{"a": a, "b": b, "matrix": encode_matrix(m)} for (a, b), m in h.edges.items()],
        "singles": [{"v": v, "matrix": encode_matrix(m)} for v, m in h.singles.items()],
    }


def hamiltonian_from_dict(d: dict, normalize: bool = True) -> Hamiltonian:
    if not isinstance(d, dict) or "vertices" not in d:
        raise ValueError("missing 'vertices'")
    verts = d["vertices"]
    edges = [(e["a"], e["b"], decode_matrix(e["matrix"], 4)) for e in d.get("edges", [])]
    singles = [(s["v"], decode_matrix(s["matrix"], 2)) for s in d.get("singles", [])]
    return Hamiltonian.build(verts, edges, singles, normalize=normalize)


def save_hamiltonian(h: Hamiltonian, path) -> None:
    Path(path).write_text(json.dumps(hamiltonian_to_dict(h)))


def load_hamiltonian(path, normalize: bool = True) -> Hamiltonian:
    return hamiltonian_from_dict(json.loads(Path(path).read_text()), normalize)


def observable_to_dict(o: LocalObservable) -> dict:
    return {"support": list(o.support), "matrix": encode_matrix(o.matrix)}


def observable_from_dict(d: dict) -> LocalObservable:
    support = tuple(d["support"])
    return LocalObservable(support, decode_matrix(d["matrix"], 2 ** len(support)))


def load_observable(path) -> LocalObservable:
    return observable_from_dict(json.loads(Path(path).read_text()))


def load_region(path) -> list:
    d = json.loads(Path(path).read_text())
    region = d["region"] if isinstance(d, dict) else d
    if not isinstance(region, list) or not region:
        raise ValueError("region must be a nonempty list of vertices")
    return region


def result_to_dict(res) -> dict:
    out = {"frustrated": bool(res.frustrated), "trace": [step_to_dict(s) for s in res.trace]}
    if res.frustrated:
        out.update(reason=res.reason, location=list(res.location))
    else:
        out.update(hc=hamiltonian_to_dict(res.hamiltonian), free=list(res.network.free),
                   outputs=list(res.network.outputs))
    return out


def trace_from_dict(d: dict) -> tuple:
    return tuple(step_from_dict(s) for s in d["trace"])


__all__ = [
    "encode_matrix", "decode_matrix", "hamiltonian_to_dict", "hamiltonian_from_dict",
    "save_hamiltonian", "load_hamiltonian", "observable_to_dict", "observable_from_dict",
    "load_observable", "load_region", "result_to_dict", "trace_from_dict", "trace_from_json",
]
