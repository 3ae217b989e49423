"""Graph families as sums of permutation operators, T = P_rho_1 + ... + P_rho_d.

The adjacency count ``a[u, v]`` is the number of i with ``rho_i(v) == u``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InvalidPermutation, NotInvariant, NotTransitive, NotUndirected
from .groups import FiniteGroup, GroupAction, left_translation_action, verify_automorphism

CAYLEY_KINDS = ("cayley", "cayley_sum", "twisted_cayley", "twisted_cayley_sum")
KINDS = CAYLEY_KINDS + ("vertex_transitive",)


@dataclass(frozen=True)
class ValidationRecord:
    undirected: bool
    connected: bool
    nonbipartite: bool
    enough_vertices: bool = True
    positive_degree: bool = True

    @property
    def valid(self) -> bool:
        return all(
            (self.undirected, self.connected, self.nonbipartite, self.enough_vertices, self.positive_degree)
        )

    @property
    def reasons(self) -> list[str]:
        out = []
        if not self.enough_vertices:
            out.append("fewer than 2 vertices")
        if not self.positive_degree:
            out.append("degree 0")
        if not self.undirected:
            out.append("directed")
        if not self.connected:
            out.append("disconnected")
        if not self.nonbipartite:
            out.append("bipartite")
        return out


@dataclass(frozen=True, eq=False)
class SpectralInstance:
    n: int
    d: int
    rho: np.ndarray  # shape (d, n); rho[i][v] is the image of v
    a: np.ndarray
    kind: str
    action: GroupAction
    flags: ValidationRecord
    label: str = ""
    connection_set: Optional[tuple[int, ...]] = field(default=None, repr=False)
    automorphism: Optional[tuple[int, ...]] = field(default=None, repr=False)

    @property
    def group(self) -> FiniteGroup:
        return self.action.group

    def with_doubled_connections(self) -> "SpectralInstance":
        """Same graph with every permutation repeated (all counts and d doubled)."""
        rho = np.concatenate([self.rho, self.rho])
        cs = None if self.connection_set is None else self.connection_set * 2
        return _make_instance(
            rho, self.kind, self.action, f"{self.label}*2", cs, self.automorphism
        )


def adjacency_from_rho(rho: np.ndarray, n: int) -> np.ndarray:
    a = np.zeros((n, n), dtype=np.int64)
    for r in rho:
        np.add.at(a, (r, np.arange(n)), 1)
    return a


def is_connected(a: np.ndarray) -> bool:
    k, _ = connected_components(csr_matrix(a > 0), directed=True, connection="weak")
    return k == 1


def two_coloring(a: np.ndarray) -> Optional[np.ndarray]:
    """A proper 2-coloring of the support multigraph, or None (loops are odd cycles)."""
    n = a.shape[0]
    if np.any(np.diag(a) > 0):
        return None
    nbrs = [np.flatnonzero((a[v] > 0) | (a[:, v] > 0)) for v in range(n)]
    color = np.full(n, -1, dtype=np.int64)
    for root in range(n):
        if color[root] >= 0:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in nbrs[u]:
                if color[w] < 0:
                    color[w] = 1 - color[u]
                    queue.append(w)
                elif color[w] == color[u]:
                    return None
    return color


def validate_instance(inst: SpectralInstance) -> ValidationRecord:
    a = inst.a
    return ValidationRecord(
        undirected=bool(np.array_equal(a, a.T)),
        connected=is_connected(a),
        nonbipartite=two_coloring(a) is None,
        enough_vertices=inst.n >= 2,
        positive_degree=inst.d > 0,
    )


def _make_instance(rho, kind, action, label, connection_set=None, automorphism=None) -> SpectralInstance:
    rho = np.asarray(rho, dtype=np.int64)
    d, n = rho.shape
    for i, r in enumerate(rho):
        if not np.array_equal(np.sort(r), np.arange(n)):
            raise InvalidPermutation(f"rho[{i}] is not a bijection on 0..{n - 1}")
    a = adjacency_from_rho(rho, n)
    if not np.array_equal(a, a.T):
        u, v = map(int, np.argwhere(a != a.T)[0])
        raise NotUndirected(f"{label}: a[{u},{v}]={a[u, v]} but a[{v},{u}]={a[v, u]}")
    rho.setflags(write=False)
    a.setflags(write=False)
    inst = SpectralInstance(
        n=n, d=d, rho=rho, a=a, kind=kind, action=action,
        flags=ValidationRecord(True, True, True), label=label,
        connection_set=connection_set, automorphism=automorphism,
    )
    object.__setattr__(inst, "flags", validate_instance(inst))
    return inst


def neighbor_maps(kind: str, G: FiniteGroup, S: Sequence[int], sigma: Optional[Sequence[int]] = None) -> np.ndarray:
    m, inv = G.mul, G.inv
    if kind in ("twisted_cayley", "twisted_cayley_sum"):
        if sigma is None:
            raise ValueError(f"{kind} needs an automorphism")
        if not verify_automorphism(G, sigma):
            raise ValueError("supplied map is not a group automorphism")
        sig = np.asarray(sigma, dtype=np.int64)
    rows = []
    for s in S:
        if not 0 <= s < G.order:
            raise ValueError(f"connection element {s} outside 0..{G.order - 1}")
        if kind == "cayley":
            rows.append(m[:, s])  # x -> x*s
        elif kind == "cayley_sum":
            rows.append(m[s, inv])  # x -> s*x^-1
        elif kind == "twisted_cayley":
            rows.append(sig[m[:, s]])
        elif kind == "twisted_cayley_sum":
            rows.append(sig[m[s, inv]])
        else:
            raise ValueError(f"unknown kind {kind!r}")
    return np.array(rows, dtype=np.int64).reshape(len(rows), G.order)


def build_instance(
    kind: str,
    G: FiniteGroup,
    S: Sequence[int],
    sigma: Optional[Sequence[int]] = None,
    label: Optional[str] = None,
) -> SpectralInstance:
    """Cayley-type graph on G carrying the left-translation action.

    Raises NotUndirected when the resulting counts are asymmetric.
    """
    S = [int(s) for s in S]
    if not S:
        raise ValueError("connection set must be non-empty")
    rho = neighbor_maps(kind, G, S, sigma)
    if label is None:
        label = f"{kind}({G.name or G.order};S={S}" + (f";sigma={list(sigma)}" if sigma is not None else "") + ")"
    return _make_instance(
        rho, kind, left_translation_action(G), label, tuple(S),
        None if sigma is None else tuple(int(x) for x in sigma),
    )


def vertex_transitive_instance(
    n: int, rho: Sequence[Sequence[int]], action: GroupAction, label: str = "vertex_transitive"
) -> SpectralInstance:
    """Validated instance whose adjacency is invariant under a transitive action."""
    rho = np.asarray(rho, dtype=np.int64).reshape(len(rho), n)
    if action.n != n:
        raise ValueError(f"action is on {action.n} points, graph has {n}")
    if not action.is_transitive():
        raise NotTransitive(f"action has {len(action.orbits())} orbits")
    inst = _make_instance(rho, "vertex_transitive", action, label)
    witness = invariance_violation(inst.a, action)
    if witness is not None:
        raise NotInvariant(f"a is not invariant under group element {witness}")
    return inst


def invariance_violation(a: np.ndarray, action: GroupAction) -> Optional[int]:
    for g, p in enumerate(action.perm):
        if not np.array_equal(a[np.ix_(p, p)], a):
            return g
    return None


def rho_from_adjacency(a: np.ndarray) -> np.ndarray:
    """Split a symmetric d-regular count matrix into d permutations (regular bipartite matching)."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    degrees = a.sum(axis=0)
    if not np.all(degrees == degrees[0]) or not np.all(a.sum(axis=1) == degrees[0]):
        raise ValueError("matrix is not regular")
    rest = a.copy()
    rho = []
    for _ in range(int(degrees[0])):
        rows, cols = linear_sum_assignment(-(rest > 0).astype(np.int64))
        if not np.all(rest[rows, cols] > 0):
            raise AssertionError("no perfect matching in a regular bipartite multigraph")
        r = np.empty(n, dtype=np.int64)
        r[cols] = rows  # entry (u, v) means rho(v) = u
        rest[rows, cols] -= 1
        rho.append(r)
    return np.array(rho, dtype=np.int64).reshape(len(rho), n)


__all__ = [
    "CAYLEY_KINDS",
    "KINDS",
    "SpectralInstance",
    "ValidationRecord",
    "adjacency_from_rho",
    "build_instance",
    "invariance_violation",
    "left_translation_action",
    "rho_from_adjacency",
    "two_coloring",
    "validate_instance",
    "vertex_transitive_instance",
]
