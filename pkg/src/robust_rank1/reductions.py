"""Constructions linking the rank-one problems, with their checkers.

* :func:`binarize_phi` -- support indicator of a real vector.
* :func:`cutnorm_doubling` -- the block matrix ``[A, -A; -A, A]``.
* :func:`hadamard` and :func:`maxcut_gadget` -- the sign matrix that encodes
  a MAX CUT instance as a threshold question on ``max u^T A v``.
* :func:`embed_cut` and :func:`verify_gadget_threshold` -- map cuts to sign
  vectors and check the threshold equivalence.
* :func:`diag_lift` -- block diagonal copies of a matrix for rank ``r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SignFactors
from .graphs import Graph
from .oracles import DEFAULT_CAP, MAXCUT_CAP, inf1_norm_exact, maxcut_exact
from .validation import EnumerationCapError, check_matrix, check_power_of_two

__all__ = [
    "binarize_phi",
    "cutnorm_doubling",
    "hadamard",
    "GadgetInstance",
    "GadgetTooLargeError",
    "sound_p",
    "maxcut_gadget",
    "embed_cut",
    "edge_block_contribution",
    "t1_formula",
    "GadgetReport",
    "verify_gadget_threshold",
    "diag_lift",
]

GADGET_MAX_ENTRIES = 1 << 26


class GadgetTooLargeError(EnumerationCapError):
    """The requested gadget matrix would exceed the memory cap."""


def binarize_phi(x) -> np.ndarray:
    """0 where ``x`` is exactly zero, 1 elsewhere."""
    x = np.asarray(x, dtype=np.float64)
    return (x != 0).astype(np.float64)


def cutnorm_doubling(A) -> np.ndarray:
    A = check_matrix(A)
    return np.block([[A, -A], [-A, A]])


def hadamard(p: int) -> np.ndarray:
    """Sylvester Hadamard matrix built as ``H(p) = [H, H; -H, H]`` with ``H = H(p/2)``."""
    p = check_power_of_two(p)
    H = np.ones((1, 1))
    while H.shape[0] < p:
        H = np.block([[H, H], [-H, H]])
    return H


def sound_p(num_vertices: int, num_edges: int) -> int:
    """Smallest power of two strictly larger than ``|E|^2 |V|^2``."""
    bound = (num_edges * num_vertices) ** 2
    return 1 << bound.bit_length()


@dataclass(frozen=True, eq=False)
class GadgetInstance:
    """Sign matrix of shape ``(p|E|) x (p|V|)`` built from a graph.

    Block ``(q, l)`` is all +1 if ``l`` is the smaller endpoint of edge ``q``,
    all -1 if it is the larger endpoint, and ``hadamard(p)`` otherwise.
    ``sound`` records whether ``p > |E|^2 |V|^2``.
    """

    A: np.ndarray
    p: int
    graph: Graph

    @property
    def num_vertices(self) -> int:
        return self.graph.num_vertices

    @property
    def num_edges(self) -> int:
        return self.graph.num_edges

    @property
    def edge_list(self):
        return self.graph.edges

    @property
    def sound(self) -> bool:
        return self.p > (self.num_edges * self.num_vertices) ** 2

    def d_star(self, c: int) -> float:
        """Threshold ``2 p^2 c - |E| |V| p^(3/2)``."""
        p = self.p
        return 2 * p * p * c - self.num_edges * self.num_vertices * p * math.sqrt(p)

    def meets_threshold(self, value: int, c: int) -> bool:
        """Exact integer test of ``value >= d_star(c)`` for integer ``value``."""
        p = self.p
        gap = 2 * p * p * c - int(value)  # need gap <= |E||V| p sqrt(p)
        if gap <= 0:
            return True
        rhs = self.num_edges * self.num_vertices * p
        return gap * gap <= rhs * rhs * p

    def block(self, q: int, l: int) -> np.ndarray:
        """Block for edge ``q`` and vertex ``l`` (both 0-based)."""
        p = self.p
        return self.A[q * p:(q + 1) * p, l * p:(l + 1) * p]


def maxcut_gadget(G: Graph, p="auto", *, max_entries=GADGET_MAX_ENTRIES) -> GadgetInstance:
    """Build the gadget for ``G``.

    ``p="auto"`` picks the smallest sound power of two; an explicit ``p``
    builds a possibly unsound ("structural") instance, flagged by
    ``GadgetInstance.sound``.
    """
    if G.num_edges == 0:
        raise ValueError("the gadget needs at least one edge")
    if p == "auto":
        p = sound_p(G.num_vertices, G.num_edges)
    p = check_power_of_two(p)
    m, n = p * G.num_edges, p * G.num_vertices
    if m * n > max_entries:
        raise GadgetTooLargeError(
            f"gadget with p={p} would be {m}x{n} ({m * n} entries), "
            f"above the cap of {max_entries} entries")
    H = hadamard(p)
    ones = np.ones((p, p))
    rows = []
    for i, j in G.edges:
        blocks = [H] * G.num_vertices
        blocks[i - 1] = ones
        blocks[j - 1] = -ones
        rows.append(np.hstack(blocks))
    return GadgetInstance(np.vstack(rows), p, G)


def embed_cut(inst: GadgetInstance, side) -> SignFactors:
    """Sign vectors associated with the cut ``S = {l : side[l] = 1}``.

    Vertex blocks of ``v`` are +1 on ``S`` and -1 off it. The block of ``u``
    for a crossing edge ``(i, j)``, ``i < j``, is +1 when ``i`` is in ``S``
    and -1 otherwise; blocks of non-crossing edges are +1.
    """
    side = np.asarray(side).astype(int).reshape(-1)
    if side.size != inst.num_vertices:
        raise ValueError(
            f"side has length {side.size}, graph has {inst.num_vertices} vertices")
    p = inst.p
    v = np.repeat(np.where(side == 1, 1.0, -1.0), p)
    ub = [(1.0 if side[i - 1] == 1 else -1.0) if side[i - 1] != side[j - 1] else 1.0
          for i, j in inst.edge_list]
    return SignFactors(np.repeat(ub, p), v)


def edge_block_contribution(inst: GadgetInstance, u, v) -> int:
    """``u^T A v`` restricted to the blocks at edge endpoints, summed directly."""
    p = inst.p
    total = 0
    for q, (i, j) in enumerate(inst.edge_list):
        uq = u[q * p:(q + 1) * p]
        for l in (i - 1, j - 1):
            total += int(round(uq @ inst.block(q, l) @ v[l * p:(l + 1) * p]))
    return total


def t1_formula(inst: GadgetInstance, u, v) -> int:
    """Edge-block contribution from the block counts of +1 entries."""
    p = inst.p
    s = (np.asarray(u).reshape(-1, p) > 0).sum(axis=1)
    t = (np.asarray(v).reshape(-1, p) > 0).sum(axis=1)
    return int(sum(2 * (int(t[i - 1]) - int(t[j - 1])) * (2 * int(s[q]) - p)
                   for q, (i, j) in enumerate(inst.edge_list)))


@dataclass(frozen=True)
class GadgetReport:
    c_star: int
    d_star: float
    sound: bool
    max_cut: int
    max_cut_side: tuple
    best_embedded_value: int
    best_embedded_side: tuple
    embedded_meets_threshold: bool
    certification: str  # "full" or "embedding-only"
    inf1_value: float | None
    inf1_meets_threshold: bool | None

    @property
    def yes_instance(self) -> bool:
        return self.max_cut >= self.c_star

    @property
    def forward_holds(self) -> bool:
        """A cut of size ``c_star`` gives an embedded value reaching the threshold."""
        return self.embedded_meets_threshold or not self.yes_instance

    @property
    def embedded_equivalent(self) -> bool:
        return self.yes_instance == self.embedded_meets_threshold

    @property
    def full_equivalent(self) -> bool | None:
        if self.inf1_meets_threshold is None:
            return None
        return self.yes_instance == self.inf1_meets_threshold

    @property
    def passed(self) -> bool:
        """Forward direction always; the converse only where ``p`` is sound."""
        if not self.forward_holds:
            return False
        if self.sound:
            if not self.embedded_equivalent:
                return False
            if self.full_equivalent is False:
                return False
        return True


def verify_gadget_threshold(inst: GadgetInstance, c_star: int, *,
                            inf1_cap=DEFAULT_CAP, n_jobs=None) -> GadgetReport:
    """Compare the MAX CUT answer for ``c_star`` with the gadget threshold.

    Every cut is embedded with :func:`embed_cut` and the best ``u^T A v`` is
    tested against ``d_star(c_star)``. When the shorter side of the gadget is
    within ``inf1_cap`` the exact norm over all sign vectors is also compared
    ("full" certification); otherwise the report is "embedding-only".
    """
    nv = inst.num_vertices
    if nv > MAXCUT_CAP:
        raise EnumerationCapError(f"{nv} vertices exceeds the cut enumeration cap {MAXCUT_CAP}")
    max_cut, max_side = maxcut_exact(inst.graph)
    A = inst.A
    best_val, best_side = None, None
    for code in range(1 << nv):
        side = [(code >> (nv - 1 - l)) & 1 for l in range(nv)]
        f = embed_cut(inst, side)
        val = int(round(f.u @ A @ f.v))
        if best_val is None or val > best_val:
            best_val, best_side = val, tuple(side)
    inf1_value = inf1_ok = None
    certification = "embedding-only"
    if min(A.shape) <= inf1_cap:
        inf1_value = inf1_norm_exact(A, cap=inf1_cap, n_jobs=n_jobs).value
        inf1_ok = inst.meets_threshold(int(round(inf1_value)), c_star)
        certification = "full"
    return GadgetReport(
        c_star=c_star,
        d_star=inst.d_star(c_star),
        sound=inst.sound,
        max_cut=max_cut,
        max_cut_side=tuple(int(x) for x in max_side),
        best_embedded_value=best_val,
        best_embedded_side=best_side,
        embedded_meets_threshold=inst.meets_threshold(best_val, c_star),
        certification=certification,
        inf1_value=inf1_value,
        inf1_meets_threshold=inf1_ok,
    )


def diag_lift(M, r: int) -> np.ndarray:
    """Block diagonal matrix holding ``r`` copies of ``M``."""
    M = check_matrix(M)
    if r < 1:
        raise ValueError("r must be a positive integer")
    return np.kron(np.eye(r), M)
