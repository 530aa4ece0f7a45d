"""Directed interaction graphs.

A graph is a dense-id arc list with two per-arc weight vectors: the diffusion
probability B (used by the cascade models) and the interaction strength A (the
quantity the activity objective accumulates on arcs whose two endpoints both
become active). Undirected input edges are ingested as two opposing arcs.

Instances are immutable by convention: the weight-assignment helpers return new
Graph objects and never mutate their argument, so graphs can be shared freely
across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import EdgeListError

DIRECTED = "directed"
UNDIRECTED = "undirected"

UNIFORM = "uniform"
DIFFUSION = "diffusion"


@dataclass(frozen=True)
class IngestionReport:
    nodes: int
    arcs: int
    dropped_duplicates: int
    dropped_self_loops: int

    def as_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "arcs": self.arcs,
            "dropped_duplicates": self.dropped_duplicates,
            "dropped_self_loops": self.dropped_self_loops,
        }


class Graph:
    """Arc-list graph with CSR adjacency in both directions.

    Attributes
    ----------
    n : int
        Node count (ids are dense, 0..n-1).
    src, dst : int64 arrays of length m
        Arc endpoints.
    B, A : float64 arrays of length m
        Per-arc diffusion probability and interaction strength.
    orientation : str
        How the source edge list was interpreted ("directed" or "undirected").
    original_ids : int64 array of length n
        Dense id -> id used in the input file.
    T : float
        Total interaction strength, sum of A.
    w : float64 array of length n
        Half the interaction strength incident to each node; sums to W.
    W : float
        Sum of w. Equals T because every arc splits its strength over its
        two endpoints.
    """

    __slots__ = (
        "n", "src", "dst", "B", "A", "orientation", "original_ids",
        "ingestion", "out_ptr", "out_arcs", "in_ptr", "in_arcs",
        "in_degree", "out_degree", "T", "w", "W", "_packed",
    )

    def __init__(self, n, src, dst, B=None, A=None, orientation=DIRECTED,
                 original_ids=None, ingestion=None):
        src = np.array(src, dtype=np.int64, copy=True)
        dst = np.array(dst, dtype=np.int64, copy=True)
        m = src.shape[0]
        if dst.shape[0] != m:
            raise ValueError("src and dst must have equal length")
        if m == 0:
            raise ValueError("graph must have at least one arc")
        if n <= 0:
            raise ValueError("graph must have at least one node")
        if src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n:
            raise ValueError("arc endpoint out of range")
        if np.any(src == dst):
            raise ValueError("self-loop arcs are not allowed")
        B = np.zeros(m) if B is None else np.array(B, dtype=np.float64, copy=True)
        A = np.zeros(m) if A is None else np.array(A, dtype=np.float64, copy=True)
        if B.shape[0] != m or A.shape[0] != m:
            raise ValueError("B and A must have one entry per arc")
        if np.any(~np.isfinite(B)) or B.min() < 0.0 or B.max() > 1.0:
            raise ValueError("diffusion probabilities must lie in [0, 1]")
        if np.any(~np.isfinite(A)) or A.min() < 0.0:
            raise ValueError("interaction strengths must be non-negative")
        key = src * np.int64(n) + dst
        if np.unique(key).shape[0] != m:
            raise ValueError("duplicate arcs are not allowed")

        self.n = int(n)
        self.src = src
        self.dst = dst
        self.B = B
        self.A = A
        self.orientation = orientation
        if original_ids is None:
            original_ids = np.arange(n, dtype=np.int64)
        self.original_ids = np.array(original_ids, dtype=np.int64, copy=True)
        self.ingestion = ingestion

        self.out_degree = np.bincount(src, minlength=n).astype(np.int64)
        self.in_degree = np.bincount(dst, minlength=n).astype(np.int64)
        self.out_arcs = np.argsort(src, kind="stable").astype(np.int64)
        self.in_arcs = np.argsort(dst, kind="stable").astype(np.int64)
        self.out_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(self.out_degree, out=self.out_ptr[1:])
        self.in_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(self.in_degree, out=self.in_ptr[1:])

        self.T = float(A.sum())
        self.w = 0.5 * (np.bincount(src, weights=A, minlength=n)
                        + np.bincount(dst, weights=A, minlength=n))
        self.W = float(self.w.sum())
        self._packed = None
        for name in ("src", "dst", "B", "A", "original_ids", "out_degree",
                     "in_degree", "out_arcs", "in_arcs", "out_ptr", "in_ptr", "w"):
            getattr(self, name).setflags(write=False)

    # -- adjacency views ---------------------------------------------------

    @property
    def m(self) -> int:
        return self.src.shape[0]

    def out_arcs_of(self, v: int) -> np.ndarray:
        """Arc ids leaving v."""
        return self.out_arcs[self.out_ptr[v]:self.out_ptr[v + 1]]

    def in_arcs_of(self, v: int) -> np.ndarray:
        """Arc ids entering v (the transpose view used by reverse sampling)."""
        return self.in_arcs[self.in_ptr[v]:self.in_ptr[v + 1]]

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.dst[self.out_arcs_of(v)]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.src[self.in_arcs_of(v)]

    def total_degree(self) -> np.ndarray:
        return self.in_degree + self.out_degree

    def lt_in_mass(self) -> np.ndarray:
        """Per-node sum of incoming diffusion probability (LT precondition)."""
        return np.bincount(self.dst, weights=self.B, minlength=self.n)

    def arcs_per_input_edge(self) -> int:
        return 2 if self.orientation == UNDIRECTED else 1

    # -- kernel packing ----------------------------------------------------

    def packed(self) -> "PackedGraph":
        """Contiguous in/out adjacency copies consumed by the compiled kernels."""
        if self._packed is None:
            in_src = self.src[self.in_arcs].astype(np.int64)
            in_B = self.B[self.in_arcs].astype(np.float64)
            arc_in_pos = np.empty(self.m, dtype=np.int64)
            arc_in_pos[self.in_arcs] = np.arange(self.m, dtype=np.int64)
            out_dst = self.dst[self.out_arcs].astype(np.int64)
            out_B = self.B[self.out_arcs].astype(np.float64)
            out_in_pos = arc_in_pos[self.out_arcs]
            self._packed = PackedGraph(
                n=self.n, m=self.m,
                in_ptr=self.in_ptr, in_src=in_src, in_B=in_B,
                out_ptr=self.out_ptr, out_dst=out_dst, out_B=out_B,
                out_in_pos=out_in_pos,
            )
        return self._packed

    def __repr__(self) -> str:  # pragma: no cover
        return (f"Graph(n={self.n}, m={self.m}, orientation={self.orientation!r}, "
                f"T={self.T:.6g})")


@dataclass(frozen=True)
class PackedGraph:
    n: int
    m: int
    in_ptr: np.ndarray
    in_src: np.ndarray
    in_B: np.ndarray
    out_ptr: np.ndarray
    out_dst: np.ndarray
    out_B: np.ndarray
    out_in_pos: np.ndarray  # arc position in the in-CSR, for LT forward checks


# -- ingestion --------------------------------------------------------------


def load_edge_list(path, orientation: str = DIRECTED) -> Graph:
    """Parse a whitespace-separated edge list into a Graph.

    Lines starting with '#' and blank lines are skipped. Every other line must
    hold exactly two non-negative integer ids. Self-loops are dropped and
    counted; duplicate arcs (duplicate edges in either order for undirected
    input) are dropped and counted. Node ids are remapped to a dense range in
    first-seen order; the original ids are kept on the returned graph.
    """
    if orientation not in (DIRECTED, UNDIRECTED):
        raise ValueError(f"unknown orientation {orientation!r}")
    id_map: dict[int, int] = {}
    seen: set[tuple[int, int]] = set()
    src: list[int] = []
    dst: list[int] = []
    dropped_dup = 0
    dropped_self = 0

    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise EdgeListError(
                    f"expected two ids, got {len(parts)} fields", line=line_no)
            try:
                u = int(parts[0])
                v = int(parts[1])
            except ValueError:
                raise EdgeListError(
                    f"non-integer id in {text!r}", line=line_no) from None
            if u < 0 or v < 0:
                raise EdgeListError("negative node id", line=line_no)
            if u == v:
                dropped_self += 1
                continue
            key = (u, v) if orientation == DIRECTED else (min(u, v), max(u, v))
            if key in seen:
                dropped_dup += 1
                continue
            seen.add(key)
            iu = id_map.setdefault(u, len(id_map))
            iv = id_map.setdefault(v, len(id_map))
            src.append(iu)
            dst.append(iv)
            if orientation == UNDIRECTED:
                src.append(iv)
                dst.append(iu)

    if not src:
        raise EdgeListError(f"no usable edges in {path}")
    n = len(id_map)
    original = np.empty(n, dtype=np.int64)
    for orig, dense in id_map.items():
        original[dense] = orig
    report = IngestionReport(
        nodes=n, arcs=len(src),
        dropped_duplicates=dropped_dup, dropped_self_loops=dropped_self)
    return Graph(n, src, dst, orientation=orientation,
                 original_ids=original, ingestion=report)


def to_edge_list(g: Graph, path) -> None:
    """Write one 'src dst' line per arc using the original node ids."""
    ids = g.original_ids
    with open(path, "w", encoding="utf-8") as fh:
        for e in range(g.m):
            fh.write(f"{ids[g.src[e]]} {ids[g.dst[e]]}\n")


def from_arcs(n: int, arcs: Iterable[tuple], orientation: str = DIRECTED) -> Graph:
    """Build a graph from (src, dst[, B[, A]]) tuples. Test and fixture helper."""
    rows = list(arcs)
    src = [r[0] for r in rows]
    dst = [r[1] for r in rows]
    B = [r[2] if len(r) > 2 else 0.0 for r in rows]
    A = [r[3] if len(r) > 3 else 0.0 for r in rows]
    return Graph(n, src, dst, B=B, A=A, orientation=orientation)


# -- weight assignment -------------------------------------------------------


def assign_diffusion_params(g: Graph) -> Graph:
    """Weighted-cascade assignment: B(u, v) = 1 / in_degree(v)."""
    B = 1.0 / g.in_degree[g.dst].astype(np.float64)
    return Graph(g.n, g.src, g.dst, B=B, A=g.A, orientation=g.orientation,
                 original_ids=g.original_ids, ingestion=g.ingestion)


def assign_activity(g: Graph, setting: str) -> Graph:
    """Set per-arc interaction strengths.

    "uniform" puts strength 1 on every arc; "diffusion" copies the diffusion
    probability B (which must have been assigned first).
    """
    if setting == UNIFORM:
        A = np.ones(g.m)
    elif setting == DIFFUSION:
        if float(g.B.sum()) == 0.0:
            raise ValueError(
                "diffusion activity needs diffusion probabilities assigned first")
        A = g.B.copy()
    else:
        raise ValueError(f"unknown activity setting {setting!r}")
    return Graph(g.n, g.src, g.dst, B=g.B, A=A, orientation=g.orientation,
                 original_ids=g.original_ids, ingestion=g.ingestion)
