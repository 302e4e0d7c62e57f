"""Gauge-fixed Gram matrices built purely from Bargmann invariants.

Vertices are 1-based tuple indices.  The frame graph connects i and j when
their overlap is nonzero.  On a spanning tree of each connected component
the inner products are chosen real and positive; every other nonzero inner
product ``<psi_i|psi_j>`` is then fixed by the invariant of the cycle that
runs along the tree from j to i and closes with the edge {i, j}:

    <psi_i|psi_j> = D(j, ..., i) / prod(|tree inner products on the path|)
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .errors import InputError
from .invariants import as_source
from .states import BargmannInvariant, StateTuple

DEFAULT_ZERO_THRESHOLD = 1e-9
STATISTICAL_SIGMAS = 5.0
PURITY_TOL = 1e-9


@dataclass(frozen=True)
class FrameGraph:
    n_vertices: int
    edges: frozenset[tuple[int, int]]
    overlaps: dict[tuple[int, int], float]
    heuristic: bool = False

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(1, self.n_vertices + 1))
        g.add_edges_from(sorted(self.edges))
        return g

    @property
    def components(self) -> list[list[int]]:
        comps = nx.connected_components(self.to_networkx())
        return sorted((sorted(c) for c in comps), key=lambda c: c[0])

    def degree(self, v: int) -> int:
        return sum(v in e for e in self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges


def _pairs(n):
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def build_frame_graph(source, zero_threshold: float | None = DEFAULT_ZERO_THRESHOLD) -> FrameGraph:
    """Frame graph from all pairwise overlaps.

    With exact invariants an edge is present iff the overlap exceeds
    ``zero_threshold``.  When the source carries standard errors (shot
    estimates) and ``zero_threshold`` is None, each edge is decided at
    ``5 * stderr`` of its overlap estimate and the graph is marked heuristic.
    """
    src = as_source(source)
    if isinstance(source, StateTuple):
        for k, s in enumerate(source, start=1):
            if not s.is_pure and abs(s.purity() - 1) > PURITY_TOL:
                raise InputError(f"state {k} is not pure; frame graphs need pure states")
    statistical = zero_threshold is None
    if statistical and not getattr(src, "heuristic", False):
        zero_threshold, statistical = DEFAULT_ZERO_THRESHOLD, False
    overlaps, edges = {}, set()
    for i, j in _pairs(src.n):
        ov = float(np.real(src.value((i, j))))
        overlaps[i, j] = ov
        thr = STATISTICAL_SIGMAS * src.stderr((i, j)) if statistical else zero_threshold
        if ov > thr:
            edges.add((i, j))
    return FrameGraph(src.n, frozenset(edges), overlaps, heuristic=statistical)


@dataclass(frozen=True)
class SpanningTree:
    root: int
    parent: dict[int, int]
    vertices: frozenset[int]

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset((min(c, p), max(c, p)) for c, p in self.parent.items())

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def path_to_root(self, v: int) -> list[int]:
        path = [v]
        while path[-1] != self.root:
            path.append(self.parent[path[-1]])
        return path

    def path(self, start: int, end: int) -> list[int]:
        """Unique tree path from ``start`` to ``end``, both included."""
        up = self.path_to_root(start)
        down = self.path_to_root(end)
        on_down = set(down)
        meet = next(v for v in up if v in on_down)
        return up[: up.index(meet) + 1] + down[: down.index(meet)][::-1]


def choose_spanning_tree(
    graph: FrameGraph,
    component: int | Iterable[int] | None = None,
    root: int | None = None,
    strategy: str = "bfs",
) -> SpanningTree:
    """Deterministic spanning tree of one connected component.

    ``component`` is a vertex set, a position in ``graph.components``, or
    None for the component of ``root`` (vertex 1 if both are None).  The
    default root is the vertex of maximum degree, ties to the lowest index;
    the default breadth-first strategy turns a complete graph into a star.
    ``strategy="dfs"`` gives path-like trees instead.
    """
    comps = graph.components
    if component is None:
        anchor = root if root is not None else 1
        verts = next(c for c in comps if anchor in c)
    elif isinstance(component, int):
        verts = comps[component]
    else:
        verts = sorted(component)
        if verts not in comps:
            raise InputError(f"{verts} is not a connected component of the frame graph")
    if root is None:
        root = max(verts, key=lambda v: (graph.degree(v), -v))
    elif root not in verts:
        raise InputError(f"root {root} is not in component {verts}")
    g = graph.to_networkx().subgraph(verts)
    if strategy == "bfs":
        parent = dict(nx.bfs_predecessors(g, root, sort_neighbors=sorted))
    elif strategy == "dfs":
        parent = dict(nx.dfs_predecessors(g, root))
    else:
        raise InputError(f"unknown tree strategy {strategy!r}")
    return SpanningTree(root, parent, frozenset(verts))


def spanning_forest(graph: FrameGraph, strategy: str = "bfs") -> list[SpanningTree]:
    return [choose_spanning_tree(graph, c, strategy=strategy) for c in graph.components]


def _as_forest(graph: FrameGraph, trees) -> list[SpanningTree]:
    if trees is None:
        return spanning_forest(graph)
    if isinstance(trees, SpanningTree):
        trees = [trees]
    trees = list(trees)
    comps = {tuple(c) for c in graph.components}
    covered = sorted(v for t in trees for v in t.vertices)
    if covered != list(range(1, graph.n_vertices + 1)):
        raise InputError("trees must cover every vertex exactly once")
    for t in trees:
        if tuple(sorted(t.vertices)) not in comps:
            raise InputError(f"tree rooted at {t.root} does not span a frame-graph component")
        missing = [e for e in t.edges if e not in graph.edges]
        if missing or len(t.parent) != len(t.vertices) - 1:
            raise InputError(f"tree rooted at {t.root} uses non-edges {missing}")
    return sorted(trees, key=lambda t: min(t.vertices))


def _closing_cycle(tree: SpanningTree, i: int, j: int) -> tuple[int, ...]:
    # path from j to i along the tree; the closing edge is (i, j)
    return tuple(tree.path(j, i))


def _closing_sequences(graph: FrameGraph, tree: SpanningTree, close_all_pairs: bool):
    verts = sorted(tree.vertices)
    for a, i in enumerate(verts):
        for j in verts[a + 1 :]:
            if tree.has_edge(i, j):
                continue
            if close_all_pairs or graph.has_edge(i, j):
                yield _closing_cycle(tree, i, j)


def required_invariants(
    graph: FrameGraph,
    trees: SpanningTree | Sequence[SpanningTree] | None = None,
    close_all_pairs: bool = False,
) -> list[tuple[int, ...]]:
    """Index sequences consumed by :func:`reconstruct_gram`.

    All ``N(N-1)/2`` overlaps, then one closing cycle per frame-graph edge
    outside the tree.  With ``close_all_pairs`` every non-tree pair inside a
    component gets its closing cycle, whether or not the pair is an edge
    (the invariants of non-edges vanish).
    """
    seqs: list[tuple[int, ...]] = list(_pairs(graph.n_vertices))
    for tree in _as_forest(graph, trees):
        seqs.extend(_closing_sequences(graph, tree, close_all_pairs))
    return seqs


@dataclass
class GramMatrix:
    """Gram matrix whose entries are functions of measured invariants.

    ``provenance[(i, j)]`` is the index sequence that fixed entry (i, j)
    for ``i < j``; ``blocks`` lists the frame-graph components.
    """

    entries: np.ndarray
    provenance: dict[tuple[int, int], tuple[int, ...]]
    invariants_used: list[BargmannInvariant]
    blocks: list[list[int]]
    graph: FrameGraph
    trees: list[SpanningTree] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def counts(self) -> dict:
        by_degree: dict[int, int] = {}
        nonzero = 0
        for inv in self.invariants_used:
            by_degree[inv.degree] = by_degree.get(inv.degree, 0) + 1
            if inv.degree > 2 and abs(inv.value) > DEFAULT_ZERO_THRESHOLD:
                nonzero += 1
        closing = sum(v for k, v in by_degree.items() if k > 2)
        return {
            "total": len(self.invariants_used),
            "overlaps": by_degree.get(2, 0),
            "closing": closing,
            "closing_nonzero": nonzero,
            "by_degree": dict(sorted(by_degree.items())),
        }

    def block(self, k: int) -> np.ndarray:
        idx = np.array(self.blocks[k]) - 1
        return self.entries[np.ix_(idx, idx)]

    def rank(self, rel_tol: float = 1e-10) -> int:
        vals = np.linalg.eigvalsh(self.entries)
        return int(np.sum(vals > rel_tol * max(vals.max(), 0.0)))

    def representatives(self, rel_tol: float = 1e-10) -> np.ndarray:
        """Columns ``v_1..v_N`` (in ``C^rank``) with ``<v_i|v_j> = G_ij``."""
        return representatives(self.entries, rel_tol)


def representatives(gram: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    vals, vecs = np.linalg.eigh(gram)
    keep = vals > rel_tol * max(vals.max(), 0.0)
    return np.sqrt(vals[keep])[:, None] * vecs[:, keep].conj().T


def reconstruct_gram(
    source,
    trees: SpanningTree | Sequence[SpanningTree] | None = None,
    graph: FrameGraph | None = None,
    zero_threshold: float | None = DEFAULT_ZERO_THRESHOLD,
    close_all_pairs: bool = False,
) -> GramMatrix:
    """Gram matrix of a pure-state tuple from its invariants.

    ``source`` is a :class:`StateTuple` or any invariant source (see
    :mod:`bargmann.invariants`).  Disconnected frame graphs give a
    block-diagonal result with one block per component.
    """
    src = as_source(source)
    if not src.is_pure():
        raise InputError("Gram reconstruction requires pure states")
    graph = graph if graph is not None else build_frame_graph(source, zero_threshold)
    if graph.n_vertices != src.n:
        raise InputError("frame graph size does not match the tuple")
    forest = _as_forest(graph, trees)
    n = src.n
    gram = np.eye(n, dtype=complex)
    used = []
    provenance = {}
    for i, j in _pairs(n):
        used.append(BargmannInvariant((i, j), complex(graph.overlaps[i, j])))
    magnitude = {e: np.sqrt(max(graph.overlaps[e], 0.0)) for e in graph.edges}

    for tree in forest:
        for child, par in tree.parent.items():
            e = (min(child, par), max(child, par))
            gram[par - 1, child - 1] = gram[child - 1, par - 1] = magnitude[e]
            provenance[e] = e
        for seq in _closing_sequences(graph, tree, close_all_pairs):
            j, i = seq[0], seq[-1]
            value = complex(src.value(seq))
            used.append(BargmannInvariant(seq, value))
            if not graph.has_edge(i, j):
                continue
            path_edges = [(min(a, b), max(a, b)) for a, b in zip(seq[:-1], seq[1:])]
            entry = value / np.prod([magnitude[e] for e in path_edges])
            gram[i - 1, j - 1] = entry
            gram[j - 1, i - 1] = np.conj(entry)
            provenance[min(i, j), max(i, j)] = seq
    return GramMatrix(gram, provenance, used, graph.components, graph, forest)


def gauge_fixed_vectors(states: StateTuple, trees: SpanningTree | Sequence[SpanningTree] | None = None) -> np.ndarray:
    """State vectors rephased so that tree inner products are positive.

    The Gram matrix of the returned columns is the gauge-fixed Gram matrix
    of :func:`reconstruct_gram`; useful as an independent check.
    """
    graph = build_frame_graph(states)
    forest = _as_forest(graph, trees)
    vecs = states.vectors().copy()
    for tree in forest:
        queue = deque([tree.root])
        children: dict[int, list[int]] = {}
        for c, p in tree.parent.items():
            children.setdefault(p, []).append(c)
        while queue:
            p = queue.popleft()
            for c in sorted(children.get(p, [])):
                ip = np.vdot(vecs[:, p - 1], vecs[:, c - 1])
                vecs[:, c - 1] *= np.conj(ip) / abs(ip)
                queue.append(c)
    return vecs
