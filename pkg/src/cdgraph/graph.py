"""Common-divisor graphs on conjugacy classes.

Vertices are the non-central classes (optionally only the p-regular ones);
two vertices are adjacent when their sizes share a prime.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .classes import ClassTable, ConjClass, p_regular_classes
from .permgroup import Group, PrimeSet

INF = math.inf


class EmptyGraph(ValueError):
    pass


@dataclass(eq=False)
class ClassGraph:
    table: ClassTable
    prime: int | None
    classes: list[ConjClass]
    adjacency: np.ndarray
    dist: np.ndarray
    components: list[list[int]] = field(default_factory=list)

    @property
    def group(self) -> Group:
        return self.table.group

    @property
    def mode(self) -> str:
        return "ordinary" if self.prime is None else f"p-regular({self.prime})"

    @property
    def vertices(self) -> list[int]:
        """Class-table indices of the vertices."""
        return [c.index for c in self.classes]

    @property
    def sizes(self) -> list[int]:
        return [c.size for c in self.classes]

    def __len__(self):
        return len(self.classes)

    @property
    def edges(self) -> dict[tuple[int, int], PrimeSet]:
        out = {}
        for i, j in zip(*np.nonzero(np.triu(self.adjacency, 1))):
            out[(int(i), int(j))] = self.classes[i].primes & self.classes[j].primes
        return out

    @property
    def connected(self) -> bool:
        return len(self.components) <= 1

    def component_of(self, v: int) -> list[int]:
        for comp in self.components:
            if v in comp:
                return comp
        raise IndexError(v)


def build_graph(table: ClassTable, p: int | None = None) -> ClassGraph:
    """Gamma(G) for ``p=None``, otherwise Gamma_p(G) on the p-regular classes."""
    verts = [c for c in p_regular_classes(table, p) if c.size > 1]
    sizes = np.array([c.size for c in verts], dtype=np.int64)
    n = len(verts)
    adj = np.gcd.outer(sizes, sizes) > 1 if n else np.zeros((0, 0), dtype=bool)
    np.fill_diagonal(adj, False)
    hops = _kernels.active.all_pairs_bfs(np.ascontiguousarray(adj))
    dist = np.where(hops < 0, INF, hops.astype(float))
    comps: dict[int, list[int]] = {}
    for v in range(n):
        root = int(np.flatnonzero(np.isfinite(dist[v]))[0])
        comps.setdefault(root, []).append(v)
    return ClassGraph(table, p, verts, adj, dist, list(comps.values()))


def diameter(graph: ClassGraph):
    """Largest distance; ``inf`` when disconnected, ``None`` for the empty graph."""
    if len(graph) == 0:
        return None
    d = graph.dist.max()
    return INF if math.isinf(d) else int(d)


def diameter_json(graph: ClassGraph):
    d = diameter(graph)
    return "inf" if d == INF else d


def maximal_classes(graph: ClassGraph) -> list[int]:
    if len(graph) == 0:
        raise EmptyGraph("the graph has no vertices")
    top = max(graph.sizes)
    return [v for v, s in enumerate(graph.sizes) if s == top]


def eccentricity(graph: ClassGraph, v: int) -> float:
    return float(graph.dist[v].max())


def s_subgroup_mask(graph: ClassGraph, b0: int) -> tuple[np.ndarray, list[int]]:
    G = graph.group
    far = [graph.classes[v] for v in range(len(graph)) if graph.dist[b0, v] >= 2]
    seeds = np.concatenate([c.members for c in far]) if far else np.zeros(0, dtype=np.int64)
    return G.generate(seeds)


def s_subgroup(graph: ClassGraph, b0: int) -> Group:
    """The subgroup generated by all vertices at distance at least 2 from ``b0``."""
    mask, gens = s_subgroup_mask(graph, b0)
    return graph.group.subgroup(mask, gens)


def distance_pairs(graph: ClassGraph, d) -> list[tuple[int, int]]:
    n = len(graph)
    return [(i, j) for i in range(n) for j in range(i + 1, n) if graph.dist[i, j] == d]


def to_dot(graph: ClassGraph, name: str = "G") -> str:
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    lines = [f'graph "{escaped}" {{']
    for v, c in enumerate(graph.classes):
        lines.append(f'  v{v} [label="size={c.size} rep={c.rep.cycle_string()}"];')
    for (i, j), label in sorted(graph.edges.items()):
        lines.append(f'  v{i} -- v{j} [label="{",".join(map(str, label.sorted()))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(graph: ClassGraph) -> dict:
    return {
        "mode": "ordinary" if graph.prime is None else "p-regular",
        "prime": graph.prime,
        "vertices": [
            {"id": v, "class_index": c.index, "size": c.size,
             "rep": c.rep.cycle_string(), "primes": c.primes.sorted()}
            for v, c in enumerate(graph.classes)
        ],
        "edges": [{"u": i, "v": j, "primes": label.sorted()}
                  for (i, j), label in sorted(graph.edges.items())],
        "dist": [[None if math.isinf(x) else int(x) for x in row] for row in graph.dist],
        "components": graph.components,
        "diameter": diameter_json(graph),
    }


def dumps(graph: ClassGraph) -> str:
    return json.dumps(to_json(graph), sort_keys=True, indent=2) + "\n"
