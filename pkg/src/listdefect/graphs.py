"""Graph, instance and coloring data model plus the validity checkers.

Colors are nonnegative integers with the usual total order; proximity
between two colors x, y is |x - y|.  Graphs are simple and undirected;
an optional orientation assigns each undirected edge exactly one
direction.  By convention beta(v) is max(1, outdegree(v)), so degree
formulas never divide by zero even for sinks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    ColorNotInList,
    InvalidGraph,
    InvalidInstance,
    MissingColor,
    MissingOrientation,
)

FLAVOR_DEFECTIVE = "defective"
FLAVOR_ORIENTED = "oriented"
FLAVOR_ARBDEFECTIVE = "arbdefective"
FLAVORS = (FLAVOR_DEFECTIVE, FLAVOR_ORIENTED, FLAVOR_ARBDEFECTIVE)


@dataclass(frozen=True)
class ColoredGraph:
    """Simple graph with an initial proper coloring and optional orientation.

    Attributes:
        n: node count; nodes are 0..n-1.
        adjacency: sorted neighbor tuple per node.
        out_neighbors: sorted out-neighbor tuple per node, or None when the
            graph carries no orientation.
        init_colors: per-node color of the initial proper m-coloring,
            values in 0..m-1.
        m: palette size of the initial coloring.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    out_neighbors: Optional[tuple[tuple[int, ...], ...]]
    init_colors: tuple[int, ...]
    m: int

    # -- construction -----------------------------------------------------

    @staticmethod
    def build(
        n: int,
        edges: Iterable[tuple[int, int]],
        orientation: Optional[Iterable[tuple[int, int]]] = None,
        init_colors: Optional[Sequence[int]] = None,
        m: Optional[int] = None,
    ) -> "ColoredGraph":
        """Validate and freeze a graph.

        ``orientation``, when given, must contain every undirected edge
        exactly once as a directed pair.  ``init_colors`` defaults to the
        identity (unique ids treated as an n-coloring).
        """
        if n < 0:
            raise InvalidGraph("negative node count")
        edge_set: set[tuple[int, int]] = set()
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidGraph(f"edge ({u},{v}) out of range")
            if u == v:
                raise InvalidGraph(f"self-loop at {u}")
            key = (min(u, v), max(u, v))
            if key in edge_set:
                raise InvalidGraph(f"multi-edge {key}")
            edge_set.add(key)
            adj[u].append(v)
            adj[v].append(u)

        out: Optional[tuple[tuple[int, ...], ...]] = None
        if orientation is not None:
            directed = list(orientation)
            seen: set[tuple[int, int]] = set()
            outl: list[list[int]] = [[] for _ in range(n)]
            for u, v in directed:
                key = (min(u, v), max(u, v))
                if key not in edge_set:
                    raise InvalidGraph(f"oriented pair ({u},{v}) is not an edge")
                if key in seen:
                    raise InvalidGraph(f"edge {key} oriented twice")
                seen.add(key)
                outl[u].append(v)
            if len(seen) != len(edge_set):
                raise InvalidGraph("orientation does not cover every edge")
            out = tuple(tuple(sorted(x)) for x in outl)

        if init_colors is None:
            init_colors = tuple(range(n))
            m_eff = n if m is None else m
        else:
            init_colors = tuple(init_colors)
            if len(init_colors) != n:
                raise InvalidGraph("init_colors length mismatch")
            m_eff = (max(init_colors) + 1 if n else 0) if m is None else m
        for u in range(n):
            for v in adj[u]:
                if u < v and init_colors[u] == init_colors[v]:
                    raise InvalidGraph(f"init coloring not proper on edge ({u},{v})")
            if n and not (0 <= init_colors[u] < m_eff):
                raise InvalidGraph(f"init color of {u} outside [0,{m_eff})")

        return ColoredGraph(
            n=n,
            adjacency=tuple(tuple(sorted(x)) for x in adj),
            out_neighbors=out,
            init_colors=init_colors,
            m=max(1, m_eff),
        )

    # -- basic queries -----------------------------------------------------

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def outdegree(self, v: int) -> int:
        if self.out_neighbors is None:
            raise MissingOrientation("graph has no orientation")
        return len(self.out_neighbors[v])

    def beta(self, v: int) -> int:
        """max(1, outdegree(v)); sinks count as 1."""
        return max(1, self.outdegree(v))

    def max_beta(self) -> int:
        return max((self.beta(v) for v in range(self.n)), default=1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def oriented_edges(self) -> list[tuple[int, int]]:
        if self.out_neighbors is None:
            raise MissingOrientation("graph has no orientation")
        return [(u, v) for u in range(self.n) for v in self.out_neighbors[u]]

    def subgraph(self, nodes: Sequence[int]) -> tuple["ColoredGraph", list[int]]:
        """Induced subgraph; returns (graph, original-id list).

        The orientation (if any) and initial colors are inherited; the
        initial coloring stays proper on any induced subgraph.
        """
        keep = sorted(set(nodes))
        index = {u: i for i, u in enumerate(keep)}
        edges = [
            (index[u], index[v])
            for u in keep
            for v in self.adjacency[u]
            if u < v and v in index
        ]
        ori = None
        if self.out_neighbors is not None:
            ori = [
                (index[u], index[v])
                for u in keep
                for v in self.out_neighbors[u]
                if v in index
            ]
        g = ColoredGraph.build(
            len(keep),
            edges,
            orientation=ori,
            init_colors=[self.init_colors[u] for u in keep],
            m=self.m,
        )
        return g, keep


@dataclass(frozen=True)
class LdcInstance:
    """A list defective coloring instance over a ColoredGraph.

    ``defects[v]`` maps every color of ``lists[v]`` to its allowed defect.
    ``g`` is the proximity radius: colors x, y conflict when |x - y| <= g;
    g = 0 is the standard problem.  The color space may be any finite set
    of nonnegative integers, not necessarily contiguous; with g > 0 the
    semantics depend on the actual color values.
    """

    color_space: tuple[int, ...]
    lists: tuple[tuple[int, ...], ...]
    defects: tuple[Mapping[int, int], ...]
    flavor: str = FLAVOR_DEFECTIVE
    g: int = 0

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise InvalidInstance(f"unknown flavor {self.flavor!r}")
        if self.g < 0:
            raise InvalidInstance("negative proximity g")
        space = set(self.color_space)
        if len(space) != len(self.color_space):
            raise InvalidInstance("color space has duplicates")
        if any(c < 0 for c in self.color_space):
            raise InvalidInstance("colors must be nonnegative integers")
        for v, lst in enumerate(self.lists):
            if len(set(lst)) != len(lst):
                raise InvalidInstance(f"list of node {v} has duplicates")
            if not set(lst) <= space:
                raise InvalidInstance(f"list of node {v} leaves the color space")
            if set(self.defects[v]) != set(lst):
                raise InvalidInstance(f"defect domain of node {v} differs from its list")
            if any(d < 0 for d in self.defects[v].values()):
                raise InvalidInstance(f"negative defect at node {v}")

    @staticmethod
    def build(
        color_space: Iterable[int],
        lists: Iterable[Iterable[int]],
        defects: Iterable[Mapping[int, int]],
        flavor: str = FLAVOR_DEFECTIVE,
        g: int = 0,
    ) -> "LdcInstance":
        return LdcInstance(
            color_space=tuple(sorted(set(color_space))),
            lists=tuple(tuple(sorted(set(l))) for l in lists),
            defects=tuple(dict(sorted(d.items())) for d in defects),
            flavor=flavor,
            g=g,
        )

    @property
    def max_list_size(self) -> int:
        """Lambda, the maximum list size."""
        return max((len(l) for l in self.lists), default=0)

    def n(self) -> int:
        return len(self.lists)


@dataclass(frozen=True)
class ColoringOutput:
    """Colors chosen per node, plus the output orientation for arbdefective runs."""

    colors: tuple[Optional[int], ...]
    orientation_out: Optional[tuple[tuple[int, int], ...]] = None

    def total(self) -> bool:
        return all(c is not None for c in self.colors)


@dataclass(frozen=True)
class ValidityReport:
    valid: bool
    conflicts: tuple[int, ...]
    flavor: str
    g: int

    def violating_nodes(self) -> list[int]:
        return [v for v, bad in enumerate(self._over) if bad]

    _over: tuple[bool, ...] = field(default=(), repr=False)


def _out_lists(graph: ColoredGraph, inst: LdcInstance, out: ColoringOutput):
    """Relevant-neighbor lists for the instance flavor."""
    if inst.flavor == FLAVOR_DEFECTIVE:
        return graph.adjacency
    if inst.flavor == FLAVOR_ORIENTED:
        if graph.out_neighbors is None:
            raise MissingOrientation("oriented instance on an unoriented graph")
        return graph.out_neighbors
    # arbdefective: orientation is part of the output
    if out.orientation_out is None:
        raise MissingOrientation("arbdefective output carries no orientation")
    outl: list[list[int]] = [[] for _ in range(graph.n)]
    seen: set[tuple[int, int]] = set()
    edge_set = {(min(u, v), max(u, v)) for u, v in graph.edges()}
    for u, v in out.orientation_out:
        key = (min(u, v), max(u, v))
        if key not in edge_set:
            raise MissingOrientation(f"output orients non-edge ({u},{v})")
        if key in seen:
            raise MissingOrientation(f"output orients edge {key} twice")
        seen.add(key)
        outl[u].append(v)
    if len(seen) != len(edge_set):
        raise MissingOrientation("output orientation does not cover every edge")
    return tuple(tuple(sorted(x)) for x in outl)


def validate_ldc(graph: ColoredGraph, inst: LdcInstance, out: ColoringOutput) -> ValidityReport:
    """Check a coloring output against the instance.

    Counts, for every node v, the relevant neighbors u with
    |color(u) - color(v)| <= g, and compares against d_v(color(v)).
    Relevant means: all neighbors (defective), out-neighbors of the input
    orientation (oriented), or out-neighbors of the output orientation
    (arbdefective).
    """
    if len(out.colors) != graph.n:
        raise InvalidInstance("output length mismatch")
    for v, c in enumerate(out.colors):
        if c is None:
            raise MissingColor(f"node {v} is uncolored")
        if c not in inst.defects[v]:
            raise ColorNotInList(f"node {v} colored {c}, not in its list")
    relevant = _out_lists(graph, inst, out)
    conflicts = []
    over = []
    for v in range(graph.n):
        cv = out.colors[v]
        cnt = sum(1 for u in relevant[v] if abs(out.colors[u] - cv) <= inst.g)
        conflicts.append(cnt)
        over.append(cnt > inst.defects[v][cv])
    return ValidityReport(
        valid=not any(over),
        conflicts=tuple(conflicts),
        flavor=inst.flavor,
        g=inst.g,
        _over=tuple(over),
    )


def check_existence_condition(graph: ColoredGraph, inst: LdcInstance) -> list[bool]:
    """Per-node existence condition for the sequential solvers.

    defective: sum over the list of (d_v(x)+1)  > deg(v)
    arbdefective: sum over the list of (2 d_v(x)+1) > deg(v)

    All-true implies solvability by the corresponding sequential algorithm.
    """
    if inst.flavor == FLAVOR_DEFECTIVE:
        return [
            sum(d + 1 for d in inst.defects[v].values()) > graph.degree(v)
            for v in range(graph.n)
        ]
    if inst.flavor == FLAVOR_ARBDEFECTIVE:
        return [
            sum(2 * d + 1 for d in inst.defects[v].values()) > graph.degree(v)
            for v in range(graph.n)
        ]
    raise InvalidInstance("existence condition only defined for defective/arbdefective")


# -- JSON instance schema --------------------------------------------------
#
# {n, edges: [[u,v]...], orientation: [[u,v]...]?, init_colors: [...], m,
#  color_space: [...], lists: [[...]...], defects: [{color: d, ...}...],
#  flavor, g}


def instance_to_json(graph: ColoredGraph, inst: LdcInstance) -> str:
    doc = {
        "n": graph.n,
        "edges": [[u, v] for u, v in graph.edges()],
        "init_colors": list(graph.init_colors),
        "m": graph.m,
        "color_space": list(inst.color_space),
        "lists": [list(l) for l in inst.lists],
        "defects": [{str(c): d for c, d in sorted(dv.items())} for dv in inst.defects],
        "flavor": inst.flavor,
        "g": inst.g,
    }
    if graph.out_neighbors is not None:
        doc["orientation"] = [[u, v] for u, v in graph.oriented_edges()]
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def instance_from_json(text: str) -> tuple[ColoredGraph, LdcInstance]:
    doc = json.loads(text)
    graph = ColoredGraph.build(
        doc["n"],
        [tuple(e) for e in doc["edges"]],
        orientation=[tuple(e) for e in doc["orientation"]] if "orientation" in doc else None,
        init_colors=doc["init_colors"],
        m=doc["m"],
    )
    inst = LdcInstance.build(
        doc["color_space"],
        doc["lists"],
        [{int(c): d for c, d in dv.items()} for dv in doc["defects"]],
        flavor=doc["flavor"],
        g=doc["g"],
    )
    if inst.n() != graph.n:
        raise InvalidInstance("lists length does not match node count")
    return graph, inst
