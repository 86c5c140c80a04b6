"""Coupling graphs, greedy SWAP routing, and circuit statistics.

The router walks gates in program order; when a two-qubit gate spans
non-adjacent physical qubits it swaps the first operand along a BFS shortest
path (sorted neighbor expansion, so ties resolve toward lower indices) until
the pair touches.  Deterministic by construction — no randomized transpiler.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import networkx as nx

from .circuits import CliffordCircuit, Gate
from .errors import InvalidParameterError, RoutingError


class CouplingGraph:
    """Undirected connectivity over physical qubits 0..n-1."""

    def __init__(self, n_nodes: int, edges):
        self.graph = nx.Graph()
        self.graph.add_nodes_from(range(n_nodes))
        for u, v in edges:
            if not (0 <= u < n_nodes and 0 <= v < n_nodes) or u == v:
                raise InvalidParameterError(f"bad edge ({u}, {v})")
            self.graph.add_edge(u, v)

    @property
    def n_nodes(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def n_edges(self) -> int:
        return self.graph.number_of_edges()

    def has_edge(self, u: int, v: int) -> bool:
        return self.graph.has_edge(u, v)

    def degree(self, u: int) -> int:
        return self.graph.degree[u]

    def max_degree(self) -> int:
        return max(d for _, d in self.graph.degree)

    def neighbors(self, u: int) -> list[int]:
        return sorted(self.graph.neighbors(u))

    def shortest_path(self, src: int, dst: int) -> list[int] | None:
        """BFS path src -> dst; neighbor expansion in index order makes the
        result deterministic and biased toward low indices."""
        if src == dst:
            return [src]
        parent = {src: None}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in sorted(self.graph.neighbors(u)):
                if v not in parent:
                    parent[v] = u
                    if v == dst:
                        path = [v]
                        while parent[path[-1]] is not None:
                            path.append(parent[path[-1]])
                        return path[::-1]
                    queue.append(v)
        return None

    def to_edge_list_text(self) -> str:
        lines = [f"{u} {v}" for u, v in sorted(map(sorted, self.graph.edges))]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list_text(cls, text: str) -> "CouplingGraph":
        edges = []
        for ln in text.splitlines():
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            u, v = (int(tok) for tok in ln.split())
            edges.append((u, v))
        if not edges:
            raise InvalidParameterError("edge list is empty")
        n = max(max(u, v) for u, v in edges) + 1
        return cls(n, edges)


def heavy_hex_graph(rows: int, cols: int) -> CouplingGraph:
    """Heavy-hex tiling: a hexagonal lattice with one extra qubit on every
    edge.  Nodes are renumbered deterministically (lattice vertices in sorted
    label order, then edge qubits in sorted edge order); max degree 3."""
    if rows < 1 or cols < 1:
        raise InvalidParameterError("rows and cols must be >= 1")
    base = nx.hexagonal_lattice_graph(rows, cols)
    index = {node: i for i, node in enumerate(sorted(base.nodes()))}
    n = len(index)
    edges = []
    for u, v in sorted((min(index[a], index[b]), max(index[a], index[b]))
                       for a, b in base.edges()):
        mid = n
        n += 1
        edges.append((u, mid))
        edges.append((mid, v))
    return CouplingGraph(n, edges)


def find_line(graph: CouplingGraph, length: int) -> list[int] | None:
    """First simple path with `length` nodes, by DFS with sorted neighbor
    order (deterministic); None if no such path exists."""

    def dfs(path: list[int], seen: set[int]) -> list[int] | None:
        if len(path) == length:
            return path
        for v in graph.neighbors(path[-1]):
            if v not in seen:
                found = dfs(path + [v], seen | {v})
                if found:
                    return found
        return None

    for start in range(graph.n_nodes):
        found = dfs([start], {start})
        if found:
            return found
    return None


@dataclass(frozen=True)
class RoutedCircuit:
    circuit: CliffordCircuit
    initial_layout: tuple[int, ...]
    final_layout: tuple[int, ...]
    swap_count: int


def route_circuit(
    circuit: CliffordCircuit,
    graph: CouplingGraph,
    initial_layout: list[int] | tuple[int, ...] | None = None,
) -> RoutedCircuit:
    """Map a circuit onto the coupling graph, inserting SWAPs greedily.

    The returned circuit acts on physical indices; measurements list
    physical qubits in logical order, so measured bit columns keep their
    logical meaning.  final_layout[q] is where logical q ends up.
    """
    n_log = circuit.n_qubits
    if initial_layout is None:
        initial_layout = tuple(range(n_log))
    layout = list(initial_layout)
    if len(layout) != n_log:
        raise InvalidParameterError("layout size must equal circuit width")
    if len(set(layout)) != n_log:
        raise InvalidParameterError("layout must be injective")
    if any(not 0 <= p < graph.n_nodes for p in layout):
        raise InvalidParameterError("layout maps outside the graph")

    log_at = {p: q for q, p in enumerate(layout)}  # physical -> logical
    routed = CliffordCircuit(graph.n_nodes)
    swaps = 0

    def do_swap(pa: int, pb: int):
        nonlocal swaps
        routed.append("SWAP", pa, pb)
        swaps += 1
        qa, qb = log_at.get(pa), log_at.get(pb)
        if qa is not None:
            layout[qa] = pb
        if qb is not None:
            layout[qb] = pa
        log_at.pop(pa, None)
        log_at.pop(pb, None)
        if qa is not None:
            log_at[pb] = qa
        if qb is not None:
            log_at[pa] = qb

    measured: list[int] = []
    for moment in circuit.moments:
        for g in moment:
            if g.name == "M":
                measured.extend(g.qubits)
                continue
            if len(g.qubits) == 1:
                routed.append(g.name, layout[g.qubits[0]])
                continue
            a, b = g.qubits
            while not graph.has_edge(layout[a], layout[b]):
                path = graph.shortest_path(layout[a], layout[b])
                if path is None:
                    raise RoutingError(
                        f"no path between physical {layout[a]} and {layout[b]}"
                    )
                do_swap(path[0], path[1])
            routed.append(g.name, layout[a], layout[b])
    if measured:
        routed.append("M", *(layout[q] for q in measured))

    return RoutedCircuit(
        circuit=routed,
        initial_layout=tuple(initial_layout),
        final_layout=tuple(layout),
        swap_count=swaps,
    )


def expand_swaps(circuit: CliffordCircuit) -> CliffordCircuit:
    """Rewrite each SWAP as its 3-CX decomposition (ASAP-repacked)."""
    out = CliffordCircuit(circuit.n_qubits)
    for moment in circuit.moments:
        for g in moment:
            if g.name == "SWAP":
                a, b = g.qubits
                out.append("CX", a, b)
                out.append("CX", b, a)
                out.append("CX", a, b)
            elif g.name == "M":
                out.append("M", *g.qubits)
            else:
                out.append(g.name, *g.qubits)
    return out


def circuit_stats(circuit: CliffordCircuit, mode: str = "native-CZ") -> dict:
    """Gate/depth statistics.

    native-CZ counts every two-qubit gate (including SWAP) once on the
    circuit as compiled; native-CX decomposes SWAPs into 3 CX first, so both
    the count and the depth reflect a CX-native target.
    """
    if mode not in ("native-CZ", "native-CX"):
        raise InvalidParameterError(f"unknown stats mode {mode!r}")
    target = expand_swaps(circuit) if mode == "native-CX" else circuit
    histogram: dict[str, int] = {}
    swap_count = 0
    two_qubit = 0
    for moment in circuit.moments:
        for g in moment:
            histogram[g.name] = histogram.get(g.name, 0) + 1
            if g.name == "SWAP":
                swap_count += 1
    for moment in target.moments:
        for g in moment:
            if g.name in ("CX", "CZ", "SWAP"):
                two_qubit += 1
    return {
        "two_qubit_count": two_qubit,
        "depth": target.depth,
        "swap_count": swap_count,
        "gate_histogram": histogram,
        "mode": mode,
    }
