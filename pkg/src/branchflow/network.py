"""Rooted-tree network model, validation, and the network file format.

A network is a directed tree: one reservoir (the root) plus ``nd`` demand
nodes, each fed by exactly one pipe, so the pipe count ``np`` equals ``nd``.
After parsing, pipes are renumbered canonically so that pipe ``i`` terminates
at node ``i``; all downstream/upstream queries and the hydraulic kernel rely
on that convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ParseError, ValidationError

__all__ = [
    "NodeRecord",
    "ReservoirRecord",
    "PipeRecord",
    "TreeNetwork",
    "validate_tree",
    "canonicalize",
    "parse_network",
    "serialize_network",
    "downstream_nodes",
    "path_to_root",
]


@dataclass(frozen=True)
class NodeRecord:
    """A demand node: ground elevation (m) and water demand (m3/day)."""

    id: str
    elevation: float
    demand: float

    def __post_init__(self):
        if not math.isfinite(self.elevation):
            raise ValueError(f"node {self.id}: elevation must be finite")
        if not (math.isfinite(self.demand) and self.demand >= 0):
            raise ValueError(f"node {self.id}: demand must be >= 0")


@dataclass(frozen=True)
class ReservoirRecord:
    """The fixed-head source node; its elevation sets the available head."""

    id: str
    elevation: float

    def __post_init__(self):
        if not math.isfinite(self.elevation):
            raise ValueError(f"reservoir {self.id}: elevation must be finite")


@dataclass(frozen=True)
class PipeRecord:
    """A directed pipe from its upstream node to its downstream node."""

    id: str
    upstream: str
    downstream: str
    length: float

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length > 0):
            raise ValueError(f"pipe {self.id}: length must be > 0")
        if self.upstream == self.downstream:
            raise ValueError(f"pipe {self.id}: upstream equals downstream")


@dataclass(frozen=True)
class TreeNetwork:
    """Immutable rooted tree.

    The container itself does not enforce the tree property; use
    ``parse_network`` / ``canonicalize`` to obtain validated, canonically
    numbered instances. Derived array accessors assume canonical numbering
    (pipe ``i`` ends at node ``i``, 0-based).
    """

    reservoir: ReservoirRecord
    nodes: tuple[NodeRecord, ...]
    pipes: tuple[PipeRecord, ...]

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def pipe_count(self) -> int:
        return len(self.pipes)

    @cached_property
    def demands(self) -> np.ndarray:
        """Nodal demands (m3/day), node order."""
        a = np.array([n.demand for n in self.nodes], dtype=float)
        a.setflags(write=False)
        return a

    @cached_property
    def elevations(self) -> np.ndarray:
        """Nodal ground elevations (m), node order."""
        a = np.array([n.elevation for n in self.nodes], dtype=float)
        a.setflags(write=False)
        return a

    @cached_property
    def lengths(self) -> np.ndarray:
        """Pipe lengths (m), pipe order."""
        a = np.array([p.length for p in self.pipes], dtype=float)
        a.setflags(write=False)
        return a

    @cached_property
    def _node_index(self) -> dict[str, int]:
        return {n.id: i for i, n in enumerate(self.nodes)}

    @cached_property
    def parent_node(self) -> np.ndarray:
        """For each node, the index of its upstream node (-1 = reservoir)."""
        idx = self._node_index
        a = np.array(
            [-1 if p.upstream == self.reservoir.id else idx[p.upstream] for p in self.pipes],
            dtype=int,
        )
        a.setflags(write=False)
        return a

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        """For each node, the indices of nodes fed directly from it."""
        kids: list[list[int]] = [[] for _ in self.nodes]
        for j, p in enumerate(self.parent_node):
            if p >= 0:
                kids[p].append(j)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def root_children(self) -> tuple[int, ...]:
        """Indices of nodes fed directly from the reservoir."""
        return tuple(int(j) for j in np.flatnonzero(self.parent_node == -1))

    @property
    def parent_pipe(self) -> dict[str, str]:
        """Map node id -> id of its unique incoming pipe."""
        return {self.nodes[i].id: self.pipes[i].id for i in range(self.node_count)}

    def node_index(self, node_id: str) -> int:
        return self._node_index[node_id]

    def pipe_index(self, pipe_id: str) -> int:
        for i, p in enumerate(self.pipes):
            if p.id == pipe_id:
                return i
        raise KeyError(pipe_id)


def validate_tree(network: TreeNetwork) -> None:
    """Check the rooted-tree property, raising ValidationError on the first violation.

    Accepts iff the graph is connected, acyclic, rooted at the reservoir with
    all edges directed away from it, and every demand node has exactly one
    incoming pipe. Works on the raw records, so it may be called on networks
    that are not yet canonically numbered.
    """
    root = network.reservoir.id
    known = {root} | {n.id for n in network.nodes}
    if len(known) != len(network.nodes) + 1:
        raise ValidationError("multiple_roots", "duplicate node ids in network")

    incoming: dict[str, list[str]] = {n.id: [] for n in network.nodes}
    outgoing: dict[str, list[str]] = {nid: [] for nid in known}
    for p in network.pipes:
        if p.upstream not in known:
            raise ValidationError("disconnected", f"pipe {p.id}: unknown upstream node {p.upstream}")
        if p.downstream not in known:
            raise ValidationError("disconnected", f"pipe {p.id}: unknown downstream node {p.downstream}")
        if p.downstream == root:
            raise ValidationError("cycle", f"pipe {p.id} flows into the reservoir")
        incoming[p.downstream].append(p.id)
        outgoing[p.upstream].append(p.downstream)

    for n in network.nodes:
        feeds = incoming[n.id]
        if len(feeds) > 1:
            raise ValidationError(
                "multiple_incoming",
                f"node {n.id} has {len(feeds)} incoming pipes ({', '.join(feeds)})",
            )
        if not feeds:
            if outgoing[n.id]:
                raise ValidationError("multiple_roots", f"node {n.id} has no supply but feeds others")
            raise ValidationError("disconnected", f"node {n.id} is not connected to the reservoir")

    # Every node has exactly one incoming pipe here; walk upstream to detect cycles.
    parent = {p.downstream: p.upstream for p in network.pipes}
    reached: set[str] = {root}
    for n in network.nodes:
        trail = []
        cur = n.id
        while cur not in reached:
            trail.append(cur)
            cur = parent[cur]
            if cur in trail:
                raise ValidationError("cycle", f"cycle through node {cur}")
        reached.update(trail)


def canonicalize(network: TreeNetwork) -> TreeNetwork:
    """Validate and renumber so that pipe ``i`` terminates at node ``i``.

    Node order is preserved; pipes are permuted to match it.
    """
    validate_tree(network)
    by_downstream = {p.downstream: p for p in network.pipes}
    pipes = tuple(by_downstream[n.id] for n in network.nodes)
    return TreeNetwork(network.reservoir, network.nodes, pipes)


def downstream_nodes(network: TreeNetwork, pipe: int) -> frozenset[int]:
    """Node indices supplied through the given pipe (its own end node included)."""
    if not 0 <= pipe < network.pipe_count:
        raise IndexError(f"pipe index {pipe} out of range")
    out = []
    stack = [pipe]  # pipe i ends at node i
    while stack:
        v = stack.pop()
        out.append(v)
        stack.extend(network.children[v])
    return frozenset(out)


def path_to_root(network: TreeNetwork, node: int) -> list[int]:
    """Pipe indices on the reservoir-to-node path, reservoir end first."""
    if not 0 <= node < network.node_count:
        raise IndexError(f"node index {node} out of range")
    path = []
    cur = node
    while cur >= 0:
        path.append(cur)  # node j is fed by pipe j
        cur = int(network.parent_node[cur])
    path.reverse()
    return path


_SECTIONS = ("[reservoir]", "[nodes]", "[pipes]")


def parse_network(text: str) -> TreeNetwork:
    """Parse the network file format into a validated, canonical TreeNetwork.

    The format is line oriented UTF-8; ``#`` starts a comment. Three sections
    appear in fixed order. ``[reservoir]`` holds ``id <symbol>`` and
    ``elevation_m <decimal>`` lines; ``[nodes]`` holds one
    ``id elevation_m demand_m3_per_day`` line per node; ``[pipes]`` holds one
    ``id from_node to_node length_m`` line per pipe.
    """
    section = None
    seen: list[str] = []
    res_fields: dict[str, str] = {}
    res_line = 0
    nodes: list[NodeRecord] = []
    pipes: list[PipeRecord] = []
    node_ids: set[str] = set()
    pipe_ids: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line not in _SECTIONS:
                raise ParseError(f"unknown section {line}", lineno)
            if seen and _SECTIONS.index(line) <= _SECTIONS.index(seen[-1]):
                raise ParseError(f"section {line} out of order", lineno)
            seen.append(line)
            section = line
            continue
        if section is None:
            raise ParseError("content before [reservoir] section", lineno)

        fields = line.split()
        if section == "[reservoir]":
            if len(fields) != 2 or fields[0] not in ("id", "elevation_m"):
                raise ParseError("expected 'id <symbol>' or 'elevation_m <decimal>'", lineno)
            if fields[0] in res_fields:
                raise ParseError(f"duplicate reservoir field {fields[0]}", lineno)
            res_fields[fields[0]] = fields[1]
            res_line = lineno
        elif section == "[nodes]":
            if len(fields) != 3:
                raise ParseError("expected 'id elevation_m demand_m3_per_day'", lineno)
            if fields[0] in node_ids:
                raise ParseError(f"duplicate node id {fields[0]}", lineno)
            try:
                node = NodeRecord(fields[0], _decimal(fields[1]), _decimal(fields[2]))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from exc
            nodes.append(node)
            node_ids.add(node.id)
        else:
            if len(fields) != 4:
                raise ParseError("expected 'id from_node to_node length_m'", lineno)
            if fields[0] in pipe_ids:
                raise ParseError(f"duplicate pipe id {fields[0]}", lineno)
            try:
                pipe = PipeRecord(fields[0], fields[1], fields[2], _decimal(fields[3]))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from exc
            pipes.append(pipe)
            pipe_ids.add(pipe.id)

    if "[reservoir]" not in seen:
        raise ParseError("missing [reservoir] section")
    for key in ("id", "elevation_m"):
        if key not in res_fields:
            raise ParseError(f"reservoir section missing '{key}'", res_line or None)
    try:
        reservoir = ReservoirRecord(res_fields["id"], _decimal(res_fields["elevation_m"]))
    except ValueError as exc:
        raise ParseError(str(exc), res_line or None) from exc
    if "[nodes]" not in seen or not nodes:
        raise ParseError("missing or empty [nodes] section")
    if "[pipes]" not in seen or not pipes:
        raise ParseError("missing or empty [pipes] section")
    if reservoir.id in node_ids:
        raise ParseError(f"reservoir id {reservoir.id} reused by a node")

    return canonicalize(TreeNetwork(reservoir, tuple(nodes), tuple(pipes)))


def _decimal(token: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ValueError(f"not a decimal number: {token!r}") from None


def serialize_network(network: TreeNetwork) -> str:
    """Render the network file format. Inverse of ``parse_network`` on canonical networks."""
    if getattr(network, "reservoir", None) is None:
        raise ValueError("network has no reservoir")
    lines = [
        "[reservoir]",
        f"id {network.reservoir.id}",
        f"elevation_m {_fmt(network.reservoir.elevation)}",
        "",
        "[nodes]",
        "# id elevation_m demand_m3_per_day",
    ]
    lines += [f"{n.id} {_fmt(n.elevation)} {_fmt(n.demand)}" for n in network.nodes]
    lines += ["", "[pipes]", "# id from_node to_node length_m"]
    lines += [
        f"{p.id} {p.upstream} {p.downstream} {_fmt(p.length)}" for p in network.pipes
    ]
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return repr(float(x))
