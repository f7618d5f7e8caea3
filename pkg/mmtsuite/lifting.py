"""
Flow decomposition and the maps between multi-material networks and labeled networks.

``lift`` splits every material flow into unit source-to-sink paths and gives each path its own label;
``project`` sums the labels of each material back, after stripping per-label cycles.
"""
from typing import List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .constants import GEOM_TOL
from .errors import ValidationError
from .log import logger
from .model import Boundary, Edge, LabeledNetwork, Network, _Current, boundary_of
from .norm import LabelLayout, check_sigma
from .types import Point, Sigma


class FlowPath(NamedTuple):
    vertices: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    """``(edge index, +1 or -1)``: the sign tells whether the edge is walked tail to head."""


class Decomposition(NamedTuple):
    paths: Tuple[FlowPath, ...]
    cycles: Tuple[FlowPath, ...]


def _divergence(n_vertices: int, edges: Sequence[Edge], flows: Sequence[int]) -> np.ndarray:
    div = np.zeros(n_vertices, dtype=int)
    for e, f in zip(edges, flows):
        div[e.tail] -= f
        div[e.head] += f
    return div


def _decompose(n_vertices: int, edges: Sequence[Edge], flows: Sequence[int],
               sources: Optional[Sequence[int]] = None) -> Decomposition:
    """
    Unit-path decomposition of an integer flow on a graph.

    Paths start from ``sources`` (default: every producing vertex in index order, repeated by its
    production) and always leave through the lowest-index edge still carrying flow in the walking
    direction. A walk that revisits a vertex sheds the closed loop as a cycle. What remains after all
    paths is a circulation, peeled into cycles the same way.
    """
    residual = [int(f) for f in flows]
    incident: List[List[int]] = [[] for _ in range(n_vertices)]
    for k, e in enumerate(edges):
        incident[e.tail].append(k)
        incident[e.head].append(k)

    def next_arc(v: int) -> Optional[Tuple[int, int, int]]:
        for k in incident[v]:
            e = edges[k]
            if e.tail == v and residual[k] > 0:
                return k, 1, e.head
            if e.head == v and residual[k] < 0:
                return k, -1, e.tail
        return None

    div = _divergence(n_vertices, edges, flows)
    if sources is None:
        sources = [v for v in range(n_vertices) for _ in range(max(-div[v], 0))]
    demand = np.maximum(div, 0)
    paths: List[FlowPath] = []
    cycles: List[FlowPath] = []

    for s in sources:
        vertices, walked, position = [s], [], {s: 0}
        v = s
        while demand[v] <= 0:
            arc = next_arc(v)
            if arc is None:
                raise ValidationError(f"flow_decompose: flow stops at vertex {v} without reaching a sink")
            k, sign, w = arc
            residual[k] -= sign
            walked.append((k, sign))
            if w in position:
                start = position[w]
                cycles.append(FlowPath(tuple(vertices[start:]) + (w,), tuple(walked[start:])))
                for u in vertices[start + 1:]:
                    del position[u]
                vertices, walked = vertices[:start + 1], walked[:start]
            else:
                position[w] = len(vertices)
                vertices.append(w)
            v = w
        demand[v] -= 1
        paths.append(FlowPath(tuple(vertices), tuple(walked)))

    for first in range(len(edges)):
        while residual[first] != 0:
            v = edges[first].tail if residual[first] > 0 else edges[first].head
            vertices, walked, position = [v], [], {v: 0}
            while True:
                arc = next_arc(v)
                if arc is None:
                    raise ValidationError(f"flow_decompose: leftover flow is not a circulation at vertex {v}")
                k, sign, w = arc
                walked.append((k, sign))
                if w in position:
                    start = position[w]
                    loop = tuple(walked[start:])
                    for k2, s2 in loop:
                        residual[k2] -= s2
                    cycles.append(FlowPath(tuple(vertices[start:]) + (w,), loop))
                    break
                position[w] = len(vertices)
                vertices.append(w)
                v = w
    return Decomposition(tuple(paths), tuple(cycles))


def flow_decompose(net: _Current, material: int) -> Decomposition:
    """
    Decompose one coordinate of a network's flow into unit source-to-sink paths and cycles.

    :param net:      Network or labeled network.
    :param material: Coordinate to decompose.
    """
    if not 0 <= material < net.rank:
        raise ValidationError(f"flow_decompose: no component {material}")
    return _decompose(len(net.vertices), net.edges, net.component(material))


def _superpose(n_edges: int, paths: Sequence[FlowPath]) -> np.ndarray:
    flow = np.zeros(n_edges, dtype=int)
    for p in paths:
        for k, sign in p.edges:
            flow[k] += sign
    return flow


def _with_flows(net: _Current, flows: np.ndarray, rank: int, kind: type) -> _Current:
    edges = [(e.tail, e.head, tuple(int(c) for c in flows[k])) for k, e in enumerate(net.edges)]
    return kind.create(net.vertices, edges, rank)


def remove_cycles(net: Network) -> Network:
    """
    Keep only the path part of every material's decomposition; vertices are left as they are.
    Superposed paths can close a new cycle, so this repeats until no material sheds one.
    """
    while True:
        parts = [flow_decompose(net, i) for i in range(net.materials)]
        if not any(p.cycles for p in parts):
            return net
        flows = np.stack([_superpose(len(net.edges), p.paths) for p in parts], axis=1)
        net = _with_flows(net, flows, net.materials, Network)  # type: ignore


def is_forest_per_component(net: _Current) -> Tuple[bool, ...]:
    """Whether the support of each component is a forest."""
    out = []
    for i in range(net.rank):
        g = nx.Graph()
        g.add_edges_from((e.tail, e.head) for e in net.edges if e.multiplicity[i])
        out.append(g.number_of_nodes() == 0 or nx.is_forest(g))
    return tuple(out)


def _vertex_at(net: _Current, point: Point) -> int:
    for v, p in enumerate(net.vertices):
        if np.linalg.norm(np.subtract(p, point)) <= GEOM_TOL:
            return v
    raise ValidationError(f"no vertex at boundary point {point}")


def lift(net: Network, layout: LabelLayout) -> Tuple[LabeledNetwork, Sigma]:
    """
    Give every unit path of every material its own label.

    The k-th path of material ``i`` starts at the source of label ``offsets[i] + k``; its end point
    determines the relabelling ``sigma``. Cycles are dropped, so every edge of the projected result
    carries a multiplicity below the original one in the partial order; a forest projects back to itself.

    :param net:    Network whose boundary equals the layout's boundary.
    :param layout: Label layout.

    :return:       Labeled network with boundary ``boundary_sigma(layout, sigma)`` and ``sigma``.
    """
    if net.materials != layout.materials or not boundary_of(net).same_as(layout.boundary):
        raise ValidationError("lift: network boundary does not match the layout")
    if layout.total == 0:
        raise ValidationError("lift: boundary has no labels")
    atoms = layout.boundary.atoms
    vertex_of_atom = [_vertex_at(net, a.point) for a in atoms]
    atom_of_vertex = {v: k for k, v in enumerate(vertex_of_atom)}

    flows = np.zeros((len(net.edges), layout.total), dtype=int)
    sigma = []
    for i in range(layout.materials):
        group = layout.group(i)
        sources = [vertex_of_atom[layout.sources[j]] for j in group]
        decomposition = _decompose(len(net.vertices), net.edges, net.component(i), sources)
        if decomposition.cycles:
            logger.debug(f"lift: dropping {len(decomposition.cycles)} cycle(s) of material {i}")
        used = set()
        perm = []
        for k, path in enumerate(decomposition.paths):
            j = group[k]
            for e, sign in path.edges:
                flows[e, j] += sign
            end = atom_of_vertex[path.vertices[-1]]
            t = next(t for t in range(layout.counts[i]) if t not in used and layout.sinks[group[t]] == end)
            used.add(t)
            perm.append(t)
        sigma.append(tuple(perm))
    lnet = _with_flows(net, flows, layout.total, LabeledNetwork)
    return lnet, check_sigma(layout, tuple(sigma))  # type: ignore


def sigma_of_labeled_boundary(layout: LabelLayout, boundary: Boundary) -> Sigma:
    """
    Recover the relabelling of a labeled boundary of the form ``boundary_sigma(layout, sigma)``.

    :raises ValidationError: when the boundary does not have that form.
    """
    if boundary.materials != layout.total:
        raise ValidationError(f"project: {boundary.materials} labels, layout has {layout.total}")
    atoms = layout.boundary.atoms
    sigma = []
    for i in range(layout.materials):
        group = layout.group(i)
        used = set()
        perm = []
        for j in group:
            tails = [a.point for a in boundary.atoms if a.weight[j] == -1]
            heads = [a.point for a in boundary.atoms if a.weight[j] == 1]
            if len(tails) != 1 or len(heads) != 1 or sum(abs(a.weight[j]) for a in boundary.atoms) != 2:
                raise ValidationError(f"project: label {j} is not a unit source/sink pair")
            if np.linalg.norm(np.subtract(tails[0], atoms[layout.sources[j]].point)) > GEOM_TOL:
                raise ValidationError(f"project: label {j} does not start at its source")
            t = next((t for t in range(layout.counts[i]) if t not in used
                      and np.linalg.norm(np.subtract(heads[0], atoms[layout.sinks[group[t]]].point)) <= GEOM_TOL), None)
            if t is None:
                raise ValidationError(f"project: label {j} does not end at a free sink of material {i}")
            used.add(t)
            perm.append(t)
        sigma.append(tuple(perm))
    return check_sigma(layout, tuple(sigma))


def project(lnet: LabeledNetwork, layout: LabelLayout) -> Network:
    """
    Sum the labels of each material after removing every label's cycles.

    :param lnet:   Labeled network whose boundary is ``boundary_sigma(layout, sigma)`` for some ``sigma``.
    :param layout: Label layout.
    """
    sigma_of_labeled_boundary(layout, boundary_of(lnet))
    flows = np.zeros((len(lnet.edges), layout.materials), dtype=int)
    for j in range(layout.total):
        paths = flow_decompose(lnet, j).paths
        flows[:, layout.material[j]] += _superpose(len(lnet.edges), paths)
    return _with_flows(lnet, flows, layout.materials, Network)  # type: ignore
