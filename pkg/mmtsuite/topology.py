"""
Tree topologies spanning a set of terminals plus a few Steiner nodes.

Nodes ``0 .. terminals - 1`` are the terminals, ``terminals .. terminals + steiner - 1`` the Steiner
nodes. Every Steiner node has degree at least 3.
"""
import itertools
from typing import Iterator, List, NamedTuple, Set, Tuple

import networkx as nx

from .constants import MAX_STEINER, MAX_TERMINALS
from .errors import ResourceLimitError, ValidationError
from .log import logger
from .types import EdgeKey


class Topology(NamedTuple):
    terminals: int
    steiner: int
    edges: Tuple[EdgeKey, ...]
    """Sorted pairs ``(u, v)`` with ``u < v``."""

    @property
    def nodes(self) -> int:
        return self.terminals + self.steiner

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.nodes))
        g.add_edges_from(self.edges)
        return g

    def path(self, u: int, v: int) -> List[int]:
        """The unique node path from ``u`` to ``v``."""
        return nx.shortest_path(self.graph(), u, v)


def _canonical(terminals: int, steiner: int, edges: Set[EdgeKey]) -> Topology:
    best = None
    for perm in itertools.permutations(range(terminals, terminals + steiner)):
        relabel = {s: perm[k] for k, s in enumerate(range(terminals, terminals + steiner))}
        key = tuple(sorted(tuple(sorted((relabel.get(u, u), relabel.get(v, v)))) for u, v in edges))
        if best is None or key < best:
            best = key
    return Topology(terminals, steiner, best or ())


def _terminal_trees(terminals: int) -> Iterator[Set[EdgeKey]]:
    if terminals <= 1:
        yield set()
    elif terminals == 2:
        yield {(0, 1)}
    else:
        for seq in itertools.product(range(terminals), repeat=terminals - 2):
            tree = nx.from_prufer_sequence(list(seq))
            yield {(min(u, v), max(u, v)) for u, v in tree.edges}


def _expansions(top: Topology) -> Iterator[Topology]:
    """Split one node by moving two or more of its neighbours onto a new Steiner node."""
    g = top.graph()
    new = top.nodes
    for v in range(top.nodes):
        neighbours = sorted(g.neighbors(v))
        keep_min = 0 if v < top.terminals else 2
        for size in range(2, len(neighbours) - keep_min + 1):
            for moved in itertools.combinations(neighbours, size):
                edges = {e for e in top.edges if not (v in e and (e[0] in moved or e[1] in moved))}
                edges |= {(min(u, new), max(u, new)) for u in moved}
                edges.add((v, new))
                yield _canonical(top.terminals, top.steiner + 1, edges)


def enumerate_topologies(terminals: int, max_steiner: int) -> List[Topology]:
    """
    Every tree topology on ``terminals`` labelled terminals and at most ``max_steiner`` Steiner nodes
    of degree 3 or more, up to relabelling of the Steiner nodes.

    :param terminals:   Number of terminal nodes.
    :param max_steiner: Largest number of Steiner nodes.

    :return:            Topologies sorted by Steiner count then edge list; list index is the topology id.
    """
    if terminals < 0 or max_steiner < 0:
        raise ValidationError("enumerate_topologies: counts must be nonnegative")
    if terminals > MAX_TERMINALS:
        raise ResourceLimitError(f"enumerate_topologies: {terminals} terminals exceed the limit of {MAX_TERMINALS}")
    if max_steiner > MAX_STEINER:
        raise ResourceLimitError(f"enumerate_topologies: {max_steiner} Steiner nodes exceed the limit of {MAX_STEINER}")

    level = {_canonical(terminals, 0, t) for t in _terminal_trees(terminals)}
    found = set(level)
    for _ in range(max_steiner):
        level = {x for top in level for x in _expansions(top)} - found
        found |= level
    out = sorted(found, key=lambda t: (t.steiner, t.edges))
    logger.debug(f"enumerate_topologies: {len(out)} topologies for {terminals} terminals, {max_steiner} Steiner")
    return out
