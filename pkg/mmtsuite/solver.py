"""
Search for minimal networks.

``solve_mmtp`` works on the labeled side: for each relabelling and each tree topology it routes every
label along the unique tree path, places the Steiner nodes by minimizing the mass, and projects the
best labeled network back to a multi-material network. ``grid_oracle`` is an exhaustive reference
on small grids that never touches the norm.
"""
from typing import Callable, Dict, List, Mapping, NamedTuple, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from .constants import (EQUIVALENCE_TOL, GEOM_TOL, GEOMETRY_MAX_ITER, GEOMETRY_TOL, MAX_GRID, MAX_GRID_LABELS,
                        MAX_PERMS)
from .costs import MultiMaterialCost
from .errors import ResourceLimitError, ValidationError
from .lifting import project
from .log import logger
from .model import Boundary, LabeledNetwork, Network, energy
from .norm import (LabelLayout, NormBall, all_sigmas, build_ball, identity_sigma, label_layout, search_sigmas,
                   sigma_target)
from .topology import Topology, enumerate_topologies
from .types import EdgeKey, Multiplicity, Point, Sigma


class SolveOptions(NamedTuple):
    max_steiner: int = 2
    max_perms: int = MAX_PERMS
    seed: Optional[int] = None
    hull: str = "full"
    enforce_axioms: bool = True
    irrigation: bool = False
    """Use only the identity relabelling when one atom holds all of every material's production or demand."""
    verify_irrigation: bool = False
    """With ``irrigation``, also run the full search and record whether both agree."""
    max_iterations: int = GEOMETRY_MAX_ITER
    tol: float = GEOMETRY_TOL
    progress: bool = False


class GeometryResult(NamedTuple):
    network: LabeledNetwork
    objective: float
    iterations: int
    converged: bool
    contractions: int


class SolveStats(NamedTuple):
    sigmas: int
    topologies: int
    candidates: int
    skipped: int
    mode: str
    irrigation_agrees: Optional[bool]


class SolveResult(NamedTuple):
    network: Network
    labeled_network: Optional[LabeledNetwork]
    sigma: Optional[Sigma]
    topology: Optional[Topology]
    energy: float
    mass: float
    equivalence_gap: float
    """``mass - energy(network)``; zero up to the optimization tolerance."""
    stats: SolveStats
    geometry: Optional[GeometryResult]


class _Geometry:
    """Mutable Steiner placement for one topology with fixed edge weights."""

    def __init__(self, topology: Topology, flows: Mapping[EdgeKey, Multiplicity], ball: NormBall,
                 terminals: np.ndarray) -> None:
        self.terminals = topology.terminals
        self.flows: Dict[EdgeKey, Tuple[int, ...]] = {k: tuple(v) for k, v in flows.items() if any(v)}
        self.ball = ball
        self.alive: Set[int] = set(range(topology.terminals, topology.nodes))
        centroid = terminals.mean(axis=0)
        self.positions = np.vstack([terminals, np.tile(centroid, (topology.steiner, 1))])
        span = terminals.max(axis=0) - terminals.min(axis=0) if len(terminals) else np.zeros(1)
        self.scale = max(1.0, float(np.linalg.norm(span)))
        self.simplify()

    def weight(self, key: EdgeKey) -> float:
        return self.ball.gauge(self.flows[key])

    def neighbours(self, v: int) -> List[int]:
        return [b if a == v else a for a, b in self.flows if v in (a, b)]

    def _oriented(self, a: int, b: int) -> Tuple[int, ...]:
        """Flow on the a-b edge walked from a to b."""
        if (a, b) in self.flows:
            return self.flows[(a, b)]
        return tuple(-c for c in self.flows[(b, a)])

    def simplify(self) -> None:
        """Drop Steiner nodes of degree below 3; a degree-2 node is replaced by a single edge."""
        changed = True
        while changed:
            changed = False
            for s in sorted(self.alive):
                nb = self.neighbours(s)
                if len(nb) >= 3:
                    continue
                if len(nb) == 2:
                    a, b = nb
                    theta = self._oriented(a, s)
                    self.flows.pop((a, s), None) or self.flows.pop((s, a), None)
                    self.flows.pop((b, s), None) or self.flows.pop((s, b), None)
                    self.flows[(a, b)] = theta
                else:
                    for u in nb:
                        self.flows.pop((u, s), None) or self.flows.pop((s, u), None)
                self.alive.discard(s)
                changed = True

    def merge(self, s: int, u: int) -> None:
        """Contract Steiner node ``s`` into node ``u``."""
        for x in self.neighbours(s):
            theta = self._oriented(s, x)
            self.flows.pop((s, x), None) or self.flows.pop((x, s), None)
            if x != u:
                self.flows[(u, x)] = theta
        self.alive.discard(s)
        self.simplify()

    def objective(self) -> float:
        return sum(self.weight((a, b)) * float(np.linalg.norm(self.positions[a] - self.positions[b]))
                   for a, b in self.flows)

    def initialize(self, sweeps: int = 50) -> None:
        for _ in range(sweeps):
            for s in sorted(self.alive):
                nb = self.neighbours(s)
                self.positions[s] = self.positions[nb].mean(axis=0)

    def sweep(self) -> float:
        move = 0.0
        for s in sorted(self.alive):
            nb = self.neighbours(s)
            anchors = self.positions[nb]
            weights = np.array([self.weight((s, u) if (s, u) in self.flows else (u, s)) for u in nb])
            new = _local_step(self.positions[s], anchors, weights, GEOM_TOL * 1e-3 * self.scale)
            move = max(move, float(np.linalg.norm(new - self.positions[s])))
            self.positions[s] = new
        return move

    def degenerate_edge(self) -> Optional[Tuple[int, int]]:
        for a, b in sorted(self.flows):
            if np.linalg.norm(self.positions[a] - self.positions[b]) <= GEOM_TOL * self.scale:
                if b in self.alive:
                    return b, a
                if a in self.alive:
                    return a, b
        return None


def _local_step(x: np.ndarray, anchors: np.ndarray, weights: np.ndarray, eps: float) -> np.ndarray:
    """
    One minimization step of ``sum_k w_k |x - a_k|`` for a single Steiner node.

    An anchor that already satisfies the optimality condition is returned directly. Otherwise this is
    the Weiszfeld update, with the Vardi-Zhang correction when ``x`` sits on an anchor.
    """
    for a in anchors:
        diff = anchors - a
        dist = np.linalg.norm(diff, axis=1)
        here = dist <= eps
        if not (~here).any():
            return a.copy()
        pull = (weights[~here, None] * diff[~here] / dist[~here, None]).sum(axis=0)
        if np.linalg.norm(pull) <= weights[here].sum():
            return a.copy()

    diff = anchors - x
    dist = np.linalg.norm(diff, axis=1)
    here = dist <= eps
    far = ~here
    inv = weights[far] / dist[far]
    target = inv @ anchors[far] / inv.sum()
    if not here.any():
        return target
    eta = weights[here].sum()
    r = float(np.linalg.norm((weights[far, None] * diff[far] / dist[far, None]).sum(axis=0)))
    if r <= eta:
        return x
    return (1.0 - eta / r) * target + (eta / r) * x


def geometry_objective(topology: Topology, flows: Mapping[EdgeKey, Multiplicity], ball: NormBall,
                       positions: np.ndarray) -> float:
    """Mass of a topology placed at ``positions`` (terminals first, then Steiner nodes)."""
    positions = np.asarray(positions, dtype=float)
    return sum(ball.gauge(theta) * float(np.linalg.norm(positions[a] - positions[b]))
               for (a, b), theta in flows.items() if any(theta))


def optimize_geometry(topology: Topology, flows: Mapping[EdgeKey, Multiplicity], ball: NormBall,
                      terminals: Sequence[Point], *, max_iter: int = GEOMETRY_MAX_ITER,
                      tol: float = GEOMETRY_TOL) -> GeometryResult:
    """
    Place the Steiner nodes of a routed topology to minimize ``sum_e gauge(theta_e) |e|``.

    Edge weights do not depend on the positions, so the objective is a weighted Steiner sum and is
    convex in the Steiner coordinates. Nodes are updated one at a time until no node moves more than
    ``tol`` (relative to the terminal spread). Edges shorter than the geometric tolerance are then
    contracted and the remaining nodes re-optimized.

    :param topology:  Tree topology.
    :param flows:     Labeled multiplicity of each topology edge ``(u, v)``, ``u < v``, oriented u to v.
    :param ball:      Norm ball of the labels.
    :param terminals: Coordinates of the terminal nodes.
    :param max_iter:  Sweep cap.
    :param tol:       Movement threshold for convergence.
    """
    pts = np.asarray(terminals, dtype=float)
    if len(pts) != topology.terminals:
        raise ValidationError(f"optimize_geometry: {len(pts)} coordinates for {topology.terminals} terminals")
    geo = _Geometry(topology, flows, ball, pts)
    geo.initialize()
    iterations, contractions, converged = 0, 0, False
    while True:
        converged = False
        for _ in range(max_iter - iterations):
            iterations += 1
            if geo.sweep() <= tol * geo.scale:
                converged = True
                break
        pair = geo.degenerate_edge()
        if pair is None:
            break
        geo.merge(*pair)
        contractions += 1

    order = list(range(geo.terminals)) + sorted(geo.alive)
    index = {v: k for k, v in enumerate(order)}
    vertices = [tuple(float(c) for c in geo.positions[v]) for v in order]
    edges = [(index[a], index[b], theta) for (a, b), theta in sorted(geo.flows.items())]
    network = LabeledNetwork.create(vertices, edges, ball.dimension)
    if not converged:
        logger.warning(f"optimize_geometry: no convergence in {max_iter} sweeps")
    return GeometryResult(network, geo.objective(), iterations, converged, contractions)


def irrigation_dominant(boundary: Boundary) -> bool:
    """
    Whether one atom carries, for every material, as much weight as all other atoms together, so that
    every relabelling yields the same problem up to renaming labels.
    """
    atoms = boundary.atoms
    for a in atoms:
        if all(abs(a.weight[i]) == sum(abs(b.weight[i]) for b in atoms if b is not a)
               for i in range(boundary.materials)):
            return True
    return False


def _route(layout: LabelLayout, sigma: Sigma, topology: Topology) -> Dict[EdgeKey, Tuple[int, ...]]:
    flows: Dict[EdgeKey, List[int]] = {e: [0] * layout.total for e in topology.edges}
    graph = topology.graph()
    for j in range(layout.total):
        path = nx.shortest_path(graph, layout.sources[j], layout.sinks[sigma_target(layout, sigma, j)])
        for a, b in zip(path, path[1:]):
            key = (min(a, b), max(a, b))
            flows[key][j] += 1 if a < b else -1
    return {k: tuple(v) for k, v in flows.items()}


def _distinct(layout: LabelLayout, sigmas: Sequence[Sigma]) -> List[Sigma]:
    seen: Dict[Tuple, Sigma] = {}
    for sigma in sigmas:
        key = tuple(layout.sinks[sigma_target(layout, sigma, j)] for j in range(layout.total))
        seen.setdefault(key, sigma)
    return list(seen.values())


def _track(items: Sequence, description: str, enabled: bool):  # type: ignore
    if enabled:
        try:
            from rich.progress import track
            return track(items, description=description, total=len(items))
        except ImportError:
            pass
    return items


class _Best(NamedTuple):
    mass: float
    sigma: Sigma
    topology: Topology
    geometry: GeometryResult


def _search(layout: LabelLayout, ball: NormBall, points: np.ndarray, sigmas: Sequence[Sigma],
            topologies: Sequence[Topology], options: SolveOptions) -> Tuple[Optional[_Best], int]:
    best: Optional[_Best] = None
    skipped = 0
    candidates = [(s, t) for s in sigmas for t in topologies]
    for sigma, top in _track(candidates, "Searching topologies...", options.progress):
        try:
            geo = optimize_geometry(top, _route(layout, sigma, top), ball, points,
                                    max_iter=options.max_iterations, tol=options.tol)
        except ValidationError as e:
            logger.debug(f"solve_mmtp: skipping sigma={sigma} topology={top.edges}: {e}")
            skipped += 1
            continue
        if best is None or geo.objective < best.mass - 1e-12:
            best = _Best(geo.objective, sigma, top, geo)
    return best, skipped


def solve_mmtp(boundary: Boundary, cost: MultiMaterialCost, options: SolveOptions = SolveOptions()) -> SolveResult:
    """
    Best network within the enumerated class: tree topologies with at most ``options.max_steiner``
    Steiner nodes, over all relabellings (or a seeded sample when there are too many).

    Ties in mass are broken by the lexicographically smallest ``(sigma, topology id)``.

    :param boundary: Boundary to connect.
    :param cost:     Cost; its box must contain ``[-N_i, N_i]``.
    :param options:  Search options.
    """
    layout = label_layout(boundary)
    if layout.total == 0:
        empty = Network((), (), boundary.materials)
        return SolveResult(empty, None, None, None, 0.0, 0.0, 0.0, SolveStats(0, 0, 0, 0, "empty", None), None)

    ball = build_ball(cost, layout, hull=options.hull, enforce_axioms=options.enforce_axioms)
    topologies = enumerate_topologies(len(boundary.atoms), options.max_steiner)
    points = np.array(boundary.points, dtype=float)

    irrigation_agrees = None
    if options.irrigation and irrigation_dominant(boundary):
        sigmas, mode = [identity_sigma(layout)], "irrigation"
    else:
        if options.irrigation:
            logger.warning("solve_mmtp: boundary is not irrigation-dominant, searching all relabellings")
        sigmas, mode = search_sigmas(layout, options.max_perms, options.seed)
    sigmas = _distinct(layout, sigmas)

    best, skipped = _search(layout, ball, points, sigmas, topologies, options)
    if best is None:
        raise ValidationError("solve_mmtp: no candidate produced a valid network")

    if mode == "irrigation" and options.verify_irrigation:
        full, _ = _search(layout, ball, points, _distinct(layout, list(all_sigmas(layout))), topologies, options)
        irrigation_agrees = full is not None and abs(full.mass - best.mass) <= EQUIVALENCE_TOL
        if not irrigation_agrees:
            logger.warning("solve_mmtp: identity relabelling differs from the full search")

    network = project(best.geometry.network, layout)
    value = energy(network, cost)
    gap = best.mass - value
    if abs(gap) > EQUIVALENCE_TOL:
        logger.warning(f"solve_mmtp: mass {best.mass:.12g} and projected energy {value:.12g} differ by {gap:.3g}")
    stats = SolveStats(len(sigmas), len(topologies), len(sigmas) * len(topologies), skipped, mode, irrigation_agrees)
    logger.info(f"solve_mmtp: mass {best.mass:.9g} with sigma={best.sigma} over {stats.candidates} candidates")
    return SolveResult(network, best.geometry.network, best.sigma, best.topology, value, best.mass, gap, stats,
                       best.geometry)


class GridSpec(NamedTuple):
    origin: Point
    spacing: float
    shape: Tuple[int, int]

    def point(self, node: Tuple[int, int]) -> Point:
        return (self.origin[0] + self.spacing * node[0], self.origin[1] + self.spacing * node[1])


class GridSolution(NamedTuple):
    value: float
    network: Network
    labeled_network: Optional[LabeledNetwork]
    sigma: Sigma


def _grid_paths(boundary: Boundary, grid: GridSpec):  # type: ignore
    if boundary.dimension != 2:
        raise ValidationError("grid search: boundary must be planar")
    if max(grid.shape) > MAX_GRID or min(grid.shape) < 1:
        raise ResourceLimitError(f"grid search: grid {grid.shape} exceeds {MAX_GRID}x{MAX_GRID}")
    graph = nx.grid_2d_graph(*grid.shape)
    nodes = sorted(graph.nodes)
    edges = sorted(tuple(sorted(e)) for e in graph.edges)
    edge_index = {e: k for k, e in enumerate(edges)}

    node_of_atom = []
    for a in boundary.atoms:
        match = [n for n in nodes if np.linalg.norm(np.subtract(grid.point(n), a.point)) <= GEOM_TOL]
        if not match:
            raise ValidationError(f"grid search: atom at {a.point} is not a grid node")
        node_of_atom.append(match[0])

    cache: Dict[Tuple, List[List[Tuple[int, int]]]] = {}

    def paths(a: int, b: int) -> List[List[Tuple[int, int]]]:
        key = (node_of_atom[a], node_of_atom[b])
        if key not in cache:
            cache[key] = [[(edge_index[tuple(sorted((u, v)))], 1 if (u, v) == tuple(sorted((u, v))) else -1)
                           for u, v in zip(p, p[1:])] for p in nx.all_simple_paths(graph, *key)]
        return cache[key]

    return nodes, edges, paths


def _grid_search(boundary: Boundary, grid: GridSpec, leaf: Callable[[np.ndarray], float]):  # type: ignore
    layout = label_layout(boundary)
    if layout.total > MAX_GRID_LABELS:
        raise ResourceLimitError(f"grid search: {layout.total} labels exceed the limit of {MAX_GRID_LABELS}")
    nodes, edges, paths = _grid_paths(boundary, grid)
    best: List = [float("inf"), None, None]
    for sigma in all_sigmas(layout):
        routes = [paths(layout.sources[j], layout.sinks[sigma_target(layout, sigma, j)]) for j in range(layout.total)]
        flows = np.zeros((len(edges), layout.total), dtype=int)

        def descend(j: int) -> None:
            if j == layout.total:
                value = leaf(flows)
                if value < best[0] - 1e-12:
                    best[:] = [value, flows.copy(), sigma]
                return
            for route in routes[j]:
                for k, s in route:
                    flows[k, j] += s
                descend(j + 1)
                for k, s in route:
                    flows[k, j] -= s

        descend(0)
    vertices = [grid.point(n) for n in nodes]
    node_index = {n: k for k, n in enumerate(nodes)}
    labeled = [(node_index[u], node_index[v], tuple(int(c) for c in best[1][k])) for k, (u, v) in enumerate(edges)]
    return layout, best[0], LabeledNetwork.create(vertices, labeled, layout.total), best[2]


def grid_oracle(boundary: Boundary, cost: MultiMaterialCost, grid: GridSpec) -> GridSolution:
    """
    Exhaustive minimum energy over superpositions of simple grid paths, one per label, for every
    relabelling. Exponential; limited to small grids and at most a few labels.
    """
    layout = label_layout(boundary)
    groups = np.zeros((layout.total, layout.materials), dtype=int)
    groups[np.arange(layout.total), layout.material] = 1
    values: Dict[Multiplicity, float] = {}

    def leaf(flows: np.ndarray) -> float:
        total = 0.0
        for row in flows @ groups:
            if row.any():
                key = tuple(int(c) for c in row)
                if key not in values:
                    values[key] = cost(key)
                total += values[key]
        return total * grid.spacing

    layout, value, lnet, sigma = _grid_search(boundary, grid, leaf)
    network = Network.create(lnet.vertices, [(e.tail, e.head, tuple(int(c) for c in np.array(e.multiplicity) @ groups))
                                             for e in lnet.edges], layout.materials)
    return GridSolution(value, network, None, sigma)


def solve_on_grid(boundary: Boundary, cost: MultiMaterialCost, grid: GridSpec,
                  options: SolveOptions = SolveOptions()) -> GridSolution:
    """
    Minimum mass over labeled grid networks built from one simple path per label. The labeled winner
    is projected back; ``value`` is its mass.
    """
    layout = label_layout(boundary)
    ball = build_ball(cost, layout, hull=options.hull, enforce_axioms=options.enforce_axioms)

    def leaf(flows: np.ndarray) -> float:
        return grid.spacing * sum(ball.gauge(row) for row in flows if row.any())

    layout, value, lnet, sigma = _grid_search(boundary, grid, leaf)
    return GridSolution(value, project(lnet, layout), lnet, sigma)
