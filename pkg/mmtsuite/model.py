"""Boundaries, networks and labeled networks, with the energy and mass functionals defined on them."""
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np

from .constants import GEOM_TOL
from .errors import ValidationError
from .types import Multiplicity, Point

if TYPE_CHECKING:
    from .costs import MultiMaterialCost
    from .norm import NormBall


class Atom(NamedTuple):
    point: Point
    weight: Multiplicity


class Edge(NamedTuple):
    tail: int
    head: int
    multiplicity: Multiplicity


EdgeLike = Union[Edge, Tuple[int, int, Sequence[int]]]


def as_point(values: Iterable[float]) -> Point:
    point = tuple(float(v) for v in values)
    if not all(np.isfinite(point)):
        raise ValidationError(f"as_point: non-finite coordinate in {point}")
    return point


def as_multiplicity(values: Iterable[Union[int, float]]) -> Multiplicity:
    out = []
    for v in values:
        if isinstance(v, bool) or int(v) != v:
            raise ValidationError(f"as_multiplicity: {v!r} is not an integer")
        out.append(int(v))
    return tuple(out)


def leq_partial_order(x: Sequence[int], y: Sequence[int]) -> bool:
    """
    Coordinatewise order used by the cost axioms: ``x <= y`` iff every ``|x_j| <= |y_j|``
    and ``x_j * y_j >= 0`` (no coordinate changes sign).
    """
    if len(x) != len(y):
        raise ValidationError("leq_partial_order: length mismatch")
    return all(abs(a) <= abs(b) and a * b >= 0 for a, b in zip(x, y))


@dataclass(frozen=True)
class Boundary:
    """
    Finite signed measure: atoms at pairwise distinct points with nonzero integer weights in Z^m,
    the weights of each material summing to zero.

    :param atoms:     ``(point, weight)`` pairs, order preserved.
    :param materials: Number of materials ``m``.
    """

    atoms: Tuple[Atom, ...]
    materials: int

    def __post_init__(self) -> None:
        atoms = tuple(Atom(as_point(p), as_multiplicity(w)) for p, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if self.materials < 1:
            raise ValidationError("Boundary: need at least one material")

        dims = {len(a.point) for a in atoms}
        if len(dims) > 1:
            raise ValidationError(f"Boundary: mixed point dimensions {sorted(dims)}")
        for a in atoms:
            if len(a.weight) != self.materials:
                raise ValidationError(f"Boundary: weight {a.weight} does not have {self.materials} components")
            if not any(a.weight):
                raise ValidationError(f"Boundary: zero weight at {a.point}")
        for i, a in enumerate(atoms):
            for b in atoms[i + 1:]:
                if _distance(a.point, b.point) <= GEOM_TOL:
                    raise ValidationError(f"Boundary: atoms at {a.point} and {b.point} coincide")
        totals = [sum(a.weight[i] for a in atoms) for i in range(self.materials)]
        if any(totals):
            raise ValidationError(f"Boundary: material totals {totals} are not zero")

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def dimension(self) -> int:
        return len(self.atoms[0].point) if self.atoms else 0

    @property
    def points(self) -> Tuple[Point, ...]:
        return tuple(a.point for a in self.atoms)

    def find(self, point: Sequence[float], tol: float = GEOM_TOL) -> Optional[int]:
        """Index of the atom located at ``point``, or None."""
        for k, a in enumerate(self.atoms):
            if _distance(a.point, point) <= tol:
                return k
        return None

    def same_as(self, other: "Boundary", tol: float = GEOM_TOL) -> bool:
        """Equality as measures: same atoms up to ordering and coordinate noise below ``tol``."""
        if self.materials != other.materials or len(self) != len(other):
            return False
        for a in self.atoms:
            k = other.find(a.point, tol)
            if k is None or other.atoms[k].weight != a.weight:
                return False
        return True

    def scaled(self, factor: float) -> "Boundary":
        return type(self)(tuple(Atom(tuple(factor * c for c in a.point), a.weight) for a in self.atoms),
                          self.materials)


@dataclass(frozen=True)
class LabeledBoundary(Boundary):
    """A boundary in Z^N where every label has exactly one source atom (-1) and one sink atom (+1)."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for j in range(self.materials):
            column = [a.weight[j] for a in self.atoms]
            if sorted(v for v in column if v) != [-1, 1]:
                raise ValidationError(f"LabeledBoundary: label {j} is not a single unit source/sink pair")

    @property
    def labels(self) -> int:
        return self.materials


@dataclass(frozen=True)
class _Current:
    """
    Finite graph with straight segment edges carrying integer multiplicity vectors.

    Vertices are matched by index. Edges must be pairwise interior-disjoint, non-degenerate,
    and no two edges may join the same unordered pair of vertices.
    """

    vertices: Tuple[Point, ...]
    edges: Tuple[Edge, ...]
    rank: int

    def __post_init__(self) -> None:
        vertices = tuple(as_point(v) for v in self.vertices)
        edges = tuple(Edge(int(t), int(h), as_multiplicity(w)) for t, h, w in self.edges)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        name = type(self).__name__

        if self.rank < 1:
            raise ValidationError(f"{name}: rank must be positive")
        dims = {len(v) for v in vertices}
        if len(dims) > 1:
            raise ValidationError(f"{name}: mixed vertex dimensions {sorted(dims)}")

        seen = set()
        for k, e in enumerate(edges):
            if not (0 <= e.tail < len(vertices) and 0 <= e.head < len(vertices)):
                raise ValidationError(f"{name}: edge {k} references a missing vertex")
            if e.tail == e.head:
                raise ValidationError(f"{name}: edge {k} is a loop")
            if len(e.multiplicity) != self.rank:
                raise ValidationError(f"{name}: edge {k} multiplicity has {len(e.multiplicity)} != {self.rank} entries")
            if not any(e.multiplicity):
                raise ValidationError(f"{name}: edge {k} has zero multiplicity")
            if _distance(vertices[e.tail], vertices[e.head]) <= GEOM_TOL:
                raise ValidationError(f"{name}: edge {k} has zero length")
            key = (min(e.tail, e.head), max(e.tail, e.head))
            if key in seen:
                raise ValidationError(f"{name}: parallel edges between vertices {key}")
            seen.add(key)
        _check_interior_disjoint(vertices, edges, name)

    @classmethod
    def create(cls, vertices: Sequence[Sequence[float]], edges: Iterable[EdgeLike], rank: int):  # type: ignore
        """
        Build a network after merging parallel edges (reversed duplicates are negated before summing)
        and deleting edges whose merged multiplicity is zero.
        """
        merged: Dict[Tuple[int, int], List[int]] = {}
        order: List[Tuple[int, int]] = []
        for t, h, w in edges:
            w = as_multiplicity(w)
            key, sign = ((t, h), 1) if (h, t) not in merged else ((h, t), -1)
            if key not in merged:
                merged[key] = [0] * len(w)
                order.append(key)
            merged[key] = [a + sign * b for a, b in zip(merged[key], w)]
        kept = tuple(Edge(t, h, tuple(merged[(t, h)])) for t, h in order if any(merged[(t, h)]))
        return cls(tuple(tuple(v) for v in vertices), kept, rank)

    @property
    def dimension(self) -> int:
        return len(self.vertices[0]) if self.vertices else 0

    def is_empty(self) -> bool:
        return not self.edges

    def edge_vector(self, k: int) -> np.ndarray:
        e = self.edges[k]
        return np.subtract(self.vertices[e.head], self.vertices[e.tail])

    def edge_length(self, k: int) -> float:
        return float(np.linalg.norm(self.edge_vector(k)))

    def edge_direction(self, k: int) -> np.ndarray:
        v = self.edge_vector(k)
        return v / np.linalg.norm(v)

    def component(self, i: int) -> Tuple[int, ...]:
        """Per-edge multiplicity of coordinate ``i``."""
        return tuple(e.multiplicity[i] for e in self.edges)

    def multiplicity_matrix(self) -> np.ndarray:
        return np.array([e.multiplicity for e in self.edges], dtype=int).reshape(len(self.edges), self.rank)

    def rebuilt(self, vertices: Sequence[Sequence[float]], edges: Iterable[EdgeLike]):  # type: ignore
        """Same type and rank, new geometry; parallel edges merged."""
        return type(self).create(vertices, edges, self.rank)


@dataclass(frozen=True)
class Network(_Current):
    """Multi-material network with multiplicities in Z^m."""

    @property
    def materials(self) -> int:
        return self.rank


@dataclass(frozen=True)
class LabeledNetwork(_Current):
    """Network whose multiplicities live in Z^N, one coordinate per unit of material (label)."""

    @property
    def labels(self) -> int:
        return self.rank


AnyNetwork = TypeVar("AnyNetwork", Network, LabeledNetwork)


def boundary_of(net: _Current) -> Boundary:
    """
    Signed boundary: each edge contributes ``-theta`` at its tail and ``+theta`` at its head.
    Vertices with zero net weight are omitted; atoms follow vertex order.
    """
    acc = np.zeros((len(net.vertices), net.rank), dtype=int)
    for e in net.edges:
        acc[e.tail] -= e.multiplicity
        acc[e.head] += e.multiplicity
    atoms = tuple(Atom(net.vertices[v], tuple(int(c) for c in acc[v]))
                  for v in range(len(net.vertices)) if acc[v].any())
    return Boundary(atoms, net.rank)


def labeled_boundary_of(lnet: LabeledNetwork) -> LabeledBoundary:
    b = boundary_of(lnet)
    return LabeledBoundary(b.atoms, b.materials)


def energy(net: Network, cost: "MultiMaterialCost") -> float:
    """
    Sum over edges of ``length * C(theta)``.

    :raises DomainError: if an edge multiplicity lies outside the cost's box.
    """
    if cost.materials != net.materials:
        raise ValidationError(f"energy: cost has {cost.materials} materials, network has {net.materials}")
    values: Dict[Multiplicity, float] = {}
    total = 0.0
    for k, e in enumerate(net.edges):
        if e.multiplicity not in values:
            values[e.multiplicity] = cost(e.multiplicity)
        total += net.edge_length(k) * values[e.multiplicity]
    return total


def mass(lnet: LabeledNetwork, ball: "NormBall") -> float:
    """Sum over edges of ``length * gauge(theta)``."""
    if ball.dimension != lnet.labels:
        raise ValidationError(f"mass: ball has dimension {ball.dimension}, network has {lnet.labels} labels")
    return sum(lnet.edge_length(k) * ball.gauge(e.multiplicity) for k, e in enumerate(lnet.edges))


def reverse_edge(net: AnyNetwork, k: int) -> AnyNetwork:
    """Swap the orientation of edge ``k`` and negate its multiplicity; the current is unchanged."""
    edges = list(net.edges)
    e = edges[k]
    edges[k] = Edge(e.head, e.tail, tuple(-c for c in e.multiplicity))
    return type(net)(net.vertices, tuple(edges), net.rank)


def subdivide_edge(net: AnyNetwork, k: int, t: float = 0.5) -> AnyNetwork:
    """Split edge ``k`` at parameter ``t`` in (0, 1) by a new vertex appended to the vertex list."""
    if not 0.0 < t < 1.0:
        raise ValidationError("subdivide_edge: t must lie strictly between 0 and 1")
    e = net.edges[k]
    tail, head = np.asarray(net.vertices[e.tail]), np.asarray(net.vertices[e.head])
    mid = len(net.vertices)
    vertices = net.vertices + (tuple(float(c) for c in tail + t * (head - tail)),)
    edges = net.edges[:k] + (Edge(e.tail, mid, e.multiplicity), Edge(mid, e.head, e.multiplicity)) + net.edges[k + 1:]
    return type(net)(vertices, edges, net.rank)


def dilate(net: AnyNetwork, factor: float) -> AnyNetwork:
    """Scale every vertex about the origin."""
    if factor <= 0:
        raise ValidationError("dilate: factor must be positive")
    return type(net)(tuple(tuple(factor * c for c in v) for v in net.vertices), net.edges, net.rank)


def disjoint_union(a: AnyNetwork, b: AnyNetwork) -> AnyNetwork:
    if type(a) is not type(b) or a.rank != b.rank:
        raise ValidationError("disjoint_union: networks of different kinds")
    shift = len(a.vertices)
    edges = a.edges + tuple(Edge(e.tail + shift, e.head + shift, e.multiplicity) for e in b.edges)
    return type(a)(a.vertices + b.vertices, edges, a.rank)


def _distance(p: Sequence[float], q: Sequence[float]) -> float:
    return float(np.linalg.norm(np.subtract(p, q)))


def _segment_distance(p1: np.ndarray, q1: np.ndarray, p2: np.ndarray, q2: np.ndarray) -> float:
    """Distance between segments [p1, q1] and [p2, q2] in any dimension."""
    d1, d2, r = q1 - p1, q2 - p2, p1 - p2
    a, e, f = d1 @ d1, d2 @ d2, d2 @ r
    c, b = d1 @ r, d1 @ d2
    denom = a * e - b * b
    s = float(np.clip((b * f - c * e) / denom, 0.0, 1.0)) if denom > 1e-12 * a * e else 0.0
    t = (b * s + f) / e
    if t < 0.0:
        t, s = 0.0, float(np.clip(-c / a, 0.0, 1.0))
    elif t > 1.0:
        t, s = 1.0, float(np.clip((b - c) / a, 0.0, 1.0))
    return float(np.linalg.norm(p1 + s * d1 - p2 - t * d2))


def _check_interior_disjoint(vertices: Tuple[Point, ...], edges: Tuple[Edge, ...], name: str) -> None:
    coords = np.array(vertices, dtype=float) if vertices else np.zeros((0, 0))
    for k, e in enumerate(edges):
        for l in range(k + 1, len(edges)):
            f = edges[l]
            shared = {e.tail, e.head} & {f.tail, f.head}
            if shared:
                c = shared.pop()
                a = e.head if e.tail == c else e.tail
                b = f.head if f.tail == c else f.tail
                u = coords[a] - coords[c]
                v = coords[b] - coords[c]
                u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
                if np.linalg.norm(u - v) <= GEOM_TOL:
                    raise ValidationError(f"{name}: edges {k} and {l} overlap along a segment")
            elif _segment_distance(coords[e.tail], coords[e.head], coords[f.tail], coords[f.head]) <= GEOM_TOL:
                raise ValidationError(f"{name}: edges {k} and {l} intersect")
