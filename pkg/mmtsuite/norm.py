"""
Label layouts and the norm construction.

A boundary with ``N_i`` units of material ``i`` is relabelled as ``N = sum N_i`` unit labels. The
norm ball on R^N is built as a polytope (convex hull of the directions ``D / C(D)``), once for
supersymmetric costs and once per sign orthant otherwise, so that the norm of the label vector
assembled from any multiplicity ``theta`` equals ``C(theta)`` for every relabelling.
"""
import itertools
import math
import random
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .constants import DEFAULT_TOL, MAX_PERMS, N_MAX
from .costs import AxiomReport, Counterexample, MultiMaterialCost, check_axioms, symmetrize_for_orthant
from .errors import DomainError, LPError, PreconditionError, ResourceLimitError, ValidationError
from .log import logger
from .model import Atom, Boundary, LabeledBoundary
from .simplex import LPStatus, linprog
from .types import Multiplicity, Sigma, SignPattern

HULLS = ("full", "good_pairs")


class LabelLayout(NamedTuple):
    """
    Deterministic relabelling of a boundary.

    Labels ``offsets[i] .. offsets[i] + counts[i] - 1`` belong to material ``i``; label ``j`` starts at
    atom ``sources[j]`` and, before any permutation, ends at atom ``sinks[j]``. Atoms with a weight of
    ``k`` units contribute ``k`` consecutive labels, in atom order.
    """

    boundary: Boundary
    counts: Tuple[int, ...]
    offsets: Tuple[int, ...]
    material: Tuple[int, ...]
    sources: Tuple[int, ...]
    sinks: Tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def materials(self) -> int:
        return len(self.counts)

    def group(self, i: int) -> range:
        return range(self.offsets[i], self.offsets[i] + self.counts[i])


def label_layout(boundary: Boundary) -> LabelLayout:
    """
    Split every material's production and demand into unit labels.

    :param boundary: Multi-material boundary.

    :return:         Layout with ``N_i = (sum_l |eta_{l,i}|) / 2`` labels for material ``i``.
    """
    counts: List[int] = []
    offsets: List[int] = []
    material: List[int] = []
    sources: List[int] = []
    sinks: List[int] = []
    for i in range(boundary.materials):
        total = sum(abs(a.weight[i]) for a in boundary.atoms)
        if total % 2:
            raise ValidationError(f"label_layout: material {i} has odd total weight {total}")
        offsets.append(len(material))
        counts.append(total // 2)
        material.extend([i] * (total // 2))
        for k, a in enumerate(boundary.atoms):
            sources.extend([k] * max(-a.weight[i], 0))
            sinks.extend([k] * max(a.weight[i], 0))
    return LabelLayout(boundary, tuple(counts), tuple(offsets), tuple(material), tuple(sources), tuple(sinks))


def check_sigma(layout: LabelLayout, sigma: Sigma) -> Sigma:
    sigma = tuple(tuple(int(v) for v in perm) for perm in sigma)
    if len(sigma) != layout.materials:
        raise ValidationError(f"check_sigma: {len(sigma)} permutations for {layout.materials} materials")
    for i, perm in enumerate(sigma):
        if sorted(perm) != list(range(layout.counts[i])):
            raise ValidationError(f"check_sigma: {perm} is not a permutation of {layout.counts[i]} labels")
    return sigma


def sigma_target(layout: LabelLayout, sigma: Sigma, j: int) -> int:
    """Label whose sink receives label ``j`` under ``sigma``."""
    i = layout.material[j]
    return layout.offsets[i] + sigma[i][j - layout.offsets[i]]


def boundary_sigma(layout: LabelLayout, sigma: Sigma) -> LabeledBoundary:
    """
    Labeled boundary in which label ``j`` leaves its source and arrives at the sink of label ``sigma(j)``.

    :raises ValidationError: on a permutation of the wrong size.
    """
    sigma = check_sigma(layout, sigma)
    n = layout.total
    if n == 0:
        raise ValidationError("boundary_sigma: boundary has no labels")
    weights = np.zeros((len(layout.boundary.atoms), n), dtype=int)
    for j in range(n):
        weights[layout.sources[j], j] -= 1
        weights[layout.sinks[sigma_target(layout, sigma, j)], j] += 1
    atoms = tuple(Atom(a.point, tuple(int(c) for c in weights[k]))
                  for k, a in enumerate(layout.boundary.atoms) if weights[k].any())
    return LabeledBoundary(atoms, n)


def sigma_count(layout: LabelLayout) -> int:
    return math.prod(math.factorial(c) for c in layout.counts)


def identity_sigma(layout: LabelLayout) -> Sigma:
    return tuple(tuple(range(c)) for c in layout.counts)


def all_sigmas(layout: LabelLayout) -> Iterator[Sigma]:
    """Every relabelling, in lexicographic order."""
    return itertools.product(*(itertools.permutations(range(c)) for c in layout.counts))


def sample_sigmas(layout: LabelLayout, count: int, seed: Optional[int] = None) -> List[Sigma]:
    """Up to ``count`` distinct uniformly drawn relabellings, identity first."""
    rng = random.Random(seed)
    seen = {identity_sigma(layout): None}
    for _ in range(count - 1):
        sigma = []
        for c in layout.counts:
            perm = list(range(c))
            rng.shuffle(perm)
            sigma.append(tuple(perm))
        seen.setdefault(tuple(sigma), None)
    return list(seen)


def search_sigmas(layout: LabelLayout, max_perms: int = MAX_PERMS,
                  seed: Optional[int] = None) -> Tuple[List[Sigma], str]:
    """All relabellings when there are at most ``max_perms`` of them, otherwise a seeded sample."""
    if sigma_count(layout) <= max_perms:
        return list(all_sigmas(layout)), "exhaustive"
    logger.warning(f"search_sigmas: {sigma_count(layout)} relabellings, sampling {max_perms}")
    return sample_sigmas(layout, max_perms, seed), "sampled"


def eqn_main_vector(layout: LabelLayout, theta: Sequence[int], sigma: Sigma) -> Multiplicity:
    """
    Label vector of a multiplicity: for each material, ``|theta_i|`` labels of its group, taken in
    the order given by ``sigma``, set to ``sign(theta_i)``.
    """
    if len(theta) != layout.materials:
        raise ValidationError(f"eqn_main_vector: {theta} does not have {layout.materials} components")
    v = [0] * layout.total
    for i, t in enumerate(theta):
        if abs(t) > layout.counts[i]:
            raise DomainError(f"eqn_main_vector: |theta_{i}| = {abs(t)} exceeds {layout.counts[i]} labels")
        for k in range(abs(t)):
            v[layout.offsets[i] + sigma[i][k]] = 1 if t > 0 else -1
    return tuple(v)


def good_directions(layout: LabelLayout) -> Iterator[Multiplicity]:
    """Nonzero ``D`` in {-1, 0, 1}^N whose entries in each material group share one sign."""
    for d in itertools.product((-1, 0, 1), repeat=layout.total):
        if any(d) and _single_signed(d, layout):
            yield d


def good_pairs(layout: LabelLayout) -> Iterator[Tuple[FrozenSet[int], FrozenSet[int]]]:
    """Disjoint label sets ``(A, B)`` such that no material group meets both, ``A`` or ``B`` non-empty."""
    for d in good_directions(layout):
        yield frozenset(j for j, v in enumerate(d) if v > 0), frozenset(j for j, v in enumerate(d) if v < 0)


def pair_cost(cost: MultiMaterialCost, layout: LabelLayout, a: Iterable[int], b: Iterable[int]) -> float:
    """
    Cost of a good pair: ``C`` at the multiplicity that sends ``|A|`` units forward and ``|B|`` backward.

    :raises ValidationError: when the sets overlap or some material group meets both.
    """
    d = [0] * layout.total
    for j in a:
        d[j] += 1
    for j in b:
        d[j] -= 1
    if any(abs(v) > 1 for v in d) or not any(d) or not _single_signed(d, layout):
        raise ValidationError("pair_cost: not a good pair")
    return direction_cost(cost, layout, d)


def direction_cost(cost: MultiMaterialCost, layout: LabelLayout, d: Sequence[int]) -> float:
    """Cost of the per-material signed sums of a label vector."""
    return cost(tuple(sum(d[j] for j in layout.group(i)) for i in range(layout.materials)))


def _single_signed(d: Sequence[int], layout: LabelLayout) -> bool:
    for i in range(layout.materials):
        block = [d[j] for j in layout.group(i)]
        if max(block, default=0) > 0 and min(block, default=0) < 0:
            return False
    return True


def polytope_gauge(vertices: np.ndarray, x: Sequence[float], tol: float = DEFAULT_TOL) -> float:
    """
    Gauge of ``conv(vertices + {0})`` at ``x``: the least total weight of a nonnegative combination of
    the vertices equal to ``x`` (``inf`` when ``x`` is outside their cone).
    """
    x = np.asarray(x, dtype=float)
    if not x.any():
        return 0.0
    if not len(vertices):
        return float("inf")
    result = linprog(np.ones(len(vertices)), A_eq=np.asarray(vertices).T, b_eq=x, tol=tol)
    return result.objective if result.status is LPStatus.OPTIMAL else float("inf")


class OrthantPiece(NamedTuple):
    """
    One polytope of the construction.

    ``signs``/``tau`` are None for the single piece of a supersymmetric or declared ball. Otherwise
    ``tau`` is the label sign pattern of the orthant and the piece contributes the body
    ``{p : tau_j (p_j - q_j) <= 0 for some q in hull(vertices) within the orthant}``.
    """

    signs: Optional[SignPattern]
    tau: Optional[Tuple[int, ...]]
    directions: np.ndarray
    scales: np.ndarray
    vertices: np.ndarray

    def hull_gauge(self, x: Sequence[float]) -> float:
        return polytope_gauge(self.vertices, x)

    def gauge(self, x: Sequence[float]) -> float:
        if self.tau is None:
            return self.hull_gauge(x)
        x = np.asarray(x, dtype=float)
        tau = np.asarray(self.tau, dtype=float)
        rhs = np.maximum(tau * x, 0.0)
        if not rhs.any():
            return 0.0
        result = linprog(np.ones(len(self.vertices)), A_ub=-(tau[:, None] * self.vertices.T), b_ub=-rhs)
        if result.status is not LPStatus.OPTIMAL:
            raise LPError(f"OrthantPiece.gauge: orthant {self.signs} LP is {result.status.value}")
        return result.objective


class NormBall:
    """
    Unit ball of a monotone norm on R^N, given as one or more polytope pieces.

    The gauge is the maximum of the piece gauges. Gauge values are cached per input vector.
    """

    def __init__(self, dimension: int, pieces: Sequence[OrthantPiece], *, supersymmetric: bool = True,
                 hull: str = "full", counts: Optional[Tuple[int, ...]] = None) -> None:
        self.dimension = dimension
        self.pieces = tuple(pieces)
        self.supersymmetric = supersymmetric
        self.hull = hull
        self.counts = counts
        self._cache: Dict[Tuple[float, ...], float] = {}
        self._extreme: Optional[np.ndarray] = None

    def __repr__(self) -> str:
        return (f"NormBall(dimension={self.dimension}, pieces={len(self.pieces)}, "
                f"supersymmetric={self.supersymmetric}, hull={self.hull!r})")

    @classmethod
    def from_vertices(cls, vertices: Sequence[Sequence[float]]) -> "NormBall":
        """Declared ball: the convex hull of the given points and their negatives."""
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or not len(v):
            raise ValidationError("NormBall.from_vertices: need a non-empty list of points")
        v = np.unique(np.vstack([v, -v]), axis=0)
        piece = OrthantPiece(None, None, np.zeros((0, v.shape[1]), dtype=int), np.ones(len(v)), v)
        ball = cls(v.shape[1], [piece], hull="declared")
        for e in np.eye(v.shape[1]):
            if not np.isfinite(polytope_gauge(v, e)):
                raise ValidationError("NormBall.from_vertices: points do not span a full-dimensional ball")
        return ball

    def _vector(self, x: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.dimension:
            raise ValidationError(f"gauge: vector of length {x.size} for a ball in dimension {self.dimension}")
        return x

    def gauge(self, x: Sequence[float]) -> float:
        x = self._vector(x)
        key = tuple(x.tolist())
        if key not in self._cache:
            value = max((p.gauge(x) for p in self.pieces), default=0.0) if x.any() else 0.0
            if not np.isfinite(value):
                raise LPError(f"gauge: {key} is outside the cone of the ball's vertices")
            self._cache[key] = value
        return self._cache[key]

    def orthant_gauges(self, x: Sequence[float]) -> Tuple[float, ...]:
        x = self._vector(x)
        return tuple(p.gauge(x) for p in self.pieces)

    def contains(self, x: Sequence[float], tol: float = DEFAULT_TOL) -> bool:
        return self.gauge(x) <= 1.0 + tol

    def candidates(self) -> np.ndarray:
        """Every piece vertex, duplicates removed, in order of first appearance."""
        if not self.pieces:
            return np.zeros((0, self.dimension))
        stacked = np.vstack([p.vertices for p in self.pieces])
        _, first = np.unique(stacked, axis=0, return_index=True)
        return stacked[np.sort(first)]

    def extreme_points(self, tol: float = DEFAULT_TOL) -> np.ndarray:
        """
        Vertices of the ball among the piece vertices: boundary candidates that are not in the
        convex hull of the other boundary candidates. Rows are sorted lexicographically.
        """
        if self._extreme is None:
            cand = self.candidates()
            on_boundary = np.array([v for v in cand if abs(self.gauge(v) - 1.0) <= tol]).reshape(-1, self.dimension)
            keep = [k for k, v in enumerate(on_boundary)
                    if polytope_gauge(np.delete(on_boundary, k, axis=0), v, tol) > 1.0 + tol]
            ext = on_boundary[keep]
            self._extreme = ext[np.lexsort(ext.T[::-1])] if len(ext) else ext
            logger.debug(f"extreme_points: {len(ext)} of {len(cand)} candidates")
        return self._extreme

    def describe(self) -> Dict[str, object]:
        """JSON-ready summary with every piece's directions and scales."""
        return {
            "dimension": self.dimension,
            "supersymmetric": self.supersymmetric,
            "hull": self.hull,
            "counts": list(self.counts) if self.counts is not None else None,
            "pieces": [{
                "signs": list(p.signs) if p.signs is not None else None,
                "tau": list(p.tau) if p.tau is not None else None,
                "directions": p.directions.tolist(),
                "scales": p.scales.tolist(),
                "vertices": p.vertices.tolist(),
            } for p in self.pieces],
        }


def gauge(ball: NormBall, x: Sequence[float]) -> float:
    return ball.gauge(x)


def extreme_points(ball: NormBall, tol: float = DEFAULT_TOL) -> np.ndarray:
    return ball.extreme_points(tol)


def _directions(layout: LabelLayout, hull: str) -> np.ndarray:
    d = np.array(list(itertools.product((-1, 0, 1), repeat=layout.total)), dtype=int)
    d = d[np.abs(d).sum(axis=1) > 0]
    if hull == "good_pairs":
        d = d[[_single_signed(row, layout) for row in d]]
    return d


def _piece(cost: MultiMaterialCost, layout: LabelLayout, directions: np.ndarray, signs: Optional[SignPattern],
           tau: Optional[Tuple[int, ...]]) -> OrthantPiece:
    groups = np.zeros((layout.total, layout.materials), dtype=int)
    groups[np.arange(layout.total), layout.material] = 1
    sums = np.abs(directions) @ groups
    values: Dict[Multiplicity, float] = {}
    scales = np.empty(len(directions))
    for k, row in enumerate(sums):
        key = tuple(int(c) for c in row)
        if key not in values:
            values[key] = cost(key)
        scales[k] = values[key]
    if (scales <= 0).any():
        raise PreconditionError(f"build_ball: cost vanishes on a nonzero multiplicity (orthant {signs})")
    return OrthantPiece(signs, tau, directions, scales, directions / scales[:, None])


def _counterexamples(report: AxiomReport, *axioms: str) -> List[Counterexample]:
    return [c for c in report.counterexamples if c.axiom in axioms]


def build_ball(cost: MultiMaterialCost, layout: LabelLayout, *, hull: str = "full", enforce_axioms: bool = True,
               n_max: int = N_MAX) -> NormBall:
    """
    Build the norm ball for a cost on the labels of a layout.

    :param cost:           Cost with ``m`` materials; its box must contain ``[-N_i, N_i]``.
    :param layout:         Label layout of the boundary.
    :param hull:           ``"full"`` uses every direction in {-1, 0, 1}^N, ``"good_pairs"`` only the
                           directions whose material groups are single-signed (a smaller ball with
                           the same values on every label vector of a multiplicity).
    :param enforce_axioms: Refuse costs that are not even, positive and increasing, or whose
                           declared comparison norm shows they are not sublinear.
    :param n_max:          Largest accepted label count.

    :return:               The ball; one piece when the cost is supersymmetric, one per sign
                           orthant otherwise.
    """
    if hull not in HULLS:
        raise ValidationError(f"build_ball: hull must be one of {HULLS}")
    if cost.materials != layout.materials:
        raise ValidationError(f"build_ball: cost has {cost.materials} materials, layout has {layout.materials}")
    n = layout.total
    if n > n_max:
        raise ResourceLimitError(f"build_ball: {n} labels exceed the limit of {n_max}")
    if not cost.covers(layout.counts):
        raise DomainError(f"build_ball: cost box {cost.box} does not contain {layout.counts}")
    if n == 0:
        return NormBall(0, [], hull=hull, counts=layout.counts)

    report = check_axioms(cost, layout.counts)
    if enforce_axioms:
        if not (report.even_and_positive and report.increasing):
            raise PreconditionError(f"build_ball: cost fails the axioms: "
                                    f"{_counterexamples(report, 'even_and_positive', 'increasing')}")
        if report.sublinear_or_concave is False:
            raise PreconditionError(f"build_ball: cost is not sublinear: {_counterexamples(report, 'sublinear')}")
        if report.sublinear_or_concave is None:
            logger.info(f"build_ball: {cost.kind} cost declares no comparison norm, the ball is not certified a priori")

    directions = _directions(layout, hull)
    if report.supersymmetric:
        pieces = [_piece(cost, layout, directions, None, None)]
    else:
        pieces = []
        seen = set()
        for signs in itertools.product((1, -1), repeat=layout.materials):
            tau = tuple(signs[layout.material[j]] for j in range(n))
            if tau in seen:
                continue
            seen.add(tau)
            pieces.append(_piece(symmetrize_for_orthant(cost, signs), layout, directions, signs, tau))
    logger.info(f"build_ball: N={n}, {len(pieces)} piece(s) of {len(directions)} vertices, "
                f"supersymmetric={report.supersymmetric}, hull={hull}")
    return NormBall(n, pieces, supersymmetric=report.supersymmetric, hull=hull, counts=layout.counts)


class EqnMainWitness(NamedTuple):
    theta: Multiplicity
    sigma: Sigma
    vector: Multiplicity
    cost: float
    gauge: float


class EqnMainReport(NamedTuple):
    passed: bool
    max_residual: float
    mode: str
    checked: int
    witness: Optional[EqnMainWitness]


def verify_eqn_main(cost: MultiMaterialCost, ball: NormBall, layout: LabelLayout, *, tol: float = DEFAULT_TOL,
                    max_perms: int = MAX_PERMS, seed: Optional[int] = None) -> EqnMainReport:
    """
    Check ``C(theta) == gauge(label vector of theta under sigma)`` for every ``theta`` in the box
    ``[-N_i, N_i]`` and every relabelling (or a seeded sample of ``max_perms`` relabellings).

    :return: Report with the largest residual and the worst ``(theta, sigma)`` when it exceeds ``tol``.
    """
    if ball.dimension != layout.total:
        raise PreconditionError(f"verify_eqn_main: ball dimension {ball.dimension} != {layout.total} labels")
    sigmas, mode = search_sigmas(layout, max_perms, seed)
    worst = 0.0
    witness = None
    checked = 0
    for theta in itertools.product(*(range(-c, c + 1) for c in layout.counts)):
        c = cost(theta)
        for sigma in sigmas:
            v = eqn_main_vector(layout, theta, sigma)
            g = ball.gauge(v)
            checked += 1
            if abs(c - g) > worst:
                worst = abs(c - g)
                if worst > tol:
                    witness = EqnMainWitness(tuple(theta), sigma, v, c, g)
    passed = worst <= tol
    if not passed:
        logger.warning(f"verify_eqn_main: residual {worst:.3g} at {witness}")
    return EqnMainReport(passed, worst, mode, checked, witness)


class MonotonicityReport(NamedTuple):
    absolute: bool
    monotone: bool
    max_absolute_gap: float
    max_monotone_violation: float
    absolute_witness: Optional[Tuple[float, ...]]
    monotone_witness: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]]


def check_monotone_absolute(ball: NormBall, sample_count: int = 200, seed: Optional[int] = None,
                            points: Sequence[Sequence[float]] = (), tol: float = DEFAULT_TOL) -> MonotonicityReport:
    """
    Sample ``gauge(|x|) == gauge(x)`` (absoluteness) and ``gauge(y) <= gauge(x)`` for ``y`` obtained by
    shrinking one coordinate of ``x`` toward zero (monotonicity).

    :param points: Extra points always checked, each also against every one-coordinate shrink to zero.
    """
    rng = np.random.default_rng(seed)
    n = ball.dimension
    if n == 0:
        return MonotonicityReport(True, True, 0.0, 0.0, None, None)
    xs = [np.asarray(p, dtype=float) for p in points] + list(rng.uniform(-2.0, 2.0, size=(sample_count, n)))
    gap, violation = 0.0, 0.0
    abs_witness = mono_witness = None
    for k, x in enumerate(xs):
        g = ball.gauge(x)
        d = abs(ball.gauge(np.abs(x)) - g)
        if d > gap:
            gap = d
            abs_witness = tuple(x.tolist()) if d > tol else abs_witness
        if k < len(points):
            shrunk = [np.where(np.arange(n) == j, 0.0, x) for j in range(n)]
        else:
            j = int(rng.integers(n))
            shrunk = [np.where(np.arange(n) == j, x * rng.uniform(), x)]
        for y in shrunk:
            d = ball.gauge(y) - g
            if d > violation:
                violation = d
                mono_witness = (tuple(y.tolist()), tuple(x.tolist())) if d > tol else mono_witness
    return MonotonicityReport(gap <= tol, violation <= tol, gap, violation, abs_witness, mono_witness)
