"""Multi-material costs ``C: Z^m -> [0, inf)``, their axioms, and the extension from a finite box."""
import itertools
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Dict, Iterator, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .constants import AXIOM_TOL
from .errors import DomainError, PreconditionError, ValidationError
from .log import logger
from .model import as_multiplicity
from .types import Box, Multiplicity, SignPattern


class NormKind(Enum):
    L1 = "l1"
    LINF = "linf"
    LP = "lp"


class StarNorm(NamedTuple):
    """
    A monotone norm on R^m, optionally weighted per coordinate.

    Used as the comparison norm of the sublinearity axiom and as the outer norm of composite costs.
    """

    kind: NormKind = NormKind.L1
    p: float = 1.0
    weights: Optional[Tuple[float, ...]] = None

    def __call__(self, x: Sequence[float]) -> float:
        a = np.abs(np.asarray(x, dtype=float))
        if self.weights is not None:
            a = a * np.asarray(self.weights, dtype=float)
        if not a.size:
            return 0.0
        if self.kind is NormKind.L1:
            return float(a.sum())
        if self.kind is NormKind.LINF:
            return float(a.max())
        return float(np.sum(a ** self.p) ** (1.0 / self.p))

    def descriptor(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind.value}
        if self.kind is NormKind.LP:
            out["p"] = self.p
        if self.weights is not None:
            out["weights"] = list(self.weights)
        return out

    @classmethod
    def from_descriptor(cls, d: Mapping[str, Any]) -> "StarNorm":
        try:
            kind = NormKind(d.get("kind", "l1"))
        except ValueError:
            raise ValidationError(f"StarNorm: unknown norm kind {d.get('kind')!r}") from None
        p = float(d.get("p", 1.0))
        if kind is NormKind.LP and p < 1:
            raise ValidationError("StarNorm: p must be at least 1")
        weights = d.get("weights")
        if weights is not None and any(w <= 0 for w in weights):
            raise ValidationError("StarNorm: weights must be positive")
        return cls(kind, p, tuple(float(w) for w in weights) if weights is not None else None)


L1 = StarNorm()
LINF = StarNorm(NormKind.LINF)


class MultiMaterialCost:
    """
    A cost on integer multiplicity vectors.

    :param materials:  Number of materials ``m``.
    :param evaluator:  Function of an integer tuple of length ``m``.
    :param box:        Half-widths ``(a_1, ..., a_m)`` of the box the cost is defined on, None if total.
    :param star_norm:  Norm witnessing the sublinearity axiom, None when unknown.
    :param kind:       Builtin name, used for serialization.
    :param params:     Builtin parameters, used for serialization.
    """

    def __init__(self, materials: int, evaluator: Callable[[Multiplicity], float], *,
                 box: Optional[Sequence[int]] = None, star_norm: Optional[StarNorm] = None,
                 kind: str = "custom", params: Optional[Dict[str, Any]] = None) -> None:
        if materials < 1:
            raise ValidationError("MultiMaterialCost: need at least one material")
        if box is not None:
            box = tuple(int(a) for a in box)
            if len(box) != materials or min(box) < 0:
                raise ValidationError(f"MultiMaterialCost: bad box {box} for {materials} materials")
        self.materials = materials
        self.box: Optional[Box] = box
        self.star_norm = star_norm
        self.kind = kind
        self.params = params or {}
        self._evaluator = evaluator

    def __repr__(self) -> str:
        return f"MultiMaterialCost(kind={self.kind!r}, materials={self.materials}, box={self.box})"

    def __call__(self, theta: Sequence[int]) -> float:
        theta = as_multiplicity(theta)
        if len(theta) != self.materials:
            raise ValidationError(f"cost: {theta} does not have {self.materials} components")
        if not self.in_box(theta):
            raise DomainError(f"cost: {theta} lies outside the box {self.box}")
        return float(self._evaluator(theta))

    evaluate = __call__

    def in_box(self, theta: Sequence[int]) -> bool:
        return self.box is None or all(abs(z) <= a for z, a in zip(theta, self.box))

    def covers(self, box: Sequence[int]) -> bool:
        return self.box is None or all(b <= a for a, b in zip(self.box, box))

    def restricted(self, box: Sequence[int]) -> "MultiMaterialCost":
        """Same cost on a smaller box; raises DomainError when ``box`` leaves the current one."""
        if not self.covers(box):
            raise DomainError(f"restricted: box {tuple(box)} exceeds {self.box}")
        return MultiMaterialCost(self.materials, self._evaluator, box=box, star_norm=self.star_norm,
                                 kind=self.kind, params=self.params)

    def with_box(self, box: Sequence[int]) -> "MultiMaterialCost":
        """Attach a finite box to a total cost, or shrink the box of a finite one."""
        if self.box is not None:
            return self.restricted(box)
        return MultiMaterialCost(self.materials, self._evaluator, box=box, star_norm=self.star_norm,
                                 kind=self.kind, params=self.params)

    def box_points(self, box: Optional[Sequence[int]] = None) -> Iterator[Multiplicity]:
        box = box if box is not None else self.box
        if box is None:
            raise PreconditionError("box_points: cost has no finite box")
        return itertools.product(*(range(-a, a + 1) for a in box))


def _pow(z: int, alpha: float) -> float:
    # 0**0 is taken as 0 so the Steiner cost vanishes on zero multiplicity
    return 0.0 if z == 0 else abs(z) ** alpha


def _check_exponent(name: str, alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"{name}: exponent {alpha} outside [0, 1]")


def steiner() -> MultiMaterialCost:
    """``C(z) = 1`` for ``z != 0``: length-only Steiner tree cost."""
    return MultiMaterialCost(1, lambda z: 0.0 if z[0] == 0 else 1.0, star_norm=L1, kind="steiner")


def gilbert_steiner(alpha: float) -> MultiMaterialCost:
    """``C(z) = |z|^alpha`` with ``0 <= alpha <= 1``."""
    _check_exponent("gilbert_steiner", alpha)
    return MultiMaterialCost(1, lambda z: _pow(z[0], alpha), star_norm=L1, kind="gilbert_steiner",
                             params={"alpha": alpha})


def linear_combination(lambdas: Sequence[float], alphas: Sequence[float]) -> MultiMaterialCost:
    """``C(z) = sum_k lambda_k |z|^alpha_k``."""
    if len(lambdas) != len(alphas) or not lambdas:
        raise ValidationError("linear_combination: need matching non-empty coefficient and exponent lists")
    if any(l <= 0 for l in lambdas):
        raise ValidationError("linear_combination: coefficients must be positive")
    for a in alphas:
        _check_exponent("linear_combination", a)
    pairs = tuple(zip((float(l) for l in lambdas), (float(a) for a in alphas)))
    return MultiMaterialCost(1, lambda z: sum(l * _pow(z[0], a) for l, a in pairs), star_norm=L1,
                             kind="linear_combination", params={"lambdas": list(lambdas), "alphas": list(alphas)})


def max_of(costs: Sequence[MultiMaterialCost]) -> MultiMaterialCost:
    """Pointwise maximum of costs sharing the same number of materials."""
    if not costs or len({c.materials for c in costs}) != 1:
        raise ValidationError("max_of: need one or more costs with the same number of materials")
    m = costs[0].materials
    parts = tuple(costs)
    return MultiMaterialCost(m, lambda z: max(c(z) for c in parts), star_norm=L1 if m == 1 else None,
                             kind="max_of", params={"costs": list(parts)})


def plc(lambda1: float, lambda2: float, alpha1: float, alpha2: float) -> MultiMaterialCost:
    """Two-material cost ``max(lambda1 |z1|^alpha1, lambda2 |z2|^alpha2)``."""
    if lambda1 <= 0 or lambda2 <= 0:
        raise ValidationError("plc: coefficients must be positive")
    _check_exponent("plc", alpha1)
    _check_exponent("plc", alpha2)
    return MultiMaterialCost(2, lambda z: max(lambda1 * _pow(z[0], alpha1), lambda2 * _pow(z[1], alpha2)),
                             kind="plc", params={"lambda1": lambda1, "lambda2": lambda2,
                                                 "alpha1": alpha1, "alpha2": alpha2})


def composite(star_norm: StarNorm, single_costs: Sequence[MultiMaterialCost]) -> MultiMaterialCost:
    """``C(z) = |(C_1(z_1), ..., C_m(z_m))|_*`` for single-material costs ``C_i``."""
    if not single_costs or any(c.materials != 1 for c in single_costs):
        raise ValidationError("composite: every component cost must be single-material")
    parts = tuple(single_costs)
    return MultiMaterialCost(len(parts), lambda z: star_norm([c((zi,)) for c, zi in zip(parts, z)]),
                             kind="composite", params={"star_norm": star_norm, "costs": list(parts)})


def mailing(alpha: float, materials: int = 2) -> MultiMaterialCost:
    """
    ``C(z) = (sum of positive z_i)^alpha + |sum of negative z_i|^alpha``.

    Materials travelling in the same direction share the cost; with ``alpha = 0`` this is the
    mailing-Steiner cost (1 for one-directional flow, 2 for opposite flows).

    No comparison norm is declared. Under L1 the ratio ``C(z) / |z|`` already grows from ``(2, 0)``
    to ``(2, -1)``; the ball built from this cost is checked with ``verify_eqn_main`` instead.
    """
    _check_exponent("mailing", alpha)

    def evaluate(z: Multiplicity) -> float:
        return _pow(sum(v for v in z if v > 0), alpha) + _pow(sum(v for v in z if v < 0), alpha)

    return MultiMaterialCost(materials, evaluate, kind="mailing",
                             params={"alpha": alpha, "materials": materials})


def urban(a: float, b: float) -> MultiMaterialCost:
    """``C(z) = min(a |z|, |z| + b)``: walking versus taking a fixed-fare line."""
    if a <= 0 or b < 0:
        raise ValidationError("urban: need a > 0 and b >= 0")
    return MultiMaterialCost(1, lambda z: min(a * abs(z[0]), abs(z[0]) + b), star_norm=L1, kind="urban",
                             params={"a": a, "b": b})


def table(values: Mapping[Sequence[int], float], materials: int) -> MultiMaterialCost:
    """
    Explicit cost table; ``-z`` takes the value listed for ``z`` and zero maps to zero.

    The box is the smallest one containing every listed multiplicity.
    """
    entries: Dict[Multiplicity, float] = {}
    for z, v in values.items():
        z = as_multiplicity(z)
        if len(z) != materials:
            raise ValidationError(f"table: entry {z} does not have {materials} components")
        neg = tuple(-c for c in z)
        if neg in entries and entries[neg] != float(v):
            raise ValidationError(f"table: entries for {z} and {neg} disagree")
        entries[z] = float(v)
    box = tuple(max((abs(z[i]) for z in entries), default=0) for i in range(materials))

    def evaluate(z: Multiplicity) -> float:
        if not any(z):
            return 0.0
        if z in entries:
            return entries[z]
        neg = tuple(-c for c in z)
        if neg in entries:
            return entries[neg]
        raise DomainError(f"table: no value listed for {z}")

    params = {"materials": materials, "values": [[list(z), v] for z, v in sorted(entries.items())]}
    return MultiMaterialCost(materials, evaluate, box=box, star_norm=L1 if materials == 1 else None,
                             kind="table", params=params)


def from_function(materials: int, fn: Callable[[Multiplicity], float], box: Optional[Sequence[int]] = None,
                  star_norm: Optional[StarNorm] = None) -> MultiMaterialCost:
    """Wrap an arbitrary Python function. Such costs cannot be written to instance files."""
    return MultiMaterialCost(materials, fn, box=box, star_norm=star_norm)


class Counterexample(NamedTuple):
    axiom: str
    points: Tuple[Multiplicity, ...]
    values: Tuple[float, ...]


class AxiomReport(NamedTuple):
    even_and_positive: bool
    increasing: bool
    subadditive: bool
    sublinear: Optional[bool]
    """None when the cost declares no comparison norm."""
    supersymmetric: bool
    concave: Optional[bool]
    """Single-material costs only: concavity on the naturals, which replaces sublinearity there."""
    counterexamples: Tuple[Counterexample, ...]

    @property
    def passed(self) -> bool:
        return self.even_and_positive and self.increasing and self.subadditive and self.sublinear is not False

    @property
    def sublinear_or_concave(self) -> Optional[bool]:
        if self.sublinear is None and self.concave:
            return True
        return self.sublinear


def down_set(y: Sequence[int]) -> Iterator[Multiplicity]:
    """Every ``x`` with ``x <= y`` in the coordinatewise order (``y`` included)."""
    return itertools.product(*(range(0, v + 1) if v >= 0 else range(v, 1) for v in y))


def check_axioms(cost: MultiMaterialCost, box: Optional[Sequence[int]] = None, tol: float = AXIOM_TOL) -> AxiomReport:
    """
    Exhaustively check the cost axioms on a finite box.

    :param cost: Cost to check.
    :param box:  Box to check on (defaults to the cost's own box, which then must be finite).
    :param tol:  Slack allowed in every inequality.

    :return:     Report with one flag per axiom and the first counterexample found for each failed one.
    """
    box = tuple(box) if box is not None else cost.box
    if box is None:
        raise PreconditionError("check_axioms: a finite box is required")
    m = cost.materials
    values = {z: cost(z) for z in cost.box_points(box)}
    zero = (0,) * m
    found: Dict[str, Counterexample] = {}

    def fail(axiom: str, points: Tuple[Multiplicity, ...]) -> None:
        if axiom not in found:
            found[axiom] = Counterexample(axiom, points, tuple(values[p] for p in points))

    if abs(values[zero]) > tol:
        fail("even_and_positive", (zero,))
    for z, v in values.items():
        neg = tuple(-c for c in z)
        if z != zero and (v <= tol or abs(v - values[neg]) > tol):
            fail("even_and_positive", (z, neg))
        if abs(v - values[tuple(abs(c) for c in z)]) > tol:
            fail("supersymmetric", (z, tuple(abs(c) for c in z)))
        for x in down_set(z):
            if values[x] > v + tol:
                fail("increasing", (x, z))

    points = list(values)
    for k, x in enumerate(points):
        for y in points[k:]:
            s = tuple(a + b for a, b in zip(x, y))
            if s in values and values[s] > values[x] + values[y] + tol:
                fail("subadditive", (x, y))

    sublinear: Optional[bool] = None
    if cost.star_norm is not None:
        norm = cost.star_norm
        for z, v in values.items():
            if z == zero:
                continue
            ratio = v / norm(z)
            for x in down_set(z):
                if x != zero and ratio > values[x] / norm(x) + tol:
                    fail("sublinear", (x, z))
        sublinear = "sublinear" not in found

    concave: Optional[bool] = None
    if m == 1:
        g = [values[(k,)] for k in range(box[0] + 1)]
        concave = all(g[k + 1] - 2 * g[k] + g[k - 1] <= tol for k in range(1, len(g) - 1))

    report = AxiomReport(
        even_and_positive="even_and_positive" not in found,
        increasing="increasing" not in found,
        subadditive="subadditive" not in found,
        sublinear=sublinear,
        supersymmetric="supersymmetric" not in found,
        concave=concave,
        counterexamples=tuple(found.values()),
    )
    logger.debug(f"check_axioms: {cost!r} on box {box}: {report[:6]}")
    return report


def extend_from_rectangle(cost: MultiMaterialCost, box: Optional[Sequence[int]] = None) -> MultiMaterialCost:
    """
    Extend a cost known on its finite box ``R`` to a larger box (or everywhere) by
    ``C(x) = max{C(y) : y in R, y <= x}``.

    The extension agrees with the cost on ``R``, is increasing, and is subadditive when the
    original cost is.

    :param cost: Cost with a finite box.
    :param box:  Box of the extension, None for all of Z^m.
    """
    if cost.box is None:
        raise PreconditionError("extend_from_rectangle: cost has no finite box to extend from")
    rect = cost.box

    @lru_cache(maxsize=None)
    def evaluate(z: Multiplicity) -> float:
        clamped = tuple(max(-a, min(a, c)) for a, c in zip(rect, z))
        return max(cost(y) for y in down_set(clamped))

    return MultiMaterialCost(cost.materials, evaluate, box=box, star_norm=cost.star_norm, kind="extension",
                             params={"cost": cost, "box": list(rect)})


def symmetrize_for_orthant(cost: MultiMaterialCost, signs: SignPattern) -> MultiMaterialCost:
    """The supersymmetric cost ``x -> C(|x| * s)`` attached to the orthant with sign pattern ``s``."""
    if len(signs) != cost.materials or any(s not in (-1, 1) for s in signs):
        raise ValidationError(f"symmetrize_for_orthant: bad sign pattern {signs}")
    return MultiMaterialCost(cost.materials, lambda z: cost(tuple(s * abs(c) for s, c in zip(signs, z))),
                             box=cost.box, star_norm=cost.star_norm, kind="orthant",
                             params={"cost": cost, "signs": list(signs)})


BUILTIN_COSTS = ("steiner", "gilbert_steiner", "linear_combination", "max_of", "plc", "composite", "mailing",
                 "urban", "table")


def cost_descriptor(cost: MultiMaterialCost) -> Dict[str, Any]:
    """JSON-ready ``{"kind", "params", "box"}`` record of a builtin cost."""
    if cost.kind not in BUILTIN_COSTS:
        raise ValidationError(f"cost_descriptor: {cost.kind!r} costs cannot be serialized")
    params: Dict[str, Any] = {}
    for key, value in cost.params.items():
        if key == "costs":
            params[key] = [cost_descriptor(c) for c in value]
        elif isinstance(value, StarNorm):
            params[key] = value.descriptor()
        else:
            params[key] = value
    out: Dict[str, Any] = {"kind": cost.kind, "params": params}
    if cost.box is not None:
        out["box"] = list(cost.box)
    return out


def cost_from_descriptor(d: Mapping[str, Any]) -> MultiMaterialCost:
    """Inverse of :func:`cost_descriptor`."""
    kind = d.get("kind")
    p = dict(d.get("params", {}))
    try:
        if kind == "steiner":
            cost = steiner()
        elif kind == "gilbert_steiner":
            cost = gilbert_steiner(float(p["alpha"]))
        elif kind == "linear_combination":
            cost = linear_combination(p["lambdas"], p["alphas"])
        elif kind == "max_of":
            cost = max_of([cost_from_descriptor(c) for c in p["costs"]])
        elif kind == "plc":
            cost = plc(float(p["lambda1"]), float(p["lambda2"]), float(p["alpha1"]), float(p["alpha2"]))
        elif kind == "composite":
            cost = composite(StarNorm.from_descriptor(p["star_norm"]), [cost_from_descriptor(c) for c in p["costs"]])
        elif kind == "mailing":
            cost = mailing(float(p["alpha"]), int(p.get("materials", 2)))
        elif kind == "urban":
            cost = urban(float(p["a"]), float(p["b"]))
        elif kind == "table":
            cost = table({tuple(z): v for z, v in p["values"]}, int(p["materials"]))
        else:
            raise ValidationError(f"cost_from_descriptor: unknown cost kind {kind!r}")
    except KeyError as e:
        raise ValidationError(f"cost_from_descriptor: {kind} cost is missing parameter {e}") from None
    except (TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"cost_from_descriptor: bad {kind} parameters: {e}") from None
    if "star_norm" in d:
        cost.star_norm = StarNorm.from_descriptor(d["star_norm"]) if d["star_norm"] is not None else None
    if d.get("box") is not None:
        cost = cost.with_box(d["box"])
    return cost
