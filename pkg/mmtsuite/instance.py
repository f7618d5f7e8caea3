"""
JSON instance documents.

One document describes a boundary, a cost, optional networks, an optional ball declaration,
calibration block, grid and solve options. Writing is canonical: keys are sorted and every float is
rounded to 12 significant digits, so ``write(read(write(doc))) == write(doc)``.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Union

import numpy as np

from .calibration import ConstantForm
from .costs import MultiMaterialCost, cost_descriptor, cost_from_descriptor
from .errors import InstanceFormatError, MMTError
from .log import logger
from .model import Atom, Boundary, LabeledNetwork, Network
from .norm import HULLS, LabelLayout, NormBall, build_ball, label_layout
from .solver import GridSpec, SolveOptions

VERSION = "mmtsuite/1"
AnyNetwork = Union[Network, LabeledNetwork]


class BallDeclaration(NamedTuple):
    hull: str = "full"
    vertices: Optional[List[List[float]]] = None
    """Explicit ball (symmetric closure added); overrides the construction from the cost."""


class CalibrationBlock(NamedTuple):
    form: ConstantForm
    network: str
    competitor: Optional[str] = None


class InstanceDocument(NamedTuple):
    dimension: int
    materials: int
    boundary: Boundary
    cost: Optional[MultiMaterialCost] = None
    ball: Optional[BallDeclaration] = None
    networks: Mapping[str, AnyNetwork] = {}
    calibration: Optional[CalibrationBlock] = None
    grid: Optional[GridSpec] = None
    solve: Mapping[str, Any] = {}
    version: str = VERSION

    def layout(self) -> LabelLayout:
        return label_layout(self.boundary)

    def require_cost(self) -> MultiMaterialCost:
        if self.cost is None:
            raise InstanceFormatError("instance has no cost", "$.cost")
        return self.cost

    def network(self, name: Optional[str] = None, labeled: Optional[bool] = None) -> AnyNetwork:
        """
        Look up a network by name; without a name, the only network of the requested kind.

        :raises InstanceFormatError: when no single match exists.
        """
        if name is not None:
            if name not in self.networks:
                raise InstanceFormatError(f"no network named {name!r}", "$.networks")
            return self.networks[name]
        matches = [n for n in self.networks.values()
                   if labeled is None or isinstance(n, LabeledNetwork) == labeled]
        if len(matches) != 1:
            kind = "" if labeled is None else ("labeled " if labeled else "unlabeled ")
            raise InstanceFormatError(f"expected exactly one {kind}network, found {len(matches)}", "$.networks")
        return matches[0]

    def build_ball(self, hull: Optional[str] = None) -> NormBall:
        """Ball declared by the document, or the one constructed from its cost."""
        decl = self.ball or BallDeclaration()
        if decl.vertices is not None:
            return NormBall.from_vertices(decl.vertices)
        return build_ball(self.require_cost(), self.layout(), hull=hull or decl.hull)

    def solve_options(self, **overrides: Any) -> SolveOptions:
        """Defaults, then the document's ``solve`` block, then non-None ``overrides``."""
        values = dict(self.solve)
        values.update({k: v for k, v in overrides.items() if v is not None})
        unknown = set(values) - set(SolveOptions._fields)
        if unknown:
            raise InstanceFormatError(f"unknown solve options {sorted(unknown)}", "$.solve")
        return SolveOptions(**values)


def _fail(message: str, path: str) -> InstanceFormatError:
    return InstanceFormatError(f"parse_instance: {message}", path)


def _field(obj: Any, key: str, path: str, required: bool = True) -> Any:
    if not isinstance(obj, dict):
        raise _fail("expected an object", path)
    if key not in obj:
        if required:
            raise _fail(f"missing field {key!r}", path)
        return None
    return obj[key]


def _list(value: Any, path: str) -> List[Any]:
    if not isinstance(value, list):
        raise _fail("expected an array", path)
    return value


def _int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail("expected an integer", path)
    return value


def _float(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail("expected a number", path)
    return float(value)


def _floats(value: Any, path: str, length: Optional[int] = None) -> List[float]:
    out = [_float(v, f"{path}[{k}]") for k, v in enumerate(_list(value, path))]
    if length is not None and len(out) != length:
        raise _fail(f"expected {length} numbers, got {len(out)}", path)
    return out


def _ints(value: Any, path: str, length: Optional[int] = None) -> List[int]:
    out = [_int(v, f"{path}[{k}]") for k, v in enumerate(_list(value, path))]
    if length is not None and len(out) != length:
        raise _fail(f"expected {length} integers, got {len(out)}", path)
    return out


def _parse_network(raw: Any, path: str, dimension: int) -> AnyNetwork:
    labeled = bool(_field(raw, "labeled", path, required=False))
    rank = _int(_field(raw, "rank", path), f"{path}.rank")
    vertices = [_floats(v, f"{path}.vertices[{k}]", dimension)
                for k, v in enumerate(_list(_field(raw, "vertices", path), f"{path}.vertices"))]
    edges = []
    for k, e in enumerate(_list(_field(raw, "edges", path), f"{path}.edges")):
        epath = f"{path}.edges[{k}]"
        e = _list(e, epath)
        if len(e) != 3:
            raise _fail("edge must be [tail, head, multiplicity]", epath)
        edges.append((_int(e[0], f"{epath}[0]"), _int(e[1], f"{epath}[1]"), _ints(e[2], f"{epath}[2]", rank)))
    kind = LabeledNetwork if labeled else Network
    try:
        return kind(tuple(tuple(v) for v in vertices), tuple(edges), rank)  # type: ignore
    except MMTError as e:
        raise _fail(str(e), path) from None


def _document(raw: Any) -> InstanceDocument:
    version = _field(raw, "version", "$")
    if version != VERSION:
        raise _fail(f"unsupported version {version!r}", "$.version")
    dimension = _int(_field(raw, "dimension", "$"), "$.dimension")
    materials = _int(_field(raw, "materials", "$"), "$.materials")
    if dimension < 1 or materials < 1:
        raise _fail("dimension and materials must be positive", "$")

    atoms = []
    for k, a in enumerate(_list(_field(raw, "boundary", "$"), "$.boundary")):
        path = f"$.boundary[{k}]"
        atoms.append(Atom(tuple(_floats(_field(a, "point", path), f"{path}.point", dimension)),
                          tuple(_ints(_field(a, "weight", path), f"{path}.weight", materials))))
    try:
        boundary = Boundary(tuple(atoms), materials)
    except MMTError as e:
        raise _fail(str(e), "$.boundary") from None

    cost = None
    if raw.get("cost") is not None:
        if not isinstance(raw["cost"], dict):
            raise _fail("expected an object", "$.cost")
        try:
            cost = cost_from_descriptor(raw["cost"])
        except MMTError as e:
            raise _fail(str(e), "$.cost") from None
        if cost.materials != materials:
            raise _fail(f"cost has {cost.materials} materials, document has {materials}", "$.cost")

    ball = None
    if raw.get("ball") is not None:
        b = raw["ball"]
        hull = _field(b, "hull", "$.ball", required=False) or "full"
        if hull not in HULLS:
            raise _fail(f"hull must be one of {HULLS}", "$.ball.hull")
        vertices = _field(b, "vertices", "$.ball", required=False)
        if vertices is not None:
            vertices = [_floats(v, f"$.ball.vertices[{k}]") for k, v in enumerate(_list(vertices, "$.ball.vertices"))]
        ball = BallDeclaration(hull, vertices)

    networks: Dict[str, AnyNetwork] = {}
    raw_networks = _field(raw, "networks", "$", required=False) or {}
    if not isinstance(raw_networks, dict):
        raise _fail("expected an object", "$.networks")
    for name in sorted(raw_networks):
        networks[name] = _parse_network(raw_networks[name], f"$.networks.{name}", dimension)

    calibration = None
    if raw.get("calibration") is not None:
        c = raw["calibration"]
        rows = [_floats(r, f"$.calibration.form[{k}]", dimension)
                for k, r in enumerate(_list(_field(c, "form", "$.calibration"), "$.calibration.form"))]
        network = _field(c, "network", "$.calibration")
        competitor = _field(c, "competitor", "$.calibration", required=False)
        for key, name in (("network", network), ("competitor", competitor)):
            if name is not None and name not in networks:
                raise _fail(f"no network named {name!r}", f"$.calibration.{key}")
        try:
            form = ConstantForm(rows)
        except MMTError as e:
            raise _fail(str(e), "$.calibration.form") from None
        calibration = CalibrationBlock(form, network, competitor)

    grid = None
    if raw.get("grid") is not None:
        g = raw["grid"]
        grid = GridSpec(tuple(_floats(_field(g, "origin", "$.grid"), "$.grid.origin", 2)),  # type: ignore
                        _float(_field(g, "spacing", "$.grid"), "$.grid.spacing"),
                        tuple(_ints(_field(g, "shape", "$.grid"), "$.grid.shape", 2)))  # type: ignore
        if grid.spacing <= 0:
            raise _fail("spacing must be positive", "$.grid.spacing")

    solve = _field(raw, "solve", "$", required=False) or {}
    if not isinstance(solve, dict):
        raise _fail("expected an object", "$.solve")
    unknown = set(solve) - set(SolveOptions._fields)
    if unknown:
        raise _fail(f"unknown solve options {sorted(unknown)}", "$.solve")

    return InstanceDocument(dimension, materials, boundary, cost, ball, networks, calibration, grid, dict(solve))


def parse_instance(text: str) -> InstanceDocument:
    """
    Parse an instance document.

    :raises InstanceFormatError: with the ``line:column`` of a JSON syntax error, or the JSON path of
                                 the value that does not describe a valid object.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"parse_instance: invalid JSON: {e.msg}", f"{e.lineno}:{e.colno}") from None
    return _document(raw)


def read_instance(path: Union[str, Path]) -> InstanceDocument:
    logger.debug(f"read_instance: {path}")
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def _round(value: Any) -> Any:
    if isinstance(value, float):
        return float(f"{value:.12g}") + 0.0
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (np.floating,)):
        return _round(float(value))
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {str(k): _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    return value


def network_record(net: AnyNetwork) -> Dict[str, Any]:
    return {
        "labeled": isinstance(net, LabeledNetwork),
        "rank": net.rank,
        "vertices": [[float(c) for c in v] for v in net.vertices],
        "edges": [[e.tail, e.head, list(e.multiplicity)] for e in net.edges],
    }


def document_record(doc: InstanceDocument) -> Dict[str, Any]:
    """JSON-ready record of a document."""
    out: Dict[str, Any] = {
        "version": doc.version,
        "dimension": doc.dimension,
        "materials": doc.materials,
        "boundary": [{"point": [float(c) for c in a.point], "weight": list(a.weight)} for a in doc.boundary.atoms],
    }
    if doc.cost is not None:
        out["cost"] = cost_descriptor(doc.cost)
    if doc.ball is not None:
        out["ball"] = {"hull": doc.ball.hull}
        if doc.ball.vertices is not None:
            out["ball"]["vertices"] = [[float(c) for c in v] for v in doc.ball.vertices]
    if doc.networks:
        out["networks"] = {name: network_record(n) for name, n in doc.networks.items()}
    if doc.calibration is not None:
        out["calibration"] = {"form": doc.calibration.form.matrix.tolist(), "network": doc.calibration.network}
        if doc.calibration.competitor is not None:
            out["calibration"]["competitor"] = doc.calibration.competitor
    if doc.grid is not None:
        out["grid"] = {"origin": [float(c) for c in doc.grid.origin], "spacing": float(doc.grid.spacing),
                       "shape": list(doc.grid.shape)}
    if doc.solve:
        out["solve"] = dict(doc.solve)
    return out


def dumps(record: Any) -> str:
    """Canonical JSON text of any record."""
    return json.dumps(_round(record), sort_keys=True, indent=2) + "\n"


def write_instance(doc: InstanceDocument, path: Optional[Union[str, Path]] = None) -> str:
    """
    Canonical text of a document, also written to ``path`` when given.
    """
    text = dumps(document_record(doc))
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def with_networks(doc: InstanceDocument, networks: Mapping[str, AnyNetwork]) -> InstanceDocument:
    """Copy of ``doc`` with ``networks`` added (replacing networks of the same name)."""
    merged = dict(doc.networks)
    merged.update(networks)
    return doc._replace(networks=merged)

