"""
Constant calibrations: verification of the three calibration conditions for a labeled network and
the mass comparison they certify.

A constant form is an ``N x d`` matrix whose row ``j`` is the covector paired with label ``j``:
``<w; tau, theta> = sum_j theta_j <row_j, tau>``.
"""
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .constants import DEFAULT_TOL
from .errors import PreconditionError, ValidationError
from .log import logger
from .model import LabeledNetwork, boundary_of, mass
from .norm import NormBall


class ConstantForm:
    """
    Constant covector-valued form on R^d with values in R^N.

    :param matrix: ``N x d`` array of finite reals, one row per label.
    """

    def __init__(self, matrix: Sequence[Sequence[float]]) -> None:
        m = np.array(matrix, dtype=float)
        if m.ndim != 2:
            raise ValidationError("ConstantForm: matrix must be two-dimensional")
        if not np.isfinite(m).all():
            raise ValidationError("ConstantForm: matrix has non-finite entries")
        self.matrix = m

    def __repr__(self) -> str:
        return f"ConstantForm({self.matrix.tolist()})"

    @property
    def labels(self) -> int:
        return self.matrix.shape[0]

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def block_diagonal(cls, forms: Sequence["ConstantForm"]) -> "ConstantForm":
        """
        Stack per-material forms acting on disjoint label groups. For a cost that is a sum of
        single-material costs the stacked form calibrates whenever every block does.
        """
        dims = {f.dimension for f in forms}
        if len(dims) != 1:
            raise ValidationError("ConstantForm.block_diagonal: forms live in different dimensions")
        return cls(np.vstack([f.matrix for f in forms]))

    def pair(self, tau: Sequence[float], theta: Sequence[float]) -> float:
        return float(np.asarray(theta, dtype=float) @ (self.matrix @ np.asarray(tau, dtype=float)))

    def pairing(self, lnet: LabeledNetwork) -> float:
        """Integral of the form over a labeled network: ``sum_e theta_e . (W (head - tail))``."""
        self._check(lnet)
        return sum(self.pair(lnet.edge_vector(k), e.multiplicity) for k, e in enumerate(lnet.edges))

    def comass_at(self, g: Sequence[float]) -> float:
        """Euclidean norm of ``sum_j g_j row_j``."""
        return float(np.linalg.norm(np.asarray(g, dtype=float) @ self.matrix))

    def _check(self, lnet: LabeledNetwork) -> None:
        if lnet.labels != self.labels:
            raise PreconditionError(f"ConstantForm: {self.labels} rows for a network with {lnet.labels} labels")
        if lnet.vertices and lnet.dimension != self.dimension:
            raise PreconditionError(f"ConstantForm: form on R^{self.dimension}, network in R^{lnet.dimension}")


class Witness(NamedTuple):
    condition: str
    """``"tangency"`` (edge pairing differs from the gauge) or ``"comass"`` (extreme point above 1)."""
    where: Tuple[float, ...]
    """Edge index for tangency, extreme point for comass."""
    value: float
    expected: float


class CalibrationReport(NamedTuple):
    tangency_residual: float
    closed: bool
    max_comass: float
    verdict: bool
    witnesses: Tuple[Witness, ...]


def verify_calibration(form: ConstantForm, lnet: LabeledNetwork, ball: NormBall,
                       tol: float = DEFAULT_TOL) -> CalibrationReport:
    """
    Check the calibration conditions for a constant form.

    1. on every edge ``<w; tau_e, theta_e> == gauge(theta_e)``;
    2. ``dw == 0`` (constant forms are closed);
    3. ``|sum_j g_j row_j| <= 1`` at every extreme point ``g`` of the ball.

    Tangency witnesses report ``|<w; tau, theta>|``: the sign of the pairing depends on the edge
    orientation convention, its magnitude does not.

    :return: Report with the worst residual of each condition and the witnesses above ``tol``.
    """
    if ball.dimension != form.labels:
        raise PreconditionError(f"verify_calibration: ball dimension {ball.dimension} != {form.labels} form rows")
    form._check(lnet)
    witnesses: List[Witness] = []

    residual = 0.0
    for k, e in enumerate(lnet.edges):
        value = form.pair(lnet.edge_direction(k), e.multiplicity)
        expected = ball.gauge(e.multiplicity)
        residual = max(residual, abs(value - expected))
        if abs(value - expected) > tol:
            witnesses.append(Witness("tangency", (float(k),), abs(value), expected))

    comass = 0.0
    for g in ball.extreme_points():
        c = form.comass_at(g)
        comass = max(comass, c)
        if c > 1.0 + tol:
            witnesses.append(Witness("comass", tuple(g.tolist()), c, 1.0))

    verdict = residual <= tol and comass <= 1.0 + tol
    logger.info(f"verify_calibration: tangency residual {residual:.3g}, max comass {comass:.6f}, verdict {verdict}")
    return CalibrationReport(residual, True, comass, verdict, tuple(witnesses))


class MassGap(NamedTuple):
    calibrated: bool
    mass_calibrated: float
    pairing_calibrated: float
    pairing_competitor: float
    mass_competitor: float
    gap: float
    """``mass(competitor) - mass(calibrated)``."""
    stokes_residual: float
    """Difference of the two pairings; zero for a closed form and equal boundaries."""


def mass_gap_certificate(form: ConstantForm, lnet: LabeledNetwork, competitor: LabeledNetwork, ball: NormBall,
                         tol: float = DEFAULT_TOL) -> MassGap:
    """
    Evaluate the chain ``mass(lnet) = int w over lnet = int w over competitor <= mass(competitor)``.

    :raises ValidationError: when the two networks do not share a boundary.
    """
    if not boundary_of(lnet).same_as(boundary_of(competitor)):
        raise ValidationError("mass_gap_certificate: networks have different boundaries")
    report = verify_calibration(form, lnet, ball, tol)
    m1, m2 = mass(lnet, ball), mass(competitor, ball)
    p1, p2 = form.pairing(lnet), form.pairing(competitor)
    return MassGap(report.verdict, m1, p1, p2, m2, m2 - m1, abs(p1 - p2))
