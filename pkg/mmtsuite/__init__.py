"""Discrete multi-material branched transport: costs, norms, calibrations and small exact solvers."""
__all__ = ["Atom", "Boundary", "LabeledBoundary", "Edge", "Network", "LabeledNetwork", "boundary_of", "energy", "mass",
           "MultiMaterialCost", "StarNorm", "NormKind", "AxiomReport", "check_axioms", "extend_from_rectangle",
           "symmetrize_for_orthant", "steiner", "gilbert_steiner", "linear_combination", "max_of", "plc",
           "composite", "mailing", "urban", "table", "from_function", "cost_descriptor", "cost_from_descriptor",
           "LabelLayout", "NormBall", "label_layout", "boundary_sigma", "build_ball", "gauge", "extreme_points",
           "verify_eqn_main", "check_monotone_absolute",
           "flow_decompose", "remove_cycles", "lift", "project",
           "ConstantForm", "verify_calibration", "mass_gap_certificate",
           "Topology", "enumerate_topologies",
           "SolveOptions", "SolveResult", "GridSpec", "optimize_geometry", "solve_mmtp", "grid_oracle", "solve_on_grid",
           "InstanceDocument", "parse_instance", "read_instance", "write_instance",
           "RenderStyle", "render_network_svg", "render_ball_svg",
           "MMTError", "ValidationError", "DomainError", "PreconditionError", "ResourceLimitError", "LPError",
           "InstanceFormatError"]

from ._metadata import __author__, __credits__, __date__, __version__  # noqa: F401
from .calibration import ConstantForm, mass_gap_certificate, verify_calibration
from .costs import (AxiomReport, MultiMaterialCost, NormKind, StarNorm, check_axioms, composite, cost_descriptor,
                    cost_from_descriptor, extend_from_rectangle, from_function, gilbert_steiner, linear_combination,
                    mailing, max_of, plc, steiner, symmetrize_for_orthant, table, urban)
from .errors import (DomainError, InstanceFormatError, LPError, MMTError, PreconditionError, ResourceLimitError,
                     ValidationError)
from .instance import InstanceDocument, parse_instance, read_instance, write_instance
from .lifting import flow_decompose, lift, project, remove_cycles
from .model import Atom, Boundary, Edge, LabeledBoundary, LabeledNetwork, Network, boundary_of, energy, mass
from .norm import (LabelLayout, NormBall, boundary_sigma, build_ball, check_monotone_absolute, extreme_points, gauge,
                   label_layout, verify_eqn_main)
from .render import RenderStyle, render_ball_svg, render_network_svg
from .solver import GridSpec, SolveOptions, SolveResult, grid_oracle, optimize_geometry, solve_mmtp, solve_on_grid
from .topology import Topology, enumerate_topologies
from .log import logger  # noqa: F401
