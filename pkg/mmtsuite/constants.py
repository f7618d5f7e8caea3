"""Numeric tolerances and enumeration limits shared across the package."""

GEOM_TOL: float = 1e-9
"""Vertex coincidence, segment overlap and degenerate-edge threshold."""

DEFAULT_TOL: float = 1e-9
"""Gauge, LP and calibration comparisons."""

AXIOM_TOL: float = 1e-12
"""Exhaustive cost axiom checks."""

EQUIVALENCE_TOL: float = 1e-8

N_MAX: int = 10
"""Largest label count the ball construction accepts (3**N candidate directions)."""

MAX_PERMS: int = 10_000

MAX_STEINER: int = 3
MAX_TERMINALS: int = 8

MAX_GRID: int = 5
MAX_GRID_LABELS: int = 4

GEOMETRY_TOL: float = 1e-10
GEOMETRY_MAX_ITER: int = 100_000
