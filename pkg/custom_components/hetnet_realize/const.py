"""Constants for hetnet_realize."""
# Base component constants
NAME = "hetnet_realize"
VERSION = "0.1.0"

# Realization modes
MODE_BOOK = "book"
MODE_ALMOST_COMPLETE = "almost_complete"
MODES = [MODE_BOOK, MODE_ALMOST_COMPLETE]

# Embedding solvers
SOLVER_EXACT = "exact"
SOLVER_GREEDY = "greedy"
SOLVERS = [SOLVER_EXACT, SOLVER_GREEDY]

# Double-next-neighbour embedding modes
DNN_INCOMING = "incoming_pairs"
DNN_OUTGOING = "outgoing_pairs"

# Network families
FAMILY_PN = "Pn"
FAMILY_Q = "Q"

# Solver bounds
MAX_SOLVER_NODES = 8
MAX_SOLVER_EDGES = 20
DEFAULT_MAX_PAGES = 8
DEFAULT_TIME_LIMIT = 60.0
MAX_ENUMERATION_CELLS = 10

# Realization config keys
SPACING = "spacing"
EPS = "eps"
KAPPA = "kappa"
TUBE_RADIUS = "tube_radius"
LANE_BASE = "lane_base"
LANE_STEP = "lane_step"
BUMP_INNER_FRACTION = "bump_inner_fraction"
SEED = "seed"
ATTRACTION = "attraction"
TUBE_SPEED = "tube_speed"
TUBE_OVERRIDE = "tube_override"
DOUBLE_ARCS = "double_arcs"
PAIR_ALPHAS = "pair_alphas"
RK_STEP = "rk_step"
T_MAX = "t_max"
ARRIVAL_TOL = "arrival_tol"
RESIDENCE = "residence"
START_OFFSET = "start_offset"
BASIN_RAYS = "basin_rays"
UNRESOLVED_FRACTION = "unresolved_fraction"
PERTURB_TERMS = "perturb_terms"

# Realization config defaults
DEFAULT_SPACING = 1.0
DEFAULT_EPS = 0.2
DEFAULT_KAPPA = 0.04
DEFAULT_TUBE_RADIUS = 0.05
DEFAULT_LANE_BASE = 0.5
DEFAULT_LANE_STEP = 0.25
DEFAULT_BUMP_INNER_FRACTION = 0.5
DEFAULT_SEED = 0
DEFAULT_ATTRACTION = 10.0
DEFAULT_TUBE_SPEED = 1.0
# Lateral eigenvalues 0.5 ± 1.32i; (-2, -2) gives a double eigenvalue 1 with a single eigenvector
DEFAULT_PAIR_ALPHAS = (-2.0, -1.0)
DEFAULT_T_MAX = 500.0
DEFAULT_ARRIVAL_TOL = 1e-3
DEFAULT_RESIDENCE = 5.0
DEFAULT_START_OFFSET = 1e-4
DEFAULT_BASIN_RAYS = 72
DEFAULT_UNRESOLVED_FRACTION = 0.05
DEFAULT_PERTURB_TERMS = 8

# Numerics
FD_STEP = 1e-6
RESIDUAL_TOL = 1e-10
EIGEN_TOL = 1e-6
INVARIANCE_TOL = 1e-8
STALL_SPEED = 1e-12
BLOW_UP_FACTOR = 10.0

# Report grades
GRADE_COMPLETE = "complete"
GRADE_ALMOST_COMPLETE = "almost_complete"
GRADE_PARTIAL = "partial"
GRADES = [GRADE_COMPLETE, GRADE_ALMOST_COMPLETE, GRADE_PARTIAL]

# CLI exit codes
EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2
EXIT_SYNTHESIS = 3
EXIT_VERIFICATION = 4

STARTUP_MESSAGE = f"""
-------------------------------------------------------------------
{NAME}
Version: {VERSION}
Realizes heteroclinic networks in coupled cell systems
-------------------------------------------------------------------
"""
