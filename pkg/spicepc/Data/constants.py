# Description: Constants used in the spicepc package

# Solver defaults
DEFAULT_MU = 1.5
DEFAULT_ETA0 = 1.0
DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITERS = 100000
ETA_SEARCH_MAX_PASSES = 64
# first relative margin over the bound after an exact retry fails; grows
# x1000 per failed pass up to mu - 1
ETA_SEARCH_MARGIN = 1e-12
# converged also needs ||w^k - w_bar^k|| <= DEFAULT_GAP_TOL (1 + ||w^k||)
DEFAULT_GAP_TOL = 1e-6
# a run is stalled after DEFAULT_STALL_PATIENCE flat-objective iterations
# in which the prediction gap stays above STALL_GAP_RATIO of its start value
DEFAULT_STALL_PATIENCE = 200
STALL_GAP_RATIO = 0.9
# rho(t) is clamped in the log domain, before e^{beta t} can overflow
RHO_CAP = 1e12
# the prediction system is divided by rho above this value
RHO_RESCALE_THRESHOLD = 1e6
DEFAULT_ALPHA = 2.0
DEFAULT_BETA = 2.0

# Power iteration on M^T M
POWER_MAX_ITER = 1000
POWER_TOL = 1e-10
POWER_STALL_TOL = 1e-14

# QCQP instance family
SCALE_W0 = 1.0
SCALE_A0 = 12.0
SCALE_WI = 1.0
SCALE_AI = 0.1
PAPER_PI_SINGLE = 500000.0
PAPER_PI_SEPARABLE = 1000000.0
# pi = ACTIVE_PI_FRACTION * (constraint value at the unconstrained optimum)
ACTIVE_PI_FRACTION = 0.5

# (n, m, q, p)
PAPER_DIMS = (300, 300, 400, 20)
DESK_DIMS = (50, 50, 60, 5)

# History CSV schema
HISTORY_COLUMNS = (
    'k', 'f', 'delta_f', 'rho', 'eta', 'r', 's', 'pred_gap', 'feas', 'gmin'
)
CSV_FLOAT_FORMAT = '%.17g'

# Bench exit codes
EXIT_CONVERGED = 0
EXIT_SOLVER_FAILURE = 1
EXIT_USAGE = 2
