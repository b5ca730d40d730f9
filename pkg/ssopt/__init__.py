from .version import __version__
from .model import validate, load_instance, ProblemInstance
from .analytics import Analytics, AnalyticsContext, vstar_certificate
from .solver import solve, solve_step, solve_grid, solve_constant
from .simulator import PathConfig, create_policy, estimate_ac, comparison_experiment
