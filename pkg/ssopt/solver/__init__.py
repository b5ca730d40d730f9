from .results import ConstantKSolution, CandidateRow, CandidateTable, SolveResult, N_LESS, N_EQUAL, N_GREATER
from .constant import solve_constant
from .step import solve_step, base_stock_result, classify
from .grid import GridConfig, solve_grid
from .solver_factory import solve
