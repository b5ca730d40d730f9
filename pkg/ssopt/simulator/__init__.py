from .config import PathConfig
from .paths import generate_path, iter_increments, replication_streams, stream_info
from .policy import Policy, SSPolicy, BaseStockPolicy, BoundedModificationPolicy, BlockResult, PolicyState, \
    create_policy
from .estimate import Trajectory, RunLedger, SimulationEstimate, run_policy, estimate_ac, jackknife_se, summarize
from .oracle import reflected_tail_oracle, reflected_cdf, sample_reflected_levels
from .compare import comparison_experiment, comparison_bound
