from .holding import *
from .setup_cost import *
from .registry import *
from .demand import BrownianDemand
from .holding import HoldingCostModel, PiecewiseLinearHolding, QuadraticHolding, ConvexPolyHolding, PolyBoundWitness
from .setup_cost import ExtendedReal, StepSetup, ConstantSetup, OrderingCostModel, eval_setup, ell
from .factory import create_holding, create_setup, parse_witness
from .instance import ProblemInstance, validate, load_instance, instance_to_dict
