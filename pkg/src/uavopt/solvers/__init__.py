from .lloyd import LloydConfig, LloydResult, lloyd_l1
from .pso import PsoConfig, PsoResult, pso_max_rate, pso_minimize

__all__ = ["LloydConfig", "LloydResult", "lloyd_l1", "PsoConfig", "PsoResult", "pso_max_rate", "pso_minimize"]
