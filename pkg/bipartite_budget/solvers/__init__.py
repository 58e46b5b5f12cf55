"""Budget solvers: class-specific algorithms, the general procedure and the dispatcher."""
from .dispatch import Solver, solve
from .general import GeneralSolver, general_budget

__all__ = ["Solver", "solve", "GeneralSolver", "general_budget"]
