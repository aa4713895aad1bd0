"""synthlia: a syntax-guided synthesis solver for linear integer
arithmetic, solving conjectures by refutation — quantifier
instantiation for single-invocation properties and enumerative search
with symmetry-breaking pruning under syntactic restrictions."""

from .driver import GaveUp, SolveOutput, SolverConfig, Success, solve, \
    verify_solution
from .problem import Grammar, Solution, SynthFun, SynthProblem
from .sygus import ParseError, parse_problem, print_solution, print_term

__version__ = "0.1.0"

__all__ = [
    "GaveUp",
    "Grammar",
    "ParseError",
    "Solution",
    "SolveOutput",
    "SolverConfig",
    "Success",
    "SynthFun",
    "SynthProblem",
    "parse_problem",
    "print_solution",
    "print_term",
    "solve",
    "verify_solution",
]
