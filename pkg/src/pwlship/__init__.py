"""Exact route evaluation with piecewise-linear value functions."""
from .pwl import PwlFunction, Segment, envelope, evaluate, integerize, shift, superpose, translate
from .model import Infeasible, Instance, Solution, make_solution, objective, validate

__version__ = "0.1.0"
