"""Motivic integration in dimension one over k((t)), with Presburger and residue-class bookkeeping."""
from .motnum import L, MotNum, parse_motnum
from .cpf import CPFunction
from .groth import RULES, Generator, GrothClass, RuleTable, make_generator
from .motfn import MotFunction, poincare_series
from .series import RationalSeries, coeff_extract, in_sigma, mellin
from .summation import NotIntegrable, is_integrable, mu_sum

__all__ = [
    "L", "MotNum", "parse_motnum", "CPFunction", "RULES", "Generator", "GrothClass", "RuleTable",
    "make_generator", "MotFunction", "poincare_series", "RationalSeries", "coeff_extract", "in_sigma",
    "mellin", "NotIntegrable", "is_integrable", "mu_sum",
]
