from .cells import Interval, Point, PresCell, cell_decompose, fiber_pieces, is_satisfiable, is_valid
from .formula import (
    FALSE,
    TRUE,
    Formula,
    branches,
    conj,
    cong,
    disj,
    eq,
    evaluate,
    exists,
    forall,
    free_vars,
    ge,
    gt,
    le,
    lt,
    members,
    ne,
    neg,
    var,
)
from .linear import LinearFunction, slinear
from .qe import qe
