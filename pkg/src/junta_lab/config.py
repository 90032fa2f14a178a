"""Numerical tolerances and capacity limits shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # algebraic identities (Parseval, Plancherel, bound chains)
    identity: float = 1e-9
    # normalization of probability vectors
    normalization: float = 1e-12
    # ties between candidate optima
    tie: float = 1e-12
    # scalar root finding
    bisection: float = 1e-10
    bisection_max_iter: int = 200
    # |mu| must stay below 1 - this
    bias_margin: float = 1e-9


TOL = Tolerances()

MAX_ARITY = 28
MAX_SPECTRUM_ARITY = 20
MAX_JUNTA_ARITY = 20
MAX_JUNTA_CANDIDATES = 10**6
MAX_MATERIALIZED_COMPOSED = 14
