"""Log and tropical semirings over negative-log costs.

Weights are plain floats holding costs (negative natural-log probabilities);
lower cost means more probable. ``plus`` accumulates parallel paths,
``times`` chains arcs along a path, ``zero`` (+inf) is the impossible event
and ``one`` (0.0) the certain one.
"""

from __future__ import annotations

import math
from typing import Iterable

from .errors import FstOpError

INF = math.inf


def log_add(a: float, b: float) -> float:
    """Stable -log(exp(-a) + exp(-b)) for costs a and b."""
    if a == INF:
        return b
    if b == INF:
        return a
    if a > b:
        a, b = b, a
    return a - math.log1p(math.exp(a - b))


class Semiring:
    """Common behaviour of the two cost semirings used by the lattice ops."""

    name = "abstract"
    zero = INF
    one = 0.0

    def plus(self, a: float, b: float) -> float:
        raise NotImplementedError

    def times(self, a: float, b: float) -> float:
        return a + b

    def divide(self, a: float, b: float) -> float:
        """Residual weight: the cost x with times(b, x) = a."""
        if a == INF:
            return INF
        return a - b

    def star(self, w: float) -> float:
        """Closure sum over w repeated zero or more times.

        Diverges (and raises) when the cycle carries probability mass >= 1,
        i.e. when its cost is <= 0.
        """
        raise NotImplementedError

    def plus_many(self, weights: Iterable[float]) -> float:
        total = self.zero
        for w in weights:
            total = self.plus(total, w)
        return total

    def __repr__(self) -> str:
        return f"<{self.name} semiring>"


class LogSemiring(Semiring):
    """Probability-summing semiring in negative-log space."""

    name = "log"

    def plus(self, a: float, b: float) -> float:
        return log_add(a, b)

    def star(self, w: float) -> float:
        if w <= 0.0:
            raise FstOpError(f"divergent closure: cycle cost {w} carries mass >= 1")
        # sum of the geometric series 1/(1 - e^-w), expressed as a cost
        return math.log1p(-math.exp(-w))


class TropicalSemiring(Semiring):
    """Min-plus (Viterbi) semiring."""

    name = "tropical"

    def plus(self, a: float, b: float) -> float:
        return a if a <= b else b

    def star(self, w: float) -> float:
        if w <= 0.0:
            raise FstOpError(f"divergent closure: cycle cost {w} is not positive")
        return 0.0


LOG = LogSemiring()
TROPICAL = TropicalSemiring()
