"""Parameter triples of the hypergeometric equation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class HGParams:
    """Real parameters ``(a, b, c)`` of ``x(1-x)u'' + (c-(a+b+1)x)u' - ab u = 0``.

    The exponent differences at 0, 1 and infinity are ``mu0 = 1-c``,
    ``mu1 = c-a-b`` and ``muinf = b-a``. The default constructor insists on
    ``|mu0|, |mu1|, |muinf| < 1``; ``relaxed_params`` skips that check and
    sets the ``relaxed`` flag (useful for contiguous functions such as the
    derivative ``F(a+1, b+1, c+1; x)``).
    """

    a: float
    b: float
    c: float
    relaxed: bool = field(default=False, compare=False)

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if isinstance(v, (complex, np.complexfloating)):
                raise ParameterError(f"parameter {name} must be real, got {v!r}")
            try:
                v = float(v)
            except (TypeError, ValueError) as exc:
                raise ParameterError(f"parameter {name} must be real, got {v!r}") from exc
            if not math.isfinite(v):
                raise ParameterError(f"parameter {name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if not self.relaxed:
            for label, mu in (("|mu0| = |1-c|", self.mu0),
                              ("|mu1| = |c-a-b|", self.mu1),
                              ("|muinf| = |b-a|", self.muinf)):
                if not abs(mu) < 1:
                    raise ParameterError(f"{label} = {abs(mu):.6g} violates the condition < 1")

    @classmethod
    def relaxed_params(cls, a, b, c):
        return cls(a, b, c, relaxed=True)

    @classmethod
    def from_mu(cls, mu0, mu1, muinf, relaxed=False):
        """Build the triple with the given exponent differences."""
        c = 1.0 - mu0
        a = (c - mu1 - muinf) / 2.0
        b = a + muinf
        return cls(a, b, c, relaxed=relaxed)

    @property
    def mu0(self) -> float:
        return 1.0 - self.c

    @property
    def mu1(self) -> float:
        return self.c - self.a - self.b

    @property
    def muinf(self) -> float:
        return self.b - self.a

    @property
    def mus(self) -> tuple[float, float, float]:
        return (self.mu0, self.mu1, self.muinf)

    def swapped(self) -> "HGParams":
        return HGParams(self.b, self.a, self.c, relaxed=self.relaxed)


def relaxed_params(a, b, c) -> HGParams:
    """Triple without the exponent-difference check, flagged ``relaxed``."""
    return HGParams(a, b, c, relaxed=True)
