"""Working-precision contract shared by every numeric routine.

A :class:`PrecisionContext` fixes three decimal digit counts:

* ``target_digits`` -- the accuracy promised to the caller,
* ``guard_digits`` -- slack consumed by intermediate rounding,
* ``working_digits`` -- the precision arithmetic actually runs at.

The invariant ``working >= target + guard`` with ``guard >= 10`` keeps a
bounded-depth computation's accumulated rounding below the promise, so the
evaluators use plain floating arithmetic at ``working_digits`` instead of
interval arithmetic.  Routines whose error is not a pure rounding matter
(series truncation, quadrature, sequence extrapolation) carry their own
a-posteriori checks on top and raise :class:`~cmzv.errors.PrecisionExhausted`
when the budget cannot be met.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp


@dataclass(frozen=True)
class PrecisionContext:
    working_digits: int = 65
    target_digits: int = 50
    guard_digits: int = 15

    def __post_init__(self):
        if self.target_digits < 1 or self.working_digits < 1:
            raise ValueError("digit counts must be positive")
        if self.guard_digits < 10:
            raise ValueError("guard_digits must be at least 10")
        if self.working_digits < self.target_digits + self.guard_digits:
            raise ValueError(
                "working_digits must cover target_digits + guard_digits "
                f"({self.working_digits} < {self.target_digits} + {self.guard_digits})"
            )

    @classmethod
    def for_target(cls, target_digits: int, guard_digits: int = 15) -> "PrecisionContext":
        """Context promising ``target_digits`` with the default guard."""
        guard = max(10, guard_digits)
        return cls(working_digits=target_digits + guard,
                   target_digits=target_digits,
                   guard_digits=guard)

    def workdps(self):
        """mpmath context manager running at this context's working precision."""
        return mp.workdps(self.working_digits)

    @property
    def eps_target(self):
        with self.workdps():
            return mp.mpf(10) ** (-self.target_digits)

    @property
    def eps_working(self):
        with self.workdps():
            return mp.mpf(10) ** (-self.working_digits)

    def doubled(self) -> "PrecisionContext":
        """Same guard, twice the target; used by confirmation passes."""
        return PrecisionContext.for_target(2 * self.target_digits, self.guard_digits)


DEFAULT_CONTEXT = PrecisionContext()


def agreed_digits(a, b) -> int:
    """Number of decimal digits on which two values agree (absolute scale).

    Returns a large sentinel (999) for exact agreement, which callers treat
    as "all digits".
    """
    d = abs(mp.mpc(a) - mp.mpc(b))
    if d == 0:
        return 999
    return int(mp.floor(-mp.log10(d)))
