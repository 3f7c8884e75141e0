"""Classical polylogarithms Li_k(z) on C \\ [1, oo) at arbitrary precision.

Branch conventions
------------------
Li_1(z) = -log(1-z) with Im Li_1(z) = -arg(1-z) in [-pi, pi), and each
Li_{k+1} is the integral of Li_k(w)/w along a straight segment from 0.
This pins the principal branch used everywhere in the package.  Points on
the cut x > 1 are reachable through ``side``: the value returned there is
the Cauchy principal value plus/minus half the jump

    Li_k(x + i0) - Li_k(x - i0) = 2 pi i log^{k-1}(x) / (k-1)!

so no epsilon-limits appear in production code.

Evaluation strategy
-------------------
* |z| <= 0.6           : defining Taylor series (geometric, ratio <= 0.6);
* 0.6 < |z| < 1.667    : expansion in u = log z,

      Li_k(z) = u^{k-1}/(k-1)! (H_{k-1} - log(-u))
                + sum_{j != k-1} zeta(k-j) u^j / j!,   |u| < 2 pi,

  whose tail decays like (|u|/2pi)^j <= 0.51^j in this annulus;
* |z| >= 1.667         : inversion via the Bernoulli polynomial,

      Li_k(z) = -(-1)^k Li_k(1/z) - (2 pi i)^k / k! B_k(1/2 + log(-z)/(2 pi i)),

  with |1/z| <= 0.6 handled by the Taylor branch.

Every branch costs a few hundred working-precision terms at most, uniformly
over the arguments the package needs (reals in (-1,1), the unit circle and
quadratic-surd points).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import DomainError, OnBranchCut
from .precision import PrecisionContext, DEFAULT_CONTEXT

PRINCIPAL = "principal"
ABOVE_CUT = "above_cut"
BELOW_CUT = "below_cut"

_TAYLOR_RADIUS = 0.6

_zeta_cache = {}
_zeta_lock = threading.Lock()


def _to_mpc(z):
    if isinstance(z, Fraction):
        return mp.mpc(mp.mpf(z.numerator) / z.denominator)
    return mp.mpc(z)


def _zeta_int(n: int):
    """zeta(n) for integer n, cached per working precision."""
    key = (n, mp.mp.prec)
    val = _zeta_cache.get(key)
    if val is None:
        val = mp.zeta(n)
        with _zeta_lock:
            _zeta_cache[key] = val
    return val


@dataclass(frozen=True)
class PolylogQuery:
    """Weight, argument and cut side of one polylog evaluation."""
    k: int
    z: object
    side: str = PRINCIPAL

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"weight must be a positive integer, got {self.k}")
        if self.side not in (PRINCIPAL, ABOVE_CUT, BELOW_CUT):
            raise DomainError(f"unknown side {self.side!r}")
        z = _to_mpc(self.z)
        if self.side == PRINCIPAL:
            if mp.im(z) == 0 and mp.re(z) >= 1 and not (self.k >= 2 and mp.re(z) == 1):
                raise OnBranchCut(f"z = {mp.nstr(mp.re(z), 8)} lies on the cut [1, oo)")
        else:
            if mp.im(z) != 0 or mp.re(z) <= 1:
                raise DomainError("cut-side evaluation requires real z > 1")


def _taylor(k: int, z, eps):
    tot = mp.mpc(0)
    zp = mp.mpc(1)
    n = 1
    while True:
        zp *= z
        tot += zp / mp.mpf(n) ** k
        if abs(zp) < eps and n > 4:
            return tot
        n += 1
        if n > 500_000:
            raise mp.libmp.NoConvergence("polylog Taylor series stalled")


def _log_expansion(k: int, z, eps, side: int):
    u = mp.log(z)
    if side > 0:
        log_minus_u = mp.log(abs(u)) - mp.mpc(0, 1) * mp.pi
    elif side < 0:
        log_minus_u = mp.log(abs(u)) + mp.mpc(0, 1) * mp.pi
    else:
        log_minus_u = mp.log(-u)
    h = mp.fsum(mp.mpf(1) / j for j in range(1, k))
    tot = u ** (k - 1) / mp.factorial(k - 1) * (h - log_minus_u)
    up = mp.mpc(1)
    j = 0
    small = 0
    while True:
        if j != k - 1:
            zv = _zeta_int(k - j)
            if zv != 0:
                term = zv * up
                tot += term
                # zeta vanishes at negative even integers, so demand two
                # consecutive small nonzero terms before stopping
                if abs(term) < eps and j > k:
                    small += 1
                    if small >= 2:
                        return tot
                else:
                    small = 0
        up = up * u / (j + 1)
        j += 1
        if j > 500_000:
            raise mp.libmp.NoConvergence("polylog log-expansion stalled")


def _inversion(k: int, z, eps, side: int):
    if side > 0:
        log_minus_z = mp.log(abs(z)) - mp.mpc(0, 1) * mp.pi
    elif side < 0:
        log_minus_z = mp.log(abs(z)) + mp.mpc(0, 1) * mp.pi
    else:
        log_minus_z = mp.log(-z)
    w = mp.mpf(1) / 2 + log_minus_z / (2 * mp.pi * mp.mpc(0, 1))
    bern = mp.bernpoly(k, w)
    main = -(2 * mp.pi * mp.mpc(0, 1)) ** k / mp.factorial(k) * bern
    return -(-1) ** k * _taylor(k, 1 / z, eps) + main


def li(k: int, z, ctx: PrecisionContext = DEFAULT_CONTEXT, side: str = PRINCIPAL):
    """Evaluate Li_k(z) at the context's working precision.

    ``side`` selects the principal branch (default) or, for real z > 1,
    the boundary value just above or below the cut.
    """
    query = PolylogQuery(k, z, side)
    with ctx.workdps():
        zz = _to_mpc(query.z)
        eps = mp.mpf(10) ** (-(ctx.working_digits + 5))
        side_sign = {PRINCIPAL: 0, ABOVE_CUT: +1, BELOW_CUT: -1}[side]
        if zz == 0:
            return mp.mpc(0)
        if k == 1:
            if side_sign == 0:
                return -mp.log(1 - zz)
            x = mp.re(zz)
            # 1 - x is a negative real; the side fixes arg(1-z) = -+ pi
            return -mp.log(x - 1) + side_sign * mp.mpc(0, 1) * mp.pi
        if zz == 1:
            return mp.mpc(_zeta_int(k))
        az = abs(zz)
        if az <= _TAYLOR_RADIUS:
            return _taylor(k, zz, eps)
        if az < 1 / _TAYLOR_RADIUS:
            return _log_expansion(k, zz, eps, side_sign)
        return _inversion(k, zz, eps, side_sign)


def li_real(k: int, x, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Li_k at real x < 1, staying in real arithmetic (quadrature fast path).

    For x in (-1, -0.6) the duplication rule
    Li_k(-x) = 2^{1-k} Li_k(x^2) - Li_k(x) moves both evaluations into fast
    regions while keeping everything real.
    """
    with ctx.workdps():
        x = mp.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mp.mpf(x)
        if x >= 1:
            raise OnBranchCut("li_real requires x < 1")
        eps = mp.mpf(10) ** (-(ctx.working_digits + 5))
        if x == 0:
            return mp.mpf(0)
        if k == 1:
            return -mp.log(1 - x)
        ax = abs(x)
        if ax <= _TAYLOR_RADIUS:
            return mp.re(_taylor(k, mp.mpc(x), eps))
        if x > 0:
            return mp.re(_log_expansion(k, mp.mpc(x), eps, 0))
        # -1 < x < -0.6: x^2 <= ... < 0.6-ish Taylor zone, -x in log zone
        return mp.re(mp.mpf(2) ** (1 - k) * _taylor(k, mp.mpc(x * x), eps)
                     - _log_expansion(k, mp.mpc(-x), eps, 0))


def li_jump(k: int, x, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Discontinuity Li_k(x+i0) - Li_k(x-i0) = 2 pi i log^{k-1}(x)/(k-1)! for x > 1."""
    with ctx.workdps():
        x = mp.mpf(x)
        if x <= 1:
            raise DomainError("jump is defined for real x > 1")
        if k < 1:
            raise DomainError("weight must be a positive integer")
        return 2 * mp.pi * mp.mpc(0, 1) * mp.log(x) ** (k - 1) / mp.factorial(k - 1)
