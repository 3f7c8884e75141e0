"""Numeric summation of multiple polylogarithm (nested) series.

The series summed here is

    Li_{a_1,...,a_n}(z_1,...,z_n) = sum_{l_1 > ... > l_n > 0}
                                    prod_j z_j^{l_j} / l_j^{a_j}

computed by a single outer pass that carries all nested prefix sums, so one
step costs O(n) arithmetic operations.  Convergence is governed by the
partial products w_j = z_1...z_j:

* all |w_j| < 1: plain summation with a geometric stopping rule;
* some |w_j| = 1 (roots of unity in this package): the partial sums,
  sampled on multiples of the common period, follow

      S(K) = S_oo + sum_{i>=1, 0<=p<=P} c_{ip} log^p(K) / K^i

  and S_oo is extracted by collocating that model on a geometrically spread
  sample window (a Richardson-type sequence transformation with logarithmic
  modes).  The log depth P is read off the series shape: each unit partial
  product equal to 1 whose index has weight a_j = 1 feeds one factor of
  log K into the tail.

Accuracy is validated a posteriori by re-extracting S_oo from a reduced
model; disagreement triggers one retry on a larger window and then
:class:`~cmzv.errors.PrecisionExhausted`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath as mp

from .errors import DivergentWord, PrecisionExhausted
from .precision import PrecisionContext, DEFAULT_CONTEXT

_TERM_CAP = 2_000_000


@dataclass(frozen=True)
class PartialInfo:
    """Exact description of one partial product w_j = z_1...z_j."""
    modulus_is_one: bool
    phase: Optional[Fraction]   # w_j = e^{2 pi i phase} when modulus_is_one
    modulus: float              # approximate |w_j| otherwise


def classify_partials(zs: Sequence, tol=mp.mpf("1e-25")) -> list:
    """Numeric fallback classification of partial products.

    Unit moduli are snapped when within ``tol`` of 1 and their phases are
    snapped to rationals with denominator <= 96; the letter alphabets used
    by this package only produce such phases.
    """
    out = []
    w = mp.mpc(1)
    for z in zs:
        w *= mp.mpc(z)
        m = abs(w)
        if abs(m - 1) < tol:
            ph = mp.arg(w) / (2 * mp.pi)
            frac = Fraction(float(ph)).limit_denominator(96)
            if abs(ph - mp.mpf(frac.numerator) / frac.denominator) > tol * 100:
                frac = None
            out.append(PartialInfo(True, frac, 1.0))
        else:
            out.append(PartialInfo(False, None, float(m)))
    return out


def _pass_psums(a, zs, block, wanted):
    """Outer-index pass; returns {m: S(m*block)} for m in wanted."""
    n = len(a)
    S = [mp.mpc(0)] * (n + 1)
    S[n] = mp.mpc(1)
    zpow = [mp.mpc(1)] * n
    out = {}
    ell = 0
    top = max(wanted)
    want = set(wanted)
    for m in range(1, top + 1):
        for _ in range(block):
            ell += 1
            prev = S[:]
            for j in range(n - 1, -1, -1):
                zpow[j] *= zs[j]
                inner = prev[j + 1] if j + 1 <= n - 1 else mp.mpc(1)
                S[j] = prev[j] + zpow[j] / mp.mpf(ell) ** a[j] * inner
        if m in want:
            out[m] = S[0]
    return out


def _direct_sum(a, zs, rho, eps):
    n = len(a)
    S = [mp.mpc(0)] * (n + 1)
    S[n] = mp.mpc(1)
    zpow = [mp.mpc(1)] * n
    margin = (1 - rho) if rho < 1 else mp.mpf(1)
    ell = 0
    small = 0
    while True:
        ell += 1
        prev = S[:]
        term0 = None
        for j in range(n - 1, -1, -1):
            zpow[j] *= zs[j]
            inner = prev[j + 1] if j + 1 <= n - 1 else mp.mpc(1)
            t = zpow[j] / mp.mpf(ell) ** a[j] * inner
            S[j] = prev[j] + t
            if j == 0:
                term0 = t
        if abs(term0) / margin < eps:
            small += 1
            if small >= 4:
                return S[0]
        else:
            small = 0
        if ell > _TERM_CAP:
            raise PrecisionExhausted("direct nested summation exceeded the term cap")


def _spread_indices(m_min, m_max, count):
    if m_max < m_min + count:
        m_max = m_min + count
    r = (mp.mpf(m_max) / m_min) ** (mp.mpf(1) / (count - 1))
    ms, x, last = [], mp.mpf(m_min), 0
    for _ in range(count):
        m = int(mp.nint(x))
        if m <= last:
            m = last + 1
        ms.append(m)
        last = m
        x *= r
    return ms

def _tail_solve(samples, block, ms, I, P, extra_prec):
    modes = [(i, p) for i in range(1, I + 1) for p in range(0, P + 1)]
    use = ms[-(len(modes) + 1):]
    with mp.extraprec(extra_prec):
        rows, rhs = [], []
        for m in use:
            K = mp.mpf(m * block)
            rows.append([mp.mpf(1)] + [mp.log(K) ** p / K ** i for (i, p) in modes])
            rhs.append(samples[m])
        return mp.lu_solve(mp.matrix(rows), mp.matrix(rhs))[0]

def _window_config(digits, P):
    if digits <= 36:
        I, m_max = 14, 1200
    elif digits <= 54:
        I, m_max = 20, 4000
    elif digits <= 64:
        I, m_max = 22, 9000
    else:
        I, m_max = 24, int(9000 * 2 ** ((digits - 64) / 10))
    if P >= 2:
        m_max *= 2
    return I, m_max


def _accelerated_sum(a, zs, partials, ctx):
    digits = ctx.working_digits
    eps_ok = mp.mpf(10) ** (-(ctx.target_digits + 3))

    period = 1
    P = 0
    rho_sub = None
    for info, aj in zip(partials, a):
        if info.modulus_is_one:
            if info.phase is None:
                raise PrecisionExhausted(
                    "unit-modulus partial product with non-cyclotomic phase")
            period = math.lcm(period, info.phase.denominator)
            if info.phase == 0 and aj == 1:
                P += 1
        else:
            rho_sub = max(rho_sub or 0.0, info.modulus)
    if any(i.modulus_is_one and i.phase == 0 for i in partials):
        P = max(P, 1)
    P = min(P, 2)

    block = period
    while block < 4:
        block += period

    I, m_max = _window_config(digits, P)
    m_min = 8
    if rho_sub is not None:
        # geometric modes rho^K are absent from the tail model; start the
        # window beyond their decay
        need = int(digits * mp.log(10) / (-mp.log(rho_sub) * block)) + 5
        m_min = max(m_min, need)
        m_max = max(m_max, 4 * m_min)

    for attempt in range(2):
        count = I * (P + 1) + 1
        ms = _spread_indices(m_min, m_max, count)
        if ms[-1] * block > _TERM_CAP:
            raise PrecisionExhausted("accelerated summation exceeded the term cap")
        samples = _pass_psums(a, zs, block, ms)
        extra = int(mp.mp.prec * 3)
        v1 = _tail_solve(samples, block, ms, I, P, extra)
        v2 = _tail_solve(samples, block, ms[:-2], I - 2, P, extra)
        est = abs(v1 - v2)
        if est < eps_ok:
            return v1
        I += 4
        m_max = int(m_max * 2.5)
    raise PrecisionExhausted(
        f"nested-series acceleration stalled (estimate {mp.nstr(est, 3)})")


def mpl_series(a: Sequence[int], zs: Sequence, ctx: PrecisionContext = DEFAULT_CONTEXT,
               partials: Optional[Sequence[PartialInfo]] = None):
    """Sum Li_{a}(zs) numerically.

    ``partials`` may carry exact knowledge of the partial products (the word
    layer supplies it); otherwise they are classified numerically.
    """
    a = tuple(int(x) for x in a)
    if len(a) != len(zs) or not a:
        raise ValueError("index and argument lists must be nonempty and equal length")
    with ctx.workdps():
        zcs = [mp.mpc(z) for z in zs]
        if any(z == 0 for z in zcs):
            return mp.mpc(0)
        if partials is None:
            partials = classify_partials(zcs)
        for j, info in enumerate(partials):
            if not info.modulus_is_one and info.modulus > 1:
                raise DivergentWord(
                    f"partial product {j+1} has modulus {info.modulus:.6g} > 1")
        if partials[0].modulus_is_one and partials[0].phase == 0 and a[0] == 1:
            raise DivergentWord("leading index (1, z=1) diverges")
        if all(not i.modulus_is_one for i in partials):
            rho = max(i.modulus for i in partials)
            eps = mp.mpf(10) ** (-(ctx.working_digits + 5))
            return _direct_sum(a, zcs, mp.mpf(rho), eps)
        return _accelerated_sum(a, zcs, partials, ctx)
