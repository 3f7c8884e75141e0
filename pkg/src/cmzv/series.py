"""Evaluation of the binomial / harmonic-number series families.

Families
--------
``central``      sum_k C(2k,k) x^k W(k)
``central_odd``  sum_k C(2k,k) / (2k+1)^s x^k W(k)
``inverse_3k``   sum_k W(k) / (k^s 2^k C(3k,k))            (k >= 1)
``forward_3k``   sum_k C(3k,k) x^k W(k)
``forward_4k``   sum_k C(4k,2k) x^k W(k)
``generic``      sum_k C(2k,k)^n / k^s (t/2^{2n})^k W(k)   (k >= 1, n = +-1)

W(k) is a product of affine factors built from harmonic numbers H_{mk+o}^{(r)}
(m in {1,2,3,4}, o in {-1,0,1}), polynomial pieces k and 1/k, 1/(2k+1), the
constant log 3, and plain constants.  The combination

    hbar_k = 3 H_{3k} - 2 H_{2k} - H_k - 3 log 3

is provided as a ready-made factor.

Truncation is certified by the per-family asymptotic term-ratio bound rho
(4|x|, 27|x|/4, 16|x|, 2/27, |t|); summation stops once the current term
multiplied by the geometric tail factor rho/(1-rho) sits below the working
epsilon for several consecutive indices.  Harmonic states advance in O(1)
amortized work per index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import mpmath as mp

from .errors import AngleOutOfRange, DivergentSpec, DomainError, SchemaError
from .polylog import li
from .precision import PrecisionContext, DEFAULT_CONTEXT

KINDS = ("central", "central_odd", "inverse_3k", "forward_3k", "forward_4k", "generic")


def harmonic(m: int, r: int, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Partial sum H_m^{(r)} at working precision (exact truncation)."""
    if m < 0 or r < 1:
        raise DomainError("harmonic numbers need m >= 0, r >= 1")
    with ctx.workdps():
        return mp.fsum(mp.mpf(1) / mp.mpf(j) ** r for j in range(1, m + 1))


class HarmonicState:
    """Harmonic numbers H_{mk}^{(r)} (m <= 4) and H_{2k+1}^{(r)}, updated
    incrementally as k advances; one step adds the m new reciprocals per
    multiplier instead of resumming."""

    def __init__(self, orders: Sequence[int]):
        self.orders = tuple(sorted(set(orders))) or (1,)
        self.k = 0
        self.h = {m: {r: mp.mpf(0) for r in self.orders} for m in (1, 2, 3, 4)}

    def step(self):
        k = self.k + 1
        for m in (1, 2, 3, 4):
            row = self.h[m]
            for r in self.orders:
                add = mp.mpf(0)
                for j in range(m * (k - 1) + 1, m * k + 1):
                    add += mp.mpf(1) / mp.mpf(j) ** r
                row[r] += add
        self.k = k

    def value(self, mult: int, offset: int, r: int):
        """H_{mult*k + offset}^{(r)} for offset in {-1, 0, 1}."""
        base = self.h[mult][r]
        idx = mult * self.k
        if offset == 0:
            return base
        if offset == 1:
            return base + mp.mpf(1) / mp.mpf(idx + 1) ** r
        if offset == -1:
            if idx == 0:
                return mp.mpf(0)
            return base - mp.mpf(1) / mp.mpf(idx) ** r
        raise SchemaError(f"unsupported harmonic offset {offset}")


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightTerm:
    kind: str                    # harmonic | one | k | inv_k | inv_2k1 | log3
    coef: Fraction = Fraction(1)
    mult: int = 1
    offset: int = 0
    order: int = 1

    @staticmethod
    def from_json(obj: dict) -> "WeightTerm":
        kind = obj["kind"]
        if kind not in ("harmonic", "one", "k", "inv_k", "inv_2k1", "log3"):
            raise SchemaError(f"unknown weight term kind {kind!r}")
        return WeightTerm(kind=kind, coef=Fraction(str(obj.get("coef", 1))),
                          mult=int(obj.get("mult", 1)), offset=int(obj.get("offset", 0)),
                          order=int(obj.get("order", 1)))

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.coef != 1:
            out["coef"] = str(self.coef)
        if self.kind == "harmonic":
            out.update(mult=self.mult, offset=self.offset, order=self.order)
        return out


def h_term(coef, mult=1, offset=0, order=1) -> WeightTerm:
    return WeightTerm("harmonic", Fraction(coef), mult, offset, order)


def hbar_factor() -> List[WeightTerm]:
    """3 H_{3k} - 2 H_{2k} - H_k - 3 log 3."""
    return [h_term(3, 3), h_term(-2, 2), h_term(-1, 1),
            WeightTerm("log3", Fraction(-3))]


def _factor_value(factor: List[WeightTerm], state: HarmonicState, k: int, log3):
    total = mp.mpf(0)
    for t in factor:
        c = mp.mpf(t.coef.numerator) / t.coef.denominator
        if t.kind == "harmonic":
            total += c * state.value(t.mult, t.offset, t.order)
        elif t.kind == "one":
            total += c
        elif t.kind == "k":
            total += c * k
        elif t.kind == "inv_k":
            total += c / k
        elif t.kind == "inv_2k1":
            total += c / (2 * k + 1)
        elif t.kind == "log3":
            total += c * log3
    return total


def _weight_orders(weights) -> Tuple[int, ...]:
    orders = set()
    for factor in weights:
        for t in factor:
            if t.kind == "harmonic":
                orders.add(t.order)
    return tuple(orders) or (1,)


def _weights_need_inv_k(weights) -> bool:
    return any(t.kind == "inv_k" for f in weights for t in f)


# ---------------------------------------------------------------------------
# series specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesSpec:
    kind: str
    s: int = 0
    x: object = None                       # Fraction | (a, b, d, den) surd | mp number
    weights: Tuple[Tuple[WeightTerm, ...], ...] = ()
    start_index: int = 0
    n: int = 1                             # generic only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown series kind {self.kind!r}")
        if self.kind == "generic" and self.n not in (-1, 1):
            raise SchemaError("generic series require n in {-1, 1}")

    # -- JSON -----------------------------------------------------------
    @staticmethod
    def from_json(obj: dict) -> "SeriesSpec":
        kind = obj["kind"]
        x = obj.get("x")
        if isinstance(x, str):
            x = Fraction(x)
        elif isinstance(x, dict):
            x = (Fraction(x["a"]), Fraction(x["b"]), int(x["d"]), Fraction(x["den"]))
        weights = tuple(tuple(WeightTerm.from_json(t) for t in f)
                        for f in obj.get("weights", []))
        return SeriesSpec(kind=kind, s=int(obj.get("s", 0)), x=x, weights=weights,
                          start_index=int(obj.get("start_index",
                                                  1 if kind in ("inverse_3k", "generic") else 0)),
                          n=int(obj.get("n", 1)))

    def to_json(self) -> dict:
        out = {"kind": self.kind, "start_index": self.start_index}
        if self.s:
            out["s"] = self.s
        if self.kind == "generic":
            out["n"] = self.n
        if isinstance(self.x, Fraction):
            out["x"] = str(self.x)
        elif isinstance(self.x, tuple):
            a, b, d, den = self.x
            out["x"] = {"a": str(a), "b": str(b), "d": d, "den": str(den)}
        if self.weights:
            out["weights"] = [[t.to_json() for t in f] for f in self.weights]
        return out

    def x_value(self):
        if self.x is None:
            return mp.mpf(1)
        if isinstance(self.x, Fraction):
            return mp.mpf(self.x.numerator) / self.x.denominator
        if isinstance(self.x, tuple):
            a, b, d, den = self.x
            num = (mp.mpf(a.numerator) / a.denominator
                   + mp.mpf(b.numerator) / b.denominator * mp.sqrt(d))
            return num / (mp.mpf(den.numerator) / den.denominator)
        return mp.mpf(self.x)


_RATIO_BOUNDS = {
    "central": lambda x, s, n: 4 * abs(x),
    "central_odd": lambda x, s, n: 4 * abs(x),
    "forward_3k": lambda x, s, n: mp.mpf(27) / 4 * abs(x),
    "forward_4k": lambda x, s, n: 16 * abs(x),
    "inverse_3k": lambda x, s, n: mp.mpf(2) / 27 * mp.mpf("1.12"),
    "generic": lambda x, s, n: abs(x),
}


def _binom_ratio(kind: str, k: int):
    """Exact ratio coefficient(k+1)/coefficient(k) for the family's binomial part."""
    if kind in ("central", "central_odd"):
        return Fraction((2 * k + 1) * (2 * k + 2), (k + 1) ** 2)
    if kind in ("forward_3k",):
        return Fraction((3 * k + 1) * (3 * k + 2) * (3 * k + 3),
                        (k + 1) * (2 * k + 1) * (2 * k + 2))
    if kind == "forward_4k":
        return Fraction((4 * k + 1) * (4 * k + 2) * (4 * k + 3) * (4 * k + 4),
                        ((2 * k + 1) ** 2) * ((2 * k + 2) ** 2))
    raise SchemaError(f"no binomial stream for kind {kind!r}")


def binom_stream(kind: str, k: int) -> int:
    """k-th binomial coefficient of a family via the incremental recurrence."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    fam = {"central": "central", "central_odd": "central", "generic": "central",
           "inverse_3k": "forward_3k", "forward_3k": "forward_3k",
           "forward_4k": "forward_4k"}.get(kind)
    if fam is None:
        raise SchemaError(f"unknown series kind {kind!r}")
    val = Fraction(1)
    for j in range(k):
        val *= _binom_ratio(fam, j)
    if val.denominator != 1:
        raise SchemaError("binomial recurrence produced a non-integer")
    return val.numerator


def eval_series(spec: SeriesSpec, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Sum a series spec to the context's working accuracy (returns mpf/mpc)."""
    with ctx.workdps():
        x = spec.x_value()
        rho = _RATIO_BOUNDS[spec.kind](x, spec.s, spec.n)
        if rho >= 1:
            raise DivergentSpec(f"term-ratio bound {mp.nstr(rho, 6)} >= 1")
        if spec.start_index == 0 and _weights_need_inv_k(spec.weights):
            raise DivergentSpec("1/k weight factor requires start_index = 1")
        eps = mp.mpf(10) ** (-(ctx.working_digits + 5))
        tail_factor = rho / (1 - rho)
        log3 = mp.log(3) if any(t.kind == "log3" for f in spec.weights for t in f) \
            else mp.mpf(0)

        state = HarmonicState(_weight_orders(spec.weights))
        k = 0
        while k < spec.start_index:
            state.step()
            k += 1

        fam = {"central": "central", "central_odd": "central",
               "inverse_3k": "forward_3k", "forward_3k": "forward_3k",
               "forward_4k": "forward_4k", "generic": "central"}[spec.kind]
        binom = mp.mpf(binom_stream(fam, k))
        xpow = x ** k
        total = mp.mpf(0) * x  # inherits real/complex type of x
        small = 0
        while True:
            w = mp.mpf(1)
            for factor in spec.weights:
                w *= _factor_value(factor, state, k, log3)
            if spec.kind == "central":
                term = binom * xpow * w
            elif spec.kind == "central_odd":
                term = binom * xpow * w / mp.mpf(2 * k + 1) ** spec.s
            elif spec.kind == "forward_3k" or spec.kind == "forward_4k":
                term = binom * xpow * w
            elif spec.kind == "inverse_3k":
                term = w / (mp.mpf(k) ** spec.s * mp.mpf(2) ** k * binom)
            else:  # generic
                core = binom if spec.n == 1 else 1 / binom
                term = core * w / mp.mpf(k) ** spec.s * (x / mp.mpf(2) ** (2 * spec.n)) ** k
            total += term

            if abs(term) * tail_factor < eps and k > spec.start_index + 4:
                small += 1
                if small >= 3:
                    return total
            else:
                small = 0

            r = _binom_ratio(fam, k)
            binom = binom * r.numerator / r.denominator
            xpow *= x
            state.step()
            k += 1
            if k > 2_000_000:
                raise DivergentSpec("series did not reach the tail bound")


# ---------------------------------------------------------------------------
# generating-function and parametric checks
# ---------------------------------------------------------------------------

def eval_generating_function_check(w, r: int, ctx: PrecisionContext = DEFAULT_CONTEXT,
                                   variant: str = "full"):
    """Both sides of the harmonic-number generating function at |w| < 1.

    ``full``:  sum_{k>=1} w^k H_k^{(r)}        vs  Li_r(w)/(1-w)
    ``even``:  sum_{k>=1} w^{2k} H_{2k}^{(r)}  vs  [Li_r(w)/(1-w) + Li_r(-w)/(1+w)]/2
    """
    with ctx.workdps():
        w = mp.mpc(w)
        if abs(w) >= 1:
            raise DomainError("generating function requires |w| < 1")
        if w == 0:
            return mp.mpc(0), mp.mpc(0)
        eps = mp.mpf(10) ** (-(ctx.working_digits + 5))
        state = HarmonicState((r,))
        total = mp.mpc(0)
        k = 0
        wp = mp.mpc(1)
        rho = abs(w) if variant == "full" else abs(w) ** 2
        tail = rho / (1 - rho)
        small = 0
        while True:
            state.step()
            k += 1
            if variant == "full":
                wp *= w
                term = wp * state.value(1, 0, r)
            else:
                wp *= w * w
                term = wp * state.value(2, 0, r)
            total += term
            if abs(term) * tail < eps and k > 4:
                small += 1
                if small >= 3:
                    break
            else:
                small = 0
        if variant == "full":
            closed = li(r, w, ctx) / (1 - w)
        else:
            closed = (li(r, w, ctx) / (1 - w) + li(r, -w, ctx) / (1 + w)) / 2
        return total, closed


_PARAM_FAMILIES = ("3k_Hk", "3k_hbar", "3k_H2k", "3k_H3k_minus_H2k",
                   "4k_Hk", "boyadzhiev")


def _series_for_family(family: str, angle, ctx):
    with ctx.workdps():
        if family.startswith("3k"):
            c = mp.cos(3 * angle / 2)
            x = 4 * c * c / 27
            if family == "3k_Hk":
                weights = ((h_term(1, 1),),)
            elif family == "3k_hbar":
                weights = (tuple(hbar_factor()),)
            elif family == "3k_H2k":
                weights = ((h_term(1, 2),),)
            else:
                weights = ((h_term(1, 3), h_term(-1, 2)),)
            return SeriesSpec("forward_3k", x=x, weights=weights, start_index=0)
        if family == "4k_Hk":
            c = mp.cos(2 * angle)
            return SeriesSpec("forward_4k", x=4 * c * c / 64,
                              weights=((h_term(1, 1),),), start_index=0)
        c = mp.cos(2 * angle)
        return SeriesSpec("central", x=c * c / 4,
                          weights=((h_term(1, 1),),), start_index=0)


def _closed_for_family(family: str, angle):
    sqrt3 = mp.sqrt(3)
    if family.startswith("3k"):
        ca = mp.cos(angle / 2)
        cb = mp.cos(angle / 2 - mp.pi / 3)
        s32 = mp.sin(3 * angle / 2)
        if family == "3k_Hk":
            return sqrt3 / s32 * (
                ca * mp.log(2 * cb ** 2 / (sqrt3 * mp.sin(angle)))
                + cb * mp.log(2 * ca ** 2 / (sqrt3 * mp.sin(2 * mp.pi / 3 - angle))))
        if family == "3k_hbar":
            return -2 * sqrt3 / s32 * (ca * mp.log(2 * cb) + cb * mp.log(2 * ca))
        if family == "3k_H2k":
            return sqrt3 / s32 * (
                ca * mp.log(2 * ca * cb / (sqrt3 * mp.sin(angle)))
                + cb * mp.log(2 * ca * cb / (sqrt3 * mp.sin(2 * mp.pi / 3 - angle))))
        return (ca + cb) / (sqrt3 * s32) * mp.log(3 / (4 * ca * cb))
    if family == "4k_Hk":
        sp, cp = mp.sin(angle), mp.cos(angle)
        t1 = mp.log((1 / sp + mp.sqrt(2)) ** 2 / (4 * (cp / sp + 1))) / (mp.sqrt(2) * sp)
        t2 = mp.log((1 / cp + mp.sqrt(2)) ** 2 / (4 * (sp / cp + 1))) / (mp.sqrt(2) * cp)
        return t1 + t2
    s2 = mp.sin(2 * angle)
    return 2 / s2 * mp.log((1 + s2) / (2 * s2))


def eval_parametric_log_identity(family: str, angle,
                                 ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Series side and closed trig-log side of a parametric family at an angle.

    3k families need the angle in (0, pi/3); 4k and the central-binomial
    form need (0, pi/4).  Angles are taken at working precision; rational
    multiples of pi should be constructed with mp.pi inside the context.
    """
    if family not in _PARAM_FAMILIES:
        raise SchemaError(f"unknown parametric family {family!r}")
    with ctx.workdps():
        angle = mp.mpf(angle)
        hi = mp.pi / 3 if family.startswith("3k") else mp.pi / 4
        if not (0 < angle < hi):
            raise AngleOutOfRange(f"angle must lie strictly in (0, {mp.nstr(hi, 8)})")
        spec = _series_for_family(family, angle, ctx)
        series_side = eval_series(spec, ctx)
        closed_side = _closed_for_family(family, angle)
        return series_side, closed_side


def eval_known_sum_check(angle, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Unweighted forward-3k sum vs sin(phi/2 + pi/3) csc(3 phi/2)."""
    with ctx.workdps():
        angle = mp.mpf(angle)
        if not (0 < angle < mp.pi / 3):
            raise AngleOutOfRange("angle must lie strictly in (0, pi/3)")
        c = mp.cos(3 * angle / 2)
        spec = SeriesSpec("forward_3k", x=4 * c * c / 27, weights=(), start_index=0)
        series_side = eval_series(spec, ctx)
        closed_side = mp.sin(angle / 2 + mp.pi / 3) / mp.sin(3 * angle / 2)
        return series_side, closed_side


def eval_symmetry_check(z, r: int, variant: str = "a",
                        ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Even-index reduction of C(4k,2k) sums to central-binomial sums.

    variant a:  sum C(4k,2k) z^{2k} H_{2k}^{(r)} = [S(z) + S(-z)]/2 with
                S(y) = sum C(2k,k) y^k H_k^{(r)}
    variant b:  the same with H_{4k} on the left and H_{2k} inside S.
    """
    if variant not in ("a", "b"):
        raise SchemaError("variant must be 'a' or 'b'")
    with ctx.workdps():
        z = mp.mpf(z)
        mult = 2 if variant == "a" else 4
        lhs_spec = SeriesSpec("forward_4k", x=z * z,
                              weights=((h_term(1, mult, 0, r),),), start_index=0)
        lhs = eval_series(lhs_spec, ctx)
        inner = 1 if variant == "a" else 2
        sp = SeriesSpec("central", x=z, weights=((h_term(1, inner, 0, r),),))
        sm = SeriesSpec("central", x=-z, weights=((h_term(1, inner, 0, r),),))
        rhs = (eval_series(sp, ctx) + eval_series(sm, ctx)) / 2
        return lhs, rhs
