"""High-precision quadrature for the contour and half-line integral forms.

Engines
-------
* tanh-sinh on (0, 1): absorbs algebraic/logarithmic endpoint behavior;
* exp-sinh on (0, oo): the substitution X = exp(pi sinh t) composes the
  half-line map X = u/(1-u) with the tanh-sinh variable, so polynomially
  decaying integrands fall doubly exponentially in t;
* periodic trapezoid on the unit circle: spectrally accurate for the smooth
  integrands produced by the circle kernels.

All engines refine by doubling (new points interleave the old grid, whose
contribution is reused), accept when two successive levels agree to
``working_digits - 5``, and raise
:class:`~cmzv.errors.QuadratureNonConvergent` at the node cap.

Kernels
-------
The catalog's integral forms share the shape

    prefactor * integral of  N(arg)/(1 - arg) * [optional log] * measure

with arg = A * g(X) for a bounded rational map g on the contour and
N = Li_r (the r = 0 cases are the elementary forms noted per kernel).
A pre-check rejects parameters that let |arg| reach 1 on the contour.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath as mp

from .errors import DomainError, QuadratureNonConvergent, SchemaError, SingularOnPath
from .polylog import li_real
from .precision import PrecisionContext, DEFAULT_CONTEXT

_BASE_LEVEL = 3          # h = 2^-3 at the coarsest doubling level
_MAX_NODES = 2 ** 14

_node_cache = {}
_node_lock = threading.Lock()


def _ts_level_nodes(level: int, prec: int):
    """Tanh-sinh nodes new at this level, as (u, 1-u, weight) on (0, 1).

    The base level carries its full grid; higher levels only the odd-index
    points interleaving the coarser grid.  Weights include the (0,1)
    Jacobian 1/2 but not the step h.  1-u is computed from exponentials so
    endpoint distances keep full relative accuracy.
    """
    key = ("ts", level, prec)
    with _node_lock:
        if key in _node_cache:
            return _node_cache[key]
    out = []
    with mp.workprec(prec + 30):
        h = mp.mpf(2) ** (-level)
        cutoff = mp.mpf(10) ** (-(mp.mp.dps + 10))
        first = level == _BASE_LEVEL
        j = 0 if first else 1
        step = 1 if first else 2
        while True:
            t = j * h
            s = mp.pi / 2 * mp.sinh(t)
            w = mp.pi / 2 * mp.cosh(t) / mp.cosh(s) ** 2 / 2
            one_minus_x = 2 / (mp.exp(2 * s) + 1)       # 1 - tanh(s), stable
            u_hi = 1 - one_minus_x / 2
            u_lo = one_minus_x / 2
            out.append((u_hi, u_lo, w))
            if j != 0:
                out.append((u_lo, u_hi, w))
            if w < cutoff and j > 8:
                break
            j += step
            if j > 60 * 2 ** level:
                break
    with _node_lock:
        _node_cache[key] = out
    return out


def _es_level_nodes(level: int, prec: int):
    """Exp-sinh nodes new at this level, as (X, weight), X = exp(pi sinh t).

    The weight contains dX/dt = pi cosh(t) X (step h excluded).  Tails are
    cut where X leaves [eps, 1/eps]; the integrands used here are bounded
    near 0 and decay at least quadratically at infinity.
    """
    key = ("es", level, prec)
    with _node_lock:
        if key in _node_cache:
            return _node_cache[key]
    out = []
    with mp.workprec(prec + 30):
        h = mp.mpf(2) ** (-level)
        t_cap = mp.asinh((mp.mp.dps + 15) * mp.log(10) / mp.pi)
        first = level == _BASE_LEVEL
        j = 0 if first else 1
        step = 1 if first else 2
        while True:
            t = j * h
            if t > t_cap:
                break
            sh = mp.pi * mp.sinh(t)
            ch = mp.pi * mp.cosh(t)
            Xp = mp.exp(sh)
            out.append((Xp, ch * Xp))
            if j != 0:
                out.append((1 / Xp, ch / Xp))
            j += step
    with _node_lock:
        _node_cache[key] = out
    return out


def _refine(term, level_nodes, ctx, name):
    """Doubling driver: value = h * (accumulated sum of per-node terms)."""
    with ctx.workdps():
        tol = mp.mpf(10) ** (-(ctx.working_digits - 5))
        acc = mp.mpf(0)
        prev = None
        level = _BASE_LEVEL
        nnodes = 0
        while True:
            for args in level_nodes(level, mp.mp.prec):
                acc += term(*args)
                nnodes += 1
            val = acc * mp.mpf(2) ** (-level)
            if prev is not None and abs(val - prev) < tol * max(1, abs(val)):
                return val, abs(val - prev)
            if nnodes > _MAX_NODES:
                delta = abs(val - prev) if prev is not None else mp.inf
                raise QuadratureNonConvergent(
                    f"{name}: node cap reached, last delta {mp.nstr(delta, 3)}")
            prev = val
            level += 1


def tanh_sinh_01(f, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Integral over (0,1) of f(u, 1-u); both endpoint distances are exact."""
    floor = mp.mpf(10) ** (-(ctx.working_digits + 15))

    def term(u, omu, w):
        t = w * f(u, omu)
        return t if abs(t) > floor else mp.mpf(0)
    return _refine(term, _ts_level_nodes, ctx, "tanh-sinh")


def exp_sinh_halfline(f, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Integral over (0, oo) of f(X), f bounded at 0 and decaying at infinity."""
    floor = mp.mpf(10) ** (-(ctx.working_digits + 15))

    def term(X, w):
        t = w * f(X)
        return t if abs(t) > floor else mp.mpf(0)
    return _refine(term, _es_level_nodes, ctx, "exp-sinh")


def circle_mean(f, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Mean of f over [0, 2 pi) by doubling trapezoid sums."""
    with ctx.workdps():
        tol = mp.mpf(10) ** (-(ctx.working_digits - 5))
        n = 64
        two_pi = 2 * mp.pi
        mean = mp.fsum(f(two_pi * j / n) for j in range(n)) / n
        while True:
            shifted = mp.fsum(f(two_pi * (j + mp.mpf(1) / 2) / n) for j in range(n)) / n
            new = (mean + shifted) / 2
            if abs(new - mean) < tol * max(1, abs(new)):
                return new, abs(new - mean)
            mean = new
            n *= 2
            if n > _MAX_NODES:
                raise QuadratureNonConvergent("circle mean: node cap reached")


# ---------------------------------------------------------------------------
# named integral forms
# ---------------------------------------------------------------------------

KERNELS = ("circle_sym", "circle_even", "halfline_3k", "halfline_3k_even",
           "halfline_4k", "interval_3k")

_LOG_KINDS = (None, "map_log", "log_t", "log_1mt")


@dataclass(frozen=True)
class IntegralSpec:
    """One named integral form with exact parameters.

    amplitude   the factor A inside the polylog argument A*g(X); a Fraction,
                a (Fraction, d) pair meaning q*sqrt(d), or a number for
                parametric use;
    r           polylog weight; r = 0 selects the elementary numerator of
                the kernel (1 for the half-line families, the geometric
                y/(1-y) for interval_3k);
    log_kind    None, or 'map_log' = log(X^3/(1+X^3)^2) on halfline_3k,
                'log_t' / 'log_1mt' = -log t / -log(1-t) on interval_3k.
    """
    kernel: str
    r: int
    amplitude: object = Fraction(1)
    log_kind: Optional[str] = None

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise SchemaError(f"unknown integral kernel {self.kernel!r}")
        if self.r < 0:
            raise SchemaError("polylog weight must be >= 0")
        if self.log_kind not in _LOG_KINDS:
            raise SchemaError(f"unknown log kind {self.log_kind!r}")
        if self.log_kind == "map_log" and self.kernel != "halfline_3k":
            raise SchemaError("map_log belongs to the halfline_3k kernel")
        if self.log_kind in ("log_t", "log_1mt") and self.kernel != "interval_3k":
            raise SchemaError("interval log weights belong to interval_3k")

    @staticmethod
    def from_json(obj: dict) -> "IntegralSpec":
        amp = obj.get("A", "1")
        if isinstance(amp, str):
            amp = Fraction(amp)
        elif isinstance(amp, dict):
            amp = (Fraction(amp["q"]), int(amp["d"]))
        return IntegralSpec(kernel=obj["kernel"], r=int(obj["r"]), amplitude=amp,
                            log_kind=obj.get("log_kind"))

    def to_json(self) -> dict:
        out = {"kernel": self.kernel, "r": self.r}
        if isinstance(self.amplitude, tuple):
            q, d = self.amplitude
            out["A"] = {"q": str(q), "d": d}
        else:
            out["A"] = str(self.amplitude)
        if self.log_kind:
            out["log_kind"] = self.log_kind
        return out

    @property
    def measure(self) -> str:
        return {
            "circle_sym": "dz/(2 pi i z) on |z| = 1",
            "circle_even": "dz/(4 pi i z) on |z| = 1",
            "halfline_3k": "dX/(1+X^3) on (0, oo)",
            "halfline_3k_even": "x dx/(1+x^6) on (0, oo)",
            "halfline_4k": "X^2 dX/(1+X^4) on (0, oo)",
            "interval_3k": "dt/t on (0, 1)",
        }[self.kernel]


def _amp_value(a):
    if isinstance(a, Fraction):
        return mp.mpf(a.numerator) / a.denominator
    if isinstance(a, tuple):
        q, d = a
        return mp.mpf(q.numerator) / q.denominator * mp.sqrt(d)
    return mp.mpf(a)


def eval_integral(spec: IntegralSpec, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Numeric value of the integral form (real mpf)."""
    with ctx.workdps():
        A = _amp_value(spec.amplitude)

        def num(y):
            # Li_r(y)/(1-y); r = 0 means numerator 1
            if spec.r == 0:
                return 1 / (1 - y)
            return li_real(spec.r, y, ctx) / (1 - y)

        if spec.kernel == "circle_sym":
            if abs(4 * A) >= 1:
                raise SingularOnPath("argument reaches 1 on the circle")
            val, _ = circle_mean(lambda th: num(4 * A * mp.cos(th / 2) ** 2), ctx)
            return val

        if spec.kernel == "circle_even":
            if abs(A) >= 1:
                raise SingularOnPath("argument reaches 1 on the circle")

            def f(th):
                y = A * mp.cos(th)
                return (num(y) + num(-y)) / 2
            val, _ = circle_mean(f, ctx)
            return val

        if spec.kernel == "halfline_3k":
            if abs(A) >= 4:        # max of X^3/(1+X^3)^2 is 1/4
                raise SingularOnPath("argument reaches 1 on the half-line")

            def f(X):
                X3 = X ** 3
                den = 1 + X3
                g = X3 / den ** 2
                out = num(A * g)
                if spec.log_kind == "map_log":
                    out *= mp.log(g)
                return out / den
            val, _ = exp_sinh_halfline(f, ctx)
            return 3 * mp.sqrt(3) / (2 * mp.pi) * val

        if spec.kernel == "halfline_3k_even":
            if abs(A) >= 2:        # max of x^3/(1+x^6) is 1/2
                raise SingularOnPath("argument reaches 1 on the half-line")

            def f(x):
                x3 = x ** 3
                den = 1 + x3 * x3
                hmap = x3 / den
                return (num(A * hmap) + num(-A * hmap)) * x / den
            val, _ = exp_sinh_halfline(f, ctx)
            return 3 * mp.sqrt(3) / (2 * mp.pi) * val

        if spec.kernel == "halfline_4k":
            if abs(A) >= 4:        # max of X^4/(1+X^4)^2 is 1/4
                raise SingularOnPath("argument reaches 1 on the half-line")

            def f(X):
                X4 = X ** 4
                den = 1 + X4
                g = X4 / den ** 2
                return num(A * g) * X * X / den
            val, _ = exp_sinh_halfline(f, ctx)
            return 2 * mp.sqrt(2) / mp.pi * val

        # interval_3k: int_0^1 N(A t(1-t)^2/2) [log weight] dt/t
        if abs(A) * mp.mpf(4) / 27 * mp.mpf(1) / 2 >= 1:  # max of t(1-t)^2/2 is 2/27
            raise SingularOnPath("argument reaches 1 on the interval")

        def f(u, omu):
            y = A * u * omu * omu / 2
            core = y / (1 - y) if spec.r == 0 else li_real(spec.r, y, ctx)
            if spec.log_kind == "log_t":
                core *= -mp.log(u)
            elif spec.log_kind == "log_1mt":
                core *= -mp.log(omu)
            return core / u
        val, _ = tanh_sinh_01(f, ctx)
        return val


def beta_moment(kind: str, k, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Quadrature of the binomial moment integrals (k may be real >= 0).

    3k:       int [X^3/(1+X^3)^2]^k dX/(1+X^3)
    3k_prime: int [x^3/(1+x^6)]^{2k} x dx/(1+x^6)
    3k_log:   the 3k integrand with an extra log(X^3/(1+X^3)^2)
    4k:       int [X^4/(1+X^4)^2]^k X^2 dX/(1+X^4)

    Only the quadrature value is returned; tests compare it against the
    gamma-function expression for the corresponding scaled binomial.
    """
    if kind not in ("3k", "3k_prime", "3k_log", "4k"):
        raise SchemaError(f"unknown beta moment kind {kind!r}")
    with ctx.workdps():
        k = mp.mpf(k)
        if k < 0:
            raise DomainError("k must be >= 0")
        if kind == "3k":
            def f(X):
                X3 = X ** 3
                return (X3 / (1 + X3) ** 2) ** k / (1 + X3)
        elif kind == "3k_prime":
            def f(x):
                x3 = x ** 3
                den = 1 + x3 * x3
                return (x3 / den) ** (2 * k) * x / den
        elif kind == "3k_log":
            def f(X):
                X3 = X ** 3
                g = X3 / (1 + X3) ** 2
                return g ** k * mp.log(g) / (1 + X3)
        else:
            def f(X):
                X4 = X ** 4
                return (X4 / (1 + X4) ** 2) ** k * X * X / (1 + X4)
        val, _ = exp_sinh_halfline(f, ctx)
        return val
