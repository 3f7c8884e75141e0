"""Registry of exact named constants and their high-precision rendering.

The registry is a closed table loaded from ``data/constants.json``.  Each
entry binds a symbol to one definition drawn from a fixed set of kinds:

    pi, log_rational(q), log_algebraic(a), zeta(n), catalan,
    polylog_at(k, point), re_polylog_at(k, point), im_polylog_at(k, point),
    cos_pi_rational(nu), sin_pi_rational(nu), log_2sin_pi_rational(nu),
    sqrt_algebraic(a)

where ``a`` names an entry of the quadratic-surd table (values a + b sqrt(d)
with rational a, b) and ``point`` is one of

    rational p, surd name, gauss re+im (rational Gaussian point),
    unit m/n (the root of unity e^{2 pi i m/n}),
    trig scale*cos(nu pi)^power / scale*sin(nu pi)^power.

Rendering is deterministic: a (symbol, working-precision) pair is computed
once and memoized, so repeated resolutions are bit-for-bit identical.
"""

from __future__ import annotations

import json
import threading
from fractions import Fraction
from importlib import resources

import mpmath as mp

from .errors import UnknownConstant, SchemaError
from .polylog import li
from .precision import PrecisionContext, DEFAULT_CONTEXT

_KINDS = {
    "pi", "log_rational", "log_algebraic", "zeta", "catalan",
    "polylog_at", "re_polylog_at", "im_polylog_at",
    "cos_pi_rational", "sin_pi_rational", "log_2sin_pi_rational",
    "sqrt_algebraic",
}

_REAL_KINDS = _KINDS  # every registered kind renders to a real number


def _frac(s) -> Fraction:
    return Fraction(str(s))


class Surd:
    """Exact quadratic surd a + b*sqrt(d) with rational a, b and integer d."""

    def __init__(self, a, b, d):
        self.a = _frac(a)
        self.b = _frac(b)
        self.d = int(d)

    def value(self):
        return mp.mpf(self.a.numerator) / self.a.denominator + \
            mp.mpf(self.b.numerator) / self.b.denominator * mp.sqrt(self.d)


def _point_value(point: dict):
    kind = point.get("kind")
    if kind == "rational":
        p = _frac(point["p"])
        return mp.mpf(p.numerator) / p.denominator
    if kind == "surd":
        return _registry().surd(point["name"]).value()
    if kind == "gauss":
        re = _frac(point["re"])
        im = _frac(point["im"])
        return mp.mpc(mp.mpf(re.numerator) / re.denominator,
                      mp.mpf(im.numerator) / im.denominator)
    if kind == "unit":
        m, n = int(point["m"]), int(point["n"])
        return mp.exp(2 * mp.pi * mp.mpc(0, 1) * m / n)
    if kind == "trig":
        nu = _frac(point["nu"])
        scale = _frac(point["scale"])
        angle = mp.pi * nu.numerator / nu.denominator
        base = mp.cos(angle) if point["fn"] == "cos" else mp.sin(angle)
        return (mp.mpf(scale.numerator) / scale.denominator) * base ** int(point["power"])
    raise SchemaError(f"unknown point kind {kind!r}")


class ConstantRegistry:
    def __init__(self, data: dict):
        if "constants" not in data or "surds" not in data:
            raise SchemaError("constant registry must define 'surds' and 'constants'")
        self._surds = {name: Surd(**spec) for name, spec in data["surds"].items()}
        self._defs = {}
        for entry in data["constants"]:
            sym = entry["symbol"]
            if sym in self._defs:
                raise SchemaError(f"duplicate constant symbol {sym!r}")
            if entry["kind"] not in _KINDS:
                raise SchemaError(f"unknown definition kind {entry['kind']!r}", field=sym)
            self._defs[sym] = (entry["kind"], entry.get("params", {}))
        self._cache = {}
        self._lock = threading.Lock()

    def symbols(self):
        return sorted(self._defs)

    def surd(self, name: str) -> Surd:
        try:
            return self._surds[name]
        except KeyError:
            raise UnknownConstant(f"surd {name!r} not in table") from None

    def surd_names(self):
        return sorted(self._surds)

    def definition(self, symbol: str):
        try:
            return self._defs[symbol]
        except KeyError:
            raise UnknownConstant(f"constant {symbol!r} is not registered") from None

    def resolve(self, symbol: str, ctx: PrecisionContext = DEFAULT_CONTEXT):
        kind, params = self.definition(symbol)
        key = (symbol, ctx.working_digits)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        with ctx.workdps():
            val = mp.mpc(self._compute(kind, params, ctx))
            if kind in _REAL_KINDS:
                # all registered constants are real; enforce the contract
                if abs(mp.im(val)) > mp.mpf(10) ** (-ctx.target_digits):
                    raise SchemaError(f"constant {symbol!r} rendered a non-real value")
                val = mp.mpc(mp.re(val), 0)
        with self._lock:
            self._cache[key] = val
        return val

    def _compute(self, kind, params, ctx):
        if kind == "pi":
            return mp.pi
        if kind == "log_rational":
            q = _frac(params["q"])
            if q <= 0:
                raise SchemaError("log_rational requires q > 0")
            return mp.log(mp.mpf(q.numerator) / q.denominator)
        if kind == "log_algebraic":
            return mp.log(self.surd(params["a"]).value())
        if kind == "zeta":
            return mp.zeta(int(params["n"]))
        if kind == "catalan":
            # Catalan's constant as Im Li_2(i)
            return mp.im(li(2, mp.mpc(0, 1), ctx))
        if kind == "sqrt_algebraic":
            return mp.sqrt(self.surd(params["a"]).value())
        if kind in ("polylog_at", "re_polylog_at", "im_polylog_at"):
            k = int(params["k"])
            z = _point_value(params["point"])
            val = li(k, z, ctx)
            if kind == "re_polylog_at":
                return mp.re(val)
            if kind == "im_polylog_at":
                return mp.im(val)
            return val
        if kind == "cos_pi_rational":
            nu = _frac(params["nu"])
            return mp.cos(mp.pi * nu.numerator / nu.denominator)
        if kind == "sin_pi_rational":
            nu = _frac(params["nu"])
            return mp.sin(mp.pi * nu.numerator / nu.denominator)
        if kind == "log_2sin_pi_rational":
            nu = _frac(params["nu"])
            return mp.log(2 * mp.sin(mp.pi * nu.numerator / nu.denominator))
        raise SchemaError(f"unhandled kind {kind!r}")


_registry_obj = None
_registry_init_lock = threading.Lock()


def _registry() -> ConstantRegistry:
    global _registry_obj
    if _registry_obj is None:
        with _registry_init_lock:
            if _registry_obj is None:
                text = resources.files("cmzv.data").joinpath("constants.json").read_text()
                _registry_obj = ConstantRegistry(json.loads(text))
    return _registry_obj


def registry() -> ConstantRegistry:
    """The process-wide constant registry (loaded lazily from package data)."""
    return _registry()


def resolve_constant(symbol: str, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Numeric value of a registered constant at the context's precision."""
    return _registry().resolve(symbol, ctx)
