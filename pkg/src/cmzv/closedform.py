"""Closed-form expression trees over the exact constant registry.

A tree is built from six node types:

    rational p/q        exact rational leaf
    constant symbol     registry lookup
    sum [..]            n-ary addition
    product [..]        n-ary multiplication
    power base, n       integer exponent
    surd_scale q, d     the real number q * sqrt(d), q rational, d integer

The JSON spelling used by the identity catalog is compact:

    {"rat": "25/12"} | {"const": "zeta3"} | {"sum": [...]} | {"prod": [...]}
    | {"pow": [node, n]} | {"surd": {"q": "11/12", "d": 2}}

Evaluation is purely functional; the only shared state is the registry's
memo cache.  Every arithmetic step runs at working precision, and the
guard-digit budget of the context absorbs rounding for the bounded tree
depths that occur in practice.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import mpmath as mp

from .constants import resolve_constant
from .errors import SchemaError
from .precision import PrecisionContext, DEFAULT_CONTEXT


@dataclass(frozen=True)
class ClosedForm:
    """One node of a closed-form expression tree."""
    kind: str
    payload: Tuple

    # -- constructors -------------------------------------------------
    @staticmethod
    def rational(p) -> "ClosedForm":
        return ClosedForm("rational", (Fraction(p),))

    @staticmethod
    def constant(symbol: str) -> "ClosedForm":
        return ClosedForm("constant", (symbol,))

    @staticmethod
    def sum(*terms: "ClosedForm") -> "ClosedForm":
        return ClosedForm("sum", tuple(terms))

    @staticmethod
    def product(*factors: "ClosedForm") -> "ClosedForm":
        return ClosedForm("product", tuple(factors))

    @staticmethod
    def power(base: "ClosedForm", exponent: int) -> "ClosedForm":
        return ClosedForm("power", (base, int(exponent)))

    @staticmethod
    def surd_scale(q, d: int) -> "ClosedForm":
        return ClosedForm("surd_scale", (Fraction(q), int(d)))

    # -- JSON ----------------------------------------------------------
    @staticmethod
    def from_json(obj) -> "ClosedForm":
        if not isinstance(obj, dict) or len(obj) != 1:
            raise SchemaError(f"closed-form node must be a single-key object, got {obj!r}")
        key, val = next(iter(obj.items()))
        if key == "rat":
            return ClosedForm.rational(val)
        if key == "const":
            return ClosedForm.constant(val)
        if key == "sum":
            return ClosedForm.sum(*(ClosedForm.from_json(t) for t in val))
        if key == "prod":
            return ClosedForm.product(*(ClosedForm.from_json(t) for t in val))
        if key == "pow":
            base, n = val
            return ClosedForm.power(ClosedForm.from_json(base), n)
        if key == "surd":
            return ClosedForm.surd_scale(val["q"], val["d"])
        raise SchemaError(f"unknown closed-form node kind {key!r}")

    def to_json(self):
        if self.kind == "rational":
            return {"rat": str(self.payload[0])}
        if self.kind == "constant":
            return {"const": self.payload[0]}
        if self.kind == "sum":
            return {"sum": [t.to_json() for t in self.payload]}
        if self.kind == "product":
            return {"prod": [t.to_json() for t in self.payload]}
        if self.kind == "power":
            return {"pow": [self.payload[0].to_json(), self.payload[1]]}
        if self.kind == "surd_scale":
            q, d = self.payload
            return {"surd": {"q": str(q), "d": d}}
        raise SchemaError(f"unknown node kind {self.kind!r}")

    def constants_used(self):
        out = set()
        if self.kind == "constant":
            out.add(self.payload[0])
        elif self.kind in ("sum", "product"):
            for t in self.payload:
                out |= t.constants_used()
        elif self.kind == "power":
            out |= self.payload[0].constants_used()
        return out


def eval_closed_form(expr: ClosedForm, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Evaluate a tree at the context's working precision (returns mpc)."""
    with ctx.workdps():
        return _eval(expr, ctx)


def _eval(expr: ClosedForm, ctx: PrecisionContext):
    kind = expr.kind
    if kind == "rational":
        q = expr.payload[0]
        return mp.mpc(mp.mpf(q.numerator) / q.denominator)
    if kind == "constant":
        return resolve_constant(expr.payload[0], ctx)
    if kind == "sum":
        return sum((_eval(t, ctx) for t in expr.payload), mp.mpc(0))
    if kind == "product":
        out = mp.mpc(1)
        for t in expr.payload:
            out *= _eval(t, ctx)
        return out
    if kind == "power":
        base, n = expr.payload
        return _eval(base, ctx) ** n
    if kind == "surd_scale":
        q, d = expr.payload
        return mp.mpc(mp.mpf(q.numerator) / q.denominator * mp.sqrt(d))
    raise SchemaError(f"unknown node kind {kind!r}")
