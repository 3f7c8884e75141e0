"""Integer-relation detection over curated constant pools.

Given a computed series value S and basis constants b_1..b_m, the hunter
looks for a nonzero integer vector (c_0, ..., c_m) with

    c_0 S + c_1 b_1 + ... + c_m b_m  ~  0

to within 10^-(precision - 10), using the standard PSLQ algorithm (the
mpmath implementation, which follows the published partial-sums-of-squares
formulation with periodic full reduction).  A detected relation is only
reported after a confirmation pass at doubled precision: genuine relations
deepen their residual, precision artifacts do not.

The basis presets mirror the constant pools that appear in the catalog's
closed forms, one pool per cyclotomic level and weight; surd prefactors are
folded into the basis elements so the sought coefficients stay rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath as mp

from .closedform import ClosedForm, eval_closed_form
from .errors import DomainError, NoRelationFound, PrecisionTooLow, SchemaError
from .precision import PrecisionContext
from .series import SeriesSpec, eval_series

_R = ClosedForm.rational
_C = ClosedForm.constant
_S = ClosedForm.surd_scale
_POW = ClosedForm.power
_P = ClosedForm.product
_SUM = ClosedForm.sum

_PI2 = _POW(_C("pi"), 2)
_LAM = _C("lambda")

#: Named constant pools: preset -> list of (label, closed-form expression).
BASIS_PRESETS = {
    "level4-w1": [
        ("pi", _C("pi")),
        ("log2", _LAM),
    ],
    "level4-w2": [
        ("catalan", _C("catalan")),
        ("pi^2", _PI2),
        ("log2^2", _POW(_LAM, 2)),
        ("pi*log2", _P(_C("pi"), _LAM)),
    ],
    "level4-w3": [
        ("zeta3", _C("zeta3")),
        ("pi*catalan", _P(_C("pi"), _C("catalan"))),
        ("log2^3", _POW(_LAM, 3)),
        ("pi^2*log2", _P(_PI2, _LAM)),
    ],
    "level4-w4": [
        ("li4_half", _C("li4_half")),
        ("pi*im_li3_one_plus_i_over_2", _P(_C("pi"), _C("im_li3_one_plus_i_over_2"))),
        ("zeta3*log2", _P(_C("zeta3"), _LAM)),
        ("catalan^2", _POW(_C("catalan"), 2)),
        ("log2^4", _POW(_LAM, 4)),
        ("pi^2*log2^2", _P(_PI2, _POW(_LAM, 2))),
        ("pi^4", _POW(_C("pi"), 4)),
    ],
    "level8-w2": [
        ("sqrt2*li2(sqrt2-1)", _P(_S(1, 2), _C("li2_sqrt2_minus_1"))),
        ("sqrt2*log(1+sqrt2)^2", _P(_S(1, 2), _POW(_C("lambda_tilde"), 2))),
        ("sqrt2*pi^2", _P(_S(1, 2), _PI2)),
    ],
    "level12-w2": [
        ("sqrt3*li2(2-sqrt3)", _P(_S(1, 3), _C("li2_2_minus_sqrt3"))),
        ("sqrt3*log(2+sqrt3)^2", _P(_S(1, 3), _POW(_C("Lambda_tilde"), 2))),
        ("sqrt3*pi^2", _P(_S(1, 3), _PI2)),
    ],
    "level12-w1": [
        ("log2", _LAM),
        ("log3", _C("Lambda")),
        ("log(2+sqrt3)", _C("Lambda_tilde")),
        ("sqrt3*log2", _P(_S(1, 3), _LAM)),
        ("sqrt3*log3", _P(_S(1, 3), _C("Lambda"))),
        ("sqrt3*log(2+sqrt3)", _P(_S(1, 3), _C("Lambda_tilde"))),
    ],
    "level12-w1-hbar": [
        ("log2", _LAM),
        ("sqrt3*log2", _P(_S(1, 3), _LAM)),
        ("sqrt3*log(2+sqrt3)", _P(_S(1, 3), _C("Lambda_tilde"))),
    ],
    "level5-w3": [
        ("re_li3(e^(2pi i/5))", _C("re_li3_root5")),
        ("zeta3", _C("zeta3")),
    ],
    "golden-w1": [
        ("log3", _C("Lambda")),
        ("log_golden", _C("log_golden")),
        ("sqrt5*log3", _P(_S(1, 5), _C("Lambda"))),
        ("sqrt5*log_golden", _P(_S(1, 5), _C("log_golden"))),
    ],
    "25k3-w2": [
        ("catalan", _C("catalan")),
        ("pi*log2", _P(_C("pi"), _LAM)),
        ("log2", _LAM),
    ],
}


@dataclass(frozen=True)
class RelationProblem:
    """A target value, a labelled basis, and the detection budget."""
    target: object
    basis: Tuple[Tuple[str, object], ...]
    max_coeff_digits: int = 4
    precision_digits: int = 65

    def __post_init__(self):
        if self.max_coeff_digits < 1 or self.precision_digits < 1:
            raise DomainError("digit budgets must be positive")
        if not self.basis:
            raise DomainError("basis must be nonempty")
        needed = 20 + self.max_coeff_digits * (len(self.basis) + 1)
        if self.precision_digits < needed:
            raise PrecisionTooLow(
                f"headroom rule needs >= {needed} digits, got {self.precision_digits}")
        with mp.workdps(self.precision_digits):
            if mp.mpf(self.target) == 0:
                raise DomainError("target must be a nonzero computed value")
            vals = [mp.mpf(v) for _, v in self.basis]
            for i in range(len(vals)):
                for j in range(i + 1, len(vals)):
                    if vals[i] == vals[j]:
                        raise DomainError(
                            f"basis values {self.basis[i][0]!r} and "
                            f"{self.basis[j][0]!r} coincide at working precision")


def pslq(problem: RelationProblem) -> Optional[List[int]]:
    """Integer vector (c_0, ..., c_m) with c_0*target + sum c_i*b_i ~ 0, or None.

    The detection threshold sits 10 digits below the problem's precision;
    any returned vector is primitive (content 1) and satisfies the residual
    bound at that threshold.
    """
    with mp.workdps(problem.precision_digits):
        tol = mp.mpf(10) ** (-(problem.precision_digits - 10))
        values = [mp.mpf(problem.target)] + [mp.mpf(v) for _, v in problem.basis]
        vec = mp.pslq(values, tol=tol, maxcoeff=10 ** problem.max_coeff_digits,
                      maxsteps=20000)
        if vec is None:
            return None
        g = 0
        for c in vec:
            g = math.gcd(g, abs(c))
        if g > 1:
            vec = [c // g for c in vec]
        residual = mp.fsum(c * v for c, v in zip(vec, values))
        if abs(residual) >= tol:
            return None
        # canonical sign: leading nonzero entry positive
        for c in vec:
            if c:
                if c < 0:
                    vec = [-x for x in vec]
                break
        return list(vec)


def _confirm(vec: Sequence[int], target_val, basis_vals, precision_digits: int):
    """Residual of the relation at doubled precision."""
    with mp.workdps(2 * precision_digits):
        return abs(mp.fsum(
            [vec[0] * target_val]
            + [c * v for c, v in zip(vec[1:], basis_vals)]))


def hunt_reduction(series: SeriesSpec, preset: str,
                   ctx: Optional[PrecisionContext] = None,
                   max_coeff_digits: int = 4):
    """Rediscover a closed form for a series over a preset constant pool.

    Returns (candidate ClosedForm, confirmation residual, integer vector).
    The candidate is advisory: it reproduces the PSLQ vector as an
    expression tree and its residual is re-measured at doubled precision; a
    relation that fails to deepen there is rejected.  Raises NoRelationFound
    when detection or confirmation fails.
    """
    if preset not in BASIS_PRESETS:
        raise SchemaError(f"unknown basis preset {preset!r}")
    pool = BASIS_PRESETS[preset]
    precision = ctx.working_digits if ctx is not None else 65
    needed = 20 + max_coeff_digits * (len(pool) + 2)
    precision = max(precision, needed)

    det_ctx = PrecisionContext.for_target(precision - 10, 10)
    target_val = eval_series(series, det_ctx)
    basis_vals = []
    with det_ctx.workdps():
        for label, expr in pool:
            basis_vals.append(mp.re(eval_closed_form(expr, det_ctx)))
        target_real = mp.re(target_val)

    problem = RelationProblem(target=target_real,
                              basis=tuple((lbl, v) for (lbl, _), v in zip(pool, basis_vals)),
                              max_coeff_digits=max_coeff_digits,
                              precision_digits=precision)
    vec = pslq(problem)
    if vec is None or vec[0] == 0:
        raise NoRelationFound(f"no relation over preset {preset!r} at {precision} digits")

    confirm_ctx = PrecisionContext.for_target(2 * precision - 15, 15)
    target2 = eval_series(series, confirm_ctx)
    with confirm_ctx.workdps():
        basis2 = [mp.re(eval_closed_form(expr, confirm_ctx)) for _, expr in pool]
        residual = abs(mp.fsum([vec[0] * mp.re(target2)]
                               + [c * v for c, v in zip(vec[1:], basis2)]))
        bound = mp.mpf(10) ** (-(2 * precision - 30))
        if residual >= bound:
            raise NoRelationFound(
                f"relation failed doubled-precision confirmation "
                f"(residual {mp.nstr(residual, 3)}, bound {mp.nstr(bound, 3)})")

    c0 = vec[0]
    terms = []
    for c, (label, expr) in zip(vec[1:], pool):
        if c == 0:
            continue
        terms.append(ClosedForm.product(ClosedForm.rational(Fraction(-c, c0)), expr))
    candidate = terms[0] if len(terms) == 1 else ClosedForm.sum(*terms)
    return candidate, residual, vec
