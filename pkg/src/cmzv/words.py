"""Letter words for iterated-integral polylogarithms and their algebra.

A word (a_1, ..., a_n) denotes the recursively defined integral

    G(a_1, ..., a_n; z) = int_0^z G(a_2, ..., a_n; x) dx / (x - a_1)

with G of m zero letters equal to log^m(z)/m! and G of the empty word equal
to 1.  Letters are exact values of the form  q * e^{2 pi i m/N} * s  with
q a positive rational, e^{2 pi i m/N} a root of unity, and s an optional
positive quadratic surd from the registry table; they compare symbolically,
never by floating proximity.

Operations provided here:

* ``shuffle``            -- interleaving product on words,
* ``scale``              -- G(mu a_1, ..., mu a_n; mu z) = G(a_1, ..., a_n; z),
* ``hoelder_reflect``    -- the endpoint reflection sending (0, b_1..b_{r-1}, 2)
                            to +-(-1, 1-b_{r-1}, ..., 1-b_1, 1),
* ``fibrate_li_family``  -- constant-letter words for Li_r(t(1-t)^2/2),
* ``level_membership``   -- cyclotomic-level test on a word,
* ``gpl_to_mpl`` / ``mpl_to_gpl`` -- the correspondence with nested series,
* ``gpl_eval``           -- numeric evaluation via nested-series summation.

Trailing zeros (other than the all-zero word) have no direct series; they
are removed by the shuffle identity with G(0; z) = log z, which introduces
explicit log-power bookkeeping in :class:`WordCombination`.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

import mpmath as mp

from .constants import registry
from .errors import DivergentWord, DomainError, InvalidWord, SchemaError, ShapeError
from .mpl import PartialInfo, mpl_series
from .precision import PrecisionContext, DEFAULT_CONTEXT


# ---------------------------------------------------------------------------
# letters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Letter:
    """Exact letter q * e^{2 pi i m/N} * surd; ``zero`` flags the 0 letter."""
    zero: bool = False
    q: Fraction = Fraction(1)
    phase: Fraction = Fraction(0)     # in [0, 1)
    surd: Optional[str] = None        # registry surd name (positive real)

    def __post_init__(self):
        if not self.zero:
            if self.q <= 0:
                raise SchemaError("letter magnitude must be positive")
            if not (0 <= self.phase < 1):
                raise SchemaError("letter phase must be normalized to [0, 1)")

    # -- constructors --------------------------------------------------
    @staticmethod
    def from_rational(r) -> "Letter":
        r = Fraction(r)
        if r == 0:
            return ZERO
        if r > 0:
            return Letter(q=r)
        return Letter(q=-r, phase=Fraction(1, 2))

    @staticmethod
    def root_of_unity(m: int, n: int) -> "Letter":
        ph = Fraction(m, n) % 1
        return Letter(phase=ph)

    @staticmethod
    def surd_letter(name: str) -> "Letter":
        registry().surd(name)  # validate
        return Letter(surd=name)

    # -- JSON ------------------------------------------------------------
    @staticmethod
    def from_json(obj: dict) -> "Letter":
        kind = obj.get("kind")
        if kind == "zero":
            return ZERO
        if kind == "rational":
            return Letter.from_rational(obj["q"])
        if kind == "root_of_unity":
            return Letter.root_of_unity(int(obj["m"]), int(obj["n"]))
        if kind == "surd":
            return Letter.surd_letter(obj["name"])
        if kind == "scaled":
            return Letter(q=Fraction(obj["q"]), phase=Fraction(obj["phase"]) % 1,
                          surd=obj.get("surd"))
        raise SchemaError(f"unknown letter kind {kind!r}")

    def to_json(self) -> dict:
        if self.zero:
            return {"kind": "zero"}
        if self.surd is None and self.phase == 0:
            return {"kind": "rational", "q": str(self.q)}
        if self.surd is None and self.phase == Fraction(1, 2) and self.q != 1:
            return {"kind": "rational", "q": str(-self.q)}
        if self.surd is None and self.q == 1:
            return {"kind": "root_of_unity", "m": self.phase.numerator, "n": self.phase.denominator}
        if self.surd is not None and self.q == 1 and self.phase == 0:
            return {"kind": "surd", "name": self.surd}
        return {"kind": "scaled", "q": str(self.q), "phase": str(self.phase), "surd": self.surd}

    # -- exact structure ---------------------------------------------------
    def is_zero(self) -> bool:
        return self.zero

    def is_one(self) -> bool:
        return not self.zero and self.q == 1 and self.phase == 0 and self.surd is None

    def is_nth_root(self, n: int) -> bool:
        """True iff letter^n == 1 exactly."""
        if self.zero or self.surd is not None or self.q != 1:
            return False
        return (self.phase * n).denominator == 1

    def modulus_surd(self):
        """(q, surd) pair describing the exact modulus."""
        return (self.q, self.surd)

    def mul(self, other: "Letter") -> "Letter":
        if self.zero or other.zero:
            return ZERO
        if self.surd is not None and other.surd is not None:
            raise DomainError("product of two surd letters is outside the letter table")
        return Letter(q=self.q * other.q, phase=(self.phase + other.phase) % 1,
                      surd=self.surd or other.surd)

    def value(self, ctx: PrecisionContext = DEFAULT_CONTEXT):
        with ctx.workdps():
            if self.zero:
                return mp.mpc(0)
            v = mp.mpf(self.q.numerator) / self.q.denominator
            if self.surd is not None:
                v *= registry().surd(self.surd).value()
            if self.phase == 0:
                return mp.mpc(v)
            return v * mp.exp(2 * mp.pi * mp.mpc(0, 1)
                              * self.phase.numerator / self.phase.denominator)

    def __str__(self):
        if self.zero:
            return "0"
        parts = []
        if self.q != 1 or (self.surd is None and self.phase == 0):
            parts.append(str(self.q))
        if self.surd is not None:
            parts.append(self.surd)
        if self.phase != 0:
            parts.append(f"e(2pi*{self.phase})")
        return "*".join(parts)


ZERO = Letter(zero=True)
ONE = Letter()
MINUS_ONE = Letter(phase=Fraction(1, 2))
I_LETTER = Letter(phase=Fraction(1, 4))
MINUS_I = Letter(phase=Fraction(3, 4))
TWO = Letter(q=Fraction(2))


def _coerce_letter(x) -> Letter:
    if isinstance(x, Letter):
        return x
    if isinstance(x, (int, Fraction)):
        return Letter.from_rational(x)
    if isinstance(x, str):
        return Letter.from_rational(Fraction(x))
    if isinstance(x, complex):
        if x == 1j:
            return I_LETTER
        if x == -1j:
            return MINUS_I
    raise SchemaError(f"cannot interpret {x!r} as an exact letter")


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Word:
    letters: Tuple[Letter, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters",
                           tuple(_coerce_letter(a) for a in self.letters))

    @property
    def weight(self) -> int:
        return len(self.letters)

    def is_empty(self) -> bool:
        return not self.letters

    def is_all_zero(self) -> bool:
        return bool(self.letters) and all(a.is_zero() for a in self.letters)

    def trailing_zeros(self) -> int:
        t = 0
        for a in reversed(self.letters):
            if a.is_zero():
                t += 1
            else:
                break
        return t

    def to_json(self):
        return [a.to_json() for a in self.letters]

    @staticmethod
    def from_json(arr) -> "Word":
        return Word(tuple(Letter.from_json(o) for o in arr))

    def __str__(self):
        return "(" + ",".join(str(a) for a in self.letters) + ")"


def word(*letters) -> Word:
    return Word(tuple(letters))


@dataclass
class WordCombination:
    """Rational combination of words with an attached log-power slot.

    ``terms`` maps (word, p) to a coefficient; the pair stands for the term
    coeff * log^p(z) * G(word; z).  All plain-word combinations carry p = 0;
    nonzero p only enters through trailing-zero removal, where G(0; z) = log z
    joins the bookkeeping.
    """
    terms: Dict[Tuple[Word, int], Fraction]

    def __post_init__(self):
        self.terms = {k: Fraction(v) for k, v in self.terms.items() if v != 0}

    @staticmethod
    def single(w: Word, coeff=1, log_power: int = 0) -> "WordCombination":
        return WordCombination({(w, log_power): Fraction(coeff)})

    def __add__(self, other: "WordCombination") -> "WordCombination":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return WordCombination(out)

    def scaled(self, c) -> "WordCombination":
        c = Fraction(c)
        return WordCombination({k: v * c for k, v in self.terms.items()})

    def term_count(self) -> int:
        return len(self.terms)

    def multiplicity_total(self) -> Fraction:
        return sum(self.terms.values(), Fraction(0))


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------

def shuffle(u: Word, v: Word) -> WordCombination:
    """Shuffle product: all interleavings of u and v with multiplicity.

    The evaluation identity G(u; z) G(v; z) = sum over the combination holds
    whenever both factors converge at z.
    """
    nu, nv = u.weight, v.weight
    terms: Dict[Tuple[Word, int], Fraction] = {}
    for positions in itertools.combinations(range(nu + nv), nu):
        pos = set(positions)
        mi, mj = 0, 0
        out = []
        for t in range(nu + nv):
            if t in pos:
                out.append(u.letters[mi])
                mi += 1
            else:
                out.append(v.letters[mj])
                mj += 1
        key = (Word(tuple(out)), 0)
        terms[key] = terms.get(key, Fraction(0)) + 1
    return WordCombination(terms)


def scale(w: Word, mu) -> Word:
    """Scaled word: G(mu a_1, ..., mu a_n; mu z) = G(a_1, ..., a_n; z)."""
    mu = _coerce_letter(mu)
    if mu.is_zero():
        raise DomainError("scaling factor must be nonzero")
    if w.weight and w.letters[-1].is_zero():
        raise InvalidWord("scaling requires a nonzero final letter")
    return Word(tuple(a.mul(mu) for a in w.letters))


def hoelder_reflect(w: Word) -> Tuple[Word, int]:
    """Reflect (0, b_1, ..., b_{r-1}, 2) with b_j in {0, 1} at endpoint 1.

    Returns ((-1, 1-b_{r-1}, ..., 1-b_1, 1), (-1)^{r+1}); both words evaluate
    equally at z = 1 after the sign.
    """
    n = w.weight
    if n < 2 or not w.letters[0].is_zero() or w.letters[-1] != TWO:
        raise ShapeError("word must look like (0, b_1..b_{r-1}, 2)")
    betas = w.letters[1:-1]
    for b in betas:
        if not (b.is_zero() or b.is_one()):
            raise ShapeError("inner letters must be 0 or 1")
    r = len(betas) + 1
    reflected = [MINUS_ONE]
    for b in reversed(betas):
        reflected.append(ONE if b.is_zero() else ZERO)
    reflected.append(ONE)
    return Word(tuple(reflected)), (-1) ** (r + 1)


def fibrate_li_family(r: int) -> WordCombination:
    """Constant-letter words whose combination equals Li_r(t(1-t)^2/2) at t.

    Built from the weight-one case -G(2;t) - G(i;t) - G(-i;t) by repeatedly
    prefixing letter 0 (coefficient 1) and letter 1 (coefficient 2), which
    mirrors d/ds log(s(1-s)^2/2) = 1/s + 2/(s-1).  The result has 3 * 2^{r-1}
    terms with prefix letters in {0,1} and final letter in {2, i, -i}.
    """
    if r < 1:
        raise DomainError("weight must be >= 1")
    terms: Dict[Tuple[Word, int], Fraction] = {
        (word(TWO), 0): Fraction(-1),
        (word(I_LETTER), 0): Fraction(-1),
        (word(MINUS_I), 0): Fraction(-1),
    }
    for _ in range(r - 1):
        nxt: Dict[Tuple[Word, int], Fraction] = {}
        for (w, p), c in terms.items():
            for head, mult in ((ZERO, 1), (ONE, 2)):
                key = (Word((head,) + w.letters), p)
                nxt[key] = nxt.get(key, Fraction(0)) + c * mult
        terms = nxt
    return WordCombination(terms)


def level_membership(w: Word, n: int) -> bool:
    """True iff every letter is 0 or an n-th root of unity, the first letter
    differs from 1 (endpoint convention) and the last letter is nonzero."""
    if n < 1:
        raise DomainError("level must be positive")
    if not w.letters:
        return False
    if w.letters[0].is_one() or w.letters[-1].is_zero():
        return False
    return all(a.is_zero() or a.is_nth_root(n) for a in w.letters)


# ---------------------------------------------------------------------------
# correspondence with nested series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MplForm:
    """Nested-series image of a word: indices, nonzero letters, sign (-1)^n."""
    indices: Tuple[int, ...]
    tilde: Tuple[Letter, ...]
    sign: int

    def argument_values(self, z, ctx: PrecisionContext = DEFAULT_CONTEXT):
        """Numeric arguments (z/a~_1, a~_1/a~_2, ...)."""
        with ctx.workdps():
            vals = [mp.mpc(z) / self.tilde[0].value(ctx)]
            for prev, cur in zip(self.tilde, self.tilde[1:]):
                vals.append(prev.value(ctx) / cur.value(ctx))
            return vals


def gpl_to_mpl(w: Word) -> MplForm:
    """Decompose a word into zero runs and nonzero letters.

    G(0^{a_1-1} t_1 ... 0^{a_n-1} t_n; z) = (-1)^n Li_{a_1..a_n}(z/t_1, t_1/t_2, ...).
    """
    if w.is_empty():
        raise InvalidWord("empty word has no series form")
    if w.letters[-1].is_zero():
        raise InvalidWord("trailing zero letters have no direct series form")
    indices = []
    tilde = []
    zeros = 0
    for a in w.letters:
        if a.is_zero():
            zeros += 1
        else:
            indices.append(zeros + 1)
            tilde.append(a)
            zeros = 0
    return MplForm(tuple(indices), tuple(tilde), (-1) ** len(tilde))


def mpl_to_gpl(form: MplForm) -> Word:
    letters = []
    for a, t in zip(form.indices, form.tilde):
        letters.extend([ZERO] * (a - 1))
        letters.append(t)
    return Word(tuple(letters))


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

_eval_cache: Dict = {}
_eval_lock = threading.Lock()


def _exact_endpoint(z) -> Optional[Letter]:
    if isinstance(z, Letter):
        return z
    if isinstance(z, (int, Fraction)):
        return Letter.from_rational(z) if z != 0 else None
    if isinstance(z, str):
        return Letter.from_rational(Fraction(z))
    return None


def _partials_for(form: MplForm, z_exact: Optional[Letter], zvals, ctx):
    """Partial products of the series arguments; exact when the endpoint is.

    The j-th partial product telescopes to z / a~_j, so exact letters give
    exact unit/sub-unit classification and rational phases.
    """
    if z_exact is None:
        from .mpl import classify_partials
        return classify_partials(zvals)
    out = []
    for t in form.tilde:
        qz, sz = z_exact.modulus_surd()
        qt, st = t.modulus_surd()
        if sz == st:
            unit = qz == qt
            rho = float(qz / qt) if not unit else 1.0
        else:
            with ctx.workdps():
                rho_mp = abs(z_exact.value(ctx)) / abs(t.value(ctx))
                unit = abs(rho_mp - 1) < mp.mpf(10) ** (-(ctx.working_digits - 10))
                rho = float(rho_mp)
        phase = (z_exact.phase - t.phase) % 1 if unit else None
        out.append(PartialInfo(unit, phase, rho if not unit else 1.0))
    return out


def _remove_trailing_zeros(w: Word) -> WordCombination:
    """Rewrite a trailing-zero word as log-power terms on zero-free-tail words.

    Uses t G(u 0^t; z) = G(0; z) G(u 0^{t-1}; z) - sum of the insertions of 0
    into the u-part, recursively in t; G(0; z) contributes one log power.
    """
    t = w.trailing_zeros()
    if t == 0 or w.is_all_zero():
        return WordCombination.single(w)
    base = w.letters[:-1]          # u 0^{t-1}
    acc: Dict[Tuple[Word, int], Fraction] = {}
    # log z * G(u 0^{t-1}; z)
    for (sub, p), c in _remove_trailing_zeros(Word(base)).terms.items():
        key = (sub, p + 1)
        acc[key] = acc.get(key, Fraction(0)) + c
    # minus insertions of 0 strictly before the trailing block
    u_len = len(base) - (t - 1)
    for pos in range(u_len):
        inserted = base[:pos] + (ZERO,) + base[pos:]
        for (sub, p), c in _remove_trailing_zeros(Word(inserted)).terms.items():
            key = (sub, p)
            acc[key] = acc.get(key, Fraction(0)) - c
    return WordCombination(acc).scaled(Fraction(1, t))


def gpl_eval(w: Word, z, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Numeric value of G(word; z).

    The endpoint may be an exact object (int, Fraction, Letter) -- required
    for conditionally convergent unit-modulus configurations -- or any
    number for absolutely convergent ones.
    """
    with ctx.workdps():
        z_exact = _exact_endpoint(z)
        zval = z_exact.value(ctx) if z_exact is not None else mp.mpc(z)

        if w.is_empty():
            return mp.mpc(1)
        if zval == 0:
            raise DomainError("endpoint must be nonzero")
        if w.is_all_zero():
            return mp.log(zval) ** w.weight / mp.factorial(w.weight)
        if abs(w.letters[0].value(ctx) - zval) < mp.mpf(10) ** (-(ctx.working_digits - 10)):
            raise DivergentWord("first letter equals the endpoint")

        zkey = mp.nstr(zval, ctx.working_digits)
        ckey = (w.letters, zkey, ctx.working_digits)
        with _eval_lock:
            if ckey in _eval_cache:
                return _eval_cache[ckey]

        total = mp.mpc(0)
        logz = None
        for (sub, p), c in _remove_trailing_zeros(w).terms.items():
            if p > 0 and logz is None:
                logz = mp.log(zval)
            val = _eval_series_word(sub, z_exact, zval, ctx)
            coeff = mp.mpf(c.numerator) / c.denominator
            if p > 0:
                val = val * logz ** p
            total += coeff * val
        with _eval_lock:
            _eval_cache[ckey] = total
        return total


def _eval_series_word(w: Word, z_exact, zval, ctx):
    if w.is_all_zero():
        return mp.log(zval) ** w.weight / mp.factorial(w.weight)
    form = gpl_to_mpl(w)
    args = form.argument_values(zval, ctx)
    partials = _partials_for(form, z_exact, args, ctx)
    return form.sign * mpl_series(form.indices, args, ctx, partials)


def eval_combination(comb: WordCombination, z, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Evaluate sum of coeff * log^p(z) * G(word; z) over a combination."""
    with ctx.workdps():
        z_exact = _exact_endpoint(z)
        zval = z_exact.value(ctx) if z_exact is not None else mp.mpc(z)
        logz = mp.log(zval)
        total = mp.mpc(0)
        for (w, p), c in comb.terms.items():
            coeff = mp.mpf(c.numerator) / c.denominator
            base = gpl_eval(w, z if z_exact is None else z_exact, ctx) if not w.is_empty() else mp.mpc(1)
            total += coeff * logz ** p * base
        return total
