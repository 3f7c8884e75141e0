import pytest

from cmzv import PrecisionContext
from cmzv.precision import agreed_digits

import mpmath as mp


def test_defaults():
    ctx = PrecisionContext()
    assert (ctx.working_digits, ctx.target_digits, ctx.guard_digits) == (65, 50, 15)


def test_invariants_enforced():
    with pytest.raises(ValueError):
        PrecisionContext(working_digits=55, target_digits=50, guard_digits=10)
    with pytest.raises(ValueError):
        PrecisionContext(working_digits=70, target_digits=50, guard_digits=5)
    with pytest.raises(ValueError):
        PrecisionContext(working_digits=0, target_digits=0, guard_digits=10)


def test_for_target_and_doubled():
    ctx = PrecisionContext.for_target(30)
    assert ctx.target_digits == 30
    assert ctx.working_digits >= 40
    dbl = ctx.doubled()
    assert dbl.target_digits == 60


def test_workdps_scopes_precision():
    ctx = PrecisionContext.for_target(90)
    before = mp.mp.dps
    with ctx.workdps():
        assert mp.mp.dps == ctx.working_digits
    assert mp.mp.dps == before


def test_agreed_digits():
    assert agreed_digits(mp.mpf(1), mp.mpf(1)) == 999
    with mp.workdps(40):
        d = agreed_digits(mp.mpf(1), mp.mpf(1) + mp.mpf(10) ** -20)
    assert 19 <= d <= 20
