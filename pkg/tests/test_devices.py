import math
from dataclasses import fields

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import local_rows, named_point
from droopalloc.devices import (LABELLED_TAGS, MODELS, default_params, droop_convert,
                                droop_convert_inverse, equation_map, gfl_residuals,
                                gfm_residuals, unified_residuals)
from droopalloc.errors import InvalidArgumentError
from droopalloc.frames import GLOBAL, LOCAL, Phasor2, to_global, to_local
from droopalloc.numerics import newton_equilibrium

small = st.floats(-2.0, 2.0, allow_nan=False)


def test_parameter_defaults_follow_the_tables():
    u = default_params("unified")
    assert (u.K_Q, u.K_PC_P, u.K_PC_I, u.omega_pc, u.omega_qc, u.q_star) == (
        0.05, 0.23, 0.6, 332.8, 732.8, 0.25)
    assert (u.C_f, u.L_f, u.K_CC_F) == (0.3, 0.1, 0.0)
    m = default_params("gfm")
    assert (m.K_P, m.K_Q, m.L_f, m.C_f) == (0.1, 0.01, 0.05, 0.3)
    g = default_params("gfl")
    assert (g.L_f, g.C_f, g.K_PLL_P, g.K_PLL_I) == (0.2724, 0.2612, 2.65, 6.5)


def test_parameter_counts():
    assert len(fields(default_params("unified"))) == 21
    assert len(fields(default_params("gfm"))) == 17


def test_state_dimensions():
    assert (MODELS["unified"].n, MODELS["unified"].m) == (12, 20)
    assert MODELS["gfl"].n == 12 and MODELS["gfm"].n == 11
    # algebraic sets hold the labelled model variables plus the DC pin and coupling currents
    assert MODELS["gfl"].m == 17 and MODELS["gfm"].m == 20


def test_unified_filter_is_still_at_steady_power():
    x, y = named_point("unified", pt=0.63, p=0.63)
    assert local_rows("unified", x, y)["su1"] == 0.0


def test_unified_droop_at_zero_frequency_deviation():
    x, y = named_point("unified", wpll=0.0, p0=0.8)
    assert local_rows("unified", x, y)["au2"] == 0.0


def test_gfl_pll_integrator_at_aligned_voltage():
    x, y = named_point("gfl", vcq=0.0)
    assert local_rows("gfl", x, y)["sl7"] == 0.0


def test_gfl_power_identity():
    x, y = named_point("gfl", vcd=1.0, vcq=0.0, igd=0.8, igq=0.0, p=0.8)
    assert local_rows("gfl", x, y)["al7"] == 0.0


def test_gfm_droop_at_setpoint():
    x, y = named_point("gfm", pt=0.8, dw=0.0)
    assert local_rows("gfm", x, y)["am1.5"] == 0.0


def test_gfm_angle_still_without_deviation():
    x, y = named_point("gfm", dw=0.0)
    assert local_rows("gfm", x, y)["sm3"] == 0.0


def test_residual_functions_reject_non_finite_input():
    x, y = named_point("unified")
    x[0] = math.nan
    with pytest.raises(InvalidArgumentError):
        unified_residuals(x, y, default_params("unified"))
    x, y = named_point("gfl")
    with pytest.raises(InvalidArgumentError):
        gfl_residuals(x[:-1], y, default_params("gfl"))
    x, y = named_point("gfm")
    with pytest.raises(InvalidArgumentError):
        gfm_residuals(x, y, default_params("gfm"), (math.inf, 0.0))


@pytest.mark.parametrize("sid", ["base", "base/gfl-gfl", "base/gfm-gfm"])
def test_device_residuals_vanish_at_newton_equilibrium(sid):
    from droopalloc.caselib import load_builtin
    from droopalloc.network import assemble
    sys = assemble(load_builtin(sid))
    rep = newton_equilibrium(sys, sys.flat_start())
    assert rep.residual <= 1e-9
    F, G = sys.residual(rep.x, rep.y)
    assert np.abs(F).sum() + np.abs(G).sum() <= 1e-9


@given(vcd=small, vcq=small, igd=small, igq=small)
def test_power_balance_identity(vcd, vcq, igd, igq):
    # p, q solving au6/au7 satisfy p^2 + q^2 = |v|^2 |i|^2
    x, y = named_point("unified", vcd=vcd, vcq=vcq, igd=igd, igq=igq)
    rows = local_rows("unified", x, y)
    p = y[MODELS["unified"].algebraics.index("p")] - rows["au6"]
    q = y[MODELS["unified"].algebraics.index("q")] - rows["au7"]
    lhs = p * p + q * q
    rhs = (vcd ** 2 + vcq ** 2) * (igd ** 2 + igq ** 2)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, rhs)


@settings(max_examples=50)
@given(d=small, q=small, theta=st.floats(-7.0, 7.0, allow_nan=False))
def test_rotation_rows_match_frame_module(d, q, theta):
    # unified: local (vcd, vcq) rotated by thpll gives (vcD, vcQ)
    glob = to_global(Phasor2(d, q, LOCAL), theta)
    x, y = named_point("unified", vcd=d, vcq=q, thpll=theta, vcD=glob.d, vcQ=glob.q,
                       igd=d, igq=q, igD=glob.d, igQ=glob.q)
    r = local_rows("unified", x, y)
    for tag in ("au9", "au10", "au11", "au12"):
        assert abs(r[tag]) <= 1e-12
    # gfl and gfm: global quantities rotated back into the local frame
    loc = to_local(Phasor2(d, q, GLOBAL), theta)
    x, y = named_point("gfl", vcD=d, vcQ=q, thpll=theta, vcd=loc.d, vcq=loc.q,
                       igD=d, igQ=q, igd=loc.d, igq=loc.q)
    r = local_rows("gfl", x, y)
    for tag in ("al1", "al2", "al10", "al11"):
        assert abs(r[tag]) <= 1e-12
    x, y = named_point("gfm", vcD=d, vcQ=q, th=theta, vcd=loc.d, vcq=loc.q,
                       igD=d, igQ=q, igd=loc.d, igq=loc.q)
    itD, itQ = to_global(Phasor2(0.3, -0.1, LOCAL), theta).as_array()
    x[MODELS["gfm"].states.index("itd")] = 0.3
    x[MODELS["gfm"].states.index("itq")] = -0.1
    y[MODELS["gfm"].algebraics.index("itD")] = itD
    y[MODELS["gfm"].algebraics.index("itQ")] = itQ
    r = local_rows("gfm", x, y)
    for tag in ("am7", "am8", "am9", "am10", "am11", "am12"):
        assert abs(r[tag]) <= 1e-12


def test_residuals_have_no_time_argument():
    import inspect
    for model in MODELS.values():
        assert "t" not in inspect.signature(model.residuals).parameters


def test_droop_conversion_examples():
    assert droop_convert(1000.0) == pytest.approx(0.1, abs=1e-15)
    assert droop_convert(654.546) == pytest.approx(0.152778, abs=5e-7)
    assert droop_convert(droop_convert_inverse(0.1)) == pytest.approx(0.1, abs=1e-12)
    assert droop_convert_inverse(0.1) == pytest.approx(1000.0)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_droop_conversion_domain(bad):
    with pytest.raises(InvalidArgumentError):
        droop_convert(bad)


@given(st.floats(1e-6, 1e6))
def test_droop_conversion_round_trip(k):
    assert abs(droop_convert_inverse(droop_convert(k)) - k) <= 1e-12 * k


def test_equation_map_covers_every_labelled_tag_once():
    rows = equation_map()
    for kind, tags in LABELLED_TAGS.items():
        mapped = [r[1] for r in rows if r[0] == kind and r[5]]
        assert mapped == tags or sorted(mapped) == sorted(tags)
        assert len(mapped) == len(set(mapped))
    # local indices are unique per residual block
    seen = {(r[0], r[2], r[3]) for r in rows}
    assert len(seen) == len(rows)


def test_unknown_parameter_override_is_rejected():
    with pytest.raises(InvalidArgumentError):
        default_params("gfm", K_X=1.0)
