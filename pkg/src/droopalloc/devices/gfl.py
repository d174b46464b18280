"""Grid-following inverter: PLL synchronisation, PQ outer loop, current inner loop.

Time is in per-unit (the equations carry no base frequency).
"""
from dataclasses import dataclass

from .. import ad
from .base import COUPLE_D, COUPLE_Q, DC_PIN, DeviceModel, Equation, check_positive


@dataclass(frozen=True)
class GflParams:
    L_f: float = 0.2724
    C_f: float = 0.2612
    K_PLL_P: float = 2.65
    K_PLL_I: float = 6.5
    omega_s: float = 1.0
    K_CC_P: float = 1.443
    K_CC_I: float = 14.43
    K_CC_F: float = 0.0
    K_APC_P: float = 1.0
    K_APC_I: float = 3.0
    K_RPC_P: float = -3.0
    K_RPC_I: float = -4.0
    omega_g: float = 1.0
    p_star: float = 0.8
    q_star: float = 0.25
    omega_pc: float = 332.8
    omega_qc: float = 732.8

    def validate(self):
        check_positive(self, ("L_f", "C_f", "omega_pc", "omega_qc"))


_F = [("sl1", "itd"), ("sl2", "itq"), ("sl3", "gamd"), ("sl4", "gamq"),
      ("sl5", "vcD"), ("sl6", "vcQ"), ("sl7", "gpll"), ("sl8", "thpll"),
      ("sl9", "phid"), ("sl10", "phiq"), ("sl11", "pt"), ("sl12", "qt")]
_G = [("al1", "vcd"), ("al2", "vcq"), ("al3", "vtd"), ("al4", "vtq"),
      ("al5", "itD"), ("al6", "itQ"), ("al7", "p"), ("al8", "q"), ("al9", "w"),
      ("al10", "igd"), ("al11", "igq"), ("al12", "itd_ref"),
      ("al13", "itq_ref"), ("al14", "idc")]


class GflModel(DeviceModel):
    kind = "gfl"
    states = ("itd", "itq", "gamd", "gamq", "vcD", "vcQ", "gpll", "thpll",
              "phid", "phiq", "pt", "qt")
    algebraics = ("vtd", "vtq", "w", "itd_ref", "itq_ref", "itD", "itQ", "vcd",
                  "vcq", "p", "q", "igd", "igq", "igD", "igQ", "udc", "idc")
    equations = tuple(
        [Equation(t, "f", v) for t, v in _F]
        + [Equation(t, "g", v) for t, v in _G]
        + [Equation(DC_PIN, "g", "udc", False),
           Equation(COUPLE_D, "g", "igD", False),
           Equation(COUPLE_Q, "g", "igQ", False)])
    params_type = GflParams
    vc_global = (("x", "vcD"), ("x", "vcQ"))

    def _residuals(self, x, y, p):
        itd, itq, gamd, gamq, vcD, vcQ, gpll, thpll, phid, phiq, pt, qt = x
        (vtd, vtq, w, itd_ref, itq_ref, itD, itQ, vcd, vcq, pe, qe,
         igd, igq, igD, igQ, udc, idc) = y
        c, s = ad.cos(thpll), ad.sin(thpll)
        f = [
            w * itq + (vtd - vcd) / p.L_f,
            -w * itd + (vtq - vcq) / p.L_f,
            itd_ref - itd,
            itq_ref - itq,
            p.omega_g * vcQ + (itD - igD) / p.C_f,
            -p.omega_g * vcD + (itQ - igQ) / p.C_f,
            vcq,
            p.K_PLL_P * vcq + p.K_PLL_I * gpll + p.omega_s - p.omega_g,
            p.p_star - pe,
            p.q_star - qe,
            -p.omega_pc * pt + pe * p.omega_pc,
            -p.omega_qc * qt + qe * p.omega_qc,
        ]
        g = [
            vcd - vcD * c - vcQ * s,
            vcq + vcD * s - vcQ * c,
            vtd - p.K_CC_P * (itd_ref - itd) - p.K_CC_I * gamd
            + w * p.L_f * itq - p.K_CC_F * vcd,
            vtq - p.K_CC_P * (itq_ref - itq) - p.K_CC_I * gamq
            - w * p.L_f * itd - p.K_CC_F * vcq,
            itD - itd * c + itq * s,
            itQ - itd * s - itq * c,
            pe - vcd * igd - vcq * igq,
            qe - vcq * igd + vcd * igq,
            w - p.omega_s - p.K_PLL_P * vcq - p.K_PLL_I * gpll,
            igd - igD * c - igQ * s,
            igq + igD * s - igQ * c,
            itd_ref - p.K_APC_P * (p.p_star - pe) - p.K_APC_I * phid,
            itq_ref - p.K_RPC_P * (p.q_star - qe) - p.K_RPC_I * phiq,
            udc * idc - vtd * itd - vtq * itq,
            udc - 1.0,
        ]
        return f, g

    def flat_start(self, p):
        ps, qs = p.p_star, p.q_star
        x = [ps, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, ps, qs]
        y = [1.0, 0.0, p.omega_s, ps, 0.0, ps, 0.0, 1.0, 0.0, ps, qs,
             ps, 0.0, ps, 0.0, 1.0, ps]
        return x, y
