"""Unified grid-forming/following inverter (PLL plus P-omega and V-Q droop).

Time is in seconds; ``omega_b`` scales the PLL angle and the LC filter.
"""
import math
from dataclasses import dataclass

from .. import ad
from .base import COUPLE_D, COUPLE_Q, DC_PIN, DeviceModel, Equation, check_positive


@dataclass(frozen=True)
class UnifiedParams:
    p_star: float = 0.8
    q_star: float = 0.25
    omega0: float = 1.0
    V0: float = 1.0
    K_P: float = 10.0  # per-unit P-omega droop, the decision variable
    K_Q: float = 0.05
    omega_pc: float = 332.8
    omega_qc: float = 732.8
    omega_b: float = 120.0 * math.pi
    K_VC_P: float = 1.0
    K_VC_I: float = 2.0
    K_VC_F: float = 1.0
    K_CC_P: float = 1.0
    K_CC_I: float = 2.0
    K_CC_F: float = 0.0
    K_PC_P: float = 0.23
    K_PC_I: float = 0.6
    K_PLL_P: float = 0.2
    K_PLL_I: float = 5.0
    C_f: float = 0.3
    L_f: float = 0.1

    def validate(self):
        check_positive(self, ("L_f", "C_f", "omega_b", "omega_pc", "omega_qc"))
        if not self.K_P >= 0:
            raise ValueError(f"K_P must be non-negative, got {self.K_P}")


_F = [("su1", "pt"), ("su2", "qt"), ("su3", "phid"), ("su4", "eta"),
      ("su5", "delta"), ("su6", "zeta"), ("su7", "thpll"), ("su8", "gamd"),
      ("su9", "itd"), ("su10", "itq"), ("su11", "vcd"), ("su12", "vcq")]
_G = [("au1", "w"), ("au2", "p0"), ("au3", "vcd_ref"), ("au4", "tht"),
      ("au5", "wpll"), ("au6", "p"), ("au7", "q"), ("au8", "thc"),
      ("au9", "vcD"), ("au10", "vcQ"), ("au11", "igd"), ("au12", "igq"),
      ("au13", "itd_ref"), ("au14", "vtd"), ("au15", "vt"), ("au16", "vtq"),
      ("au17", "idc")]


class UnifiedModel(DeviceModel):
    kind = "unified"
    states = ("pt", "qt", "phid", "eta", "delta", "zeta", "thpll", "gamd",
              "itd", "itq", "vcd", "vcq")
    algebraics = ("w", "thc", "tht", "p0", "wpll", "vcd_ref", "itd_ref", "igd",
                  "igq", "igD", "igQ", "vtd", "vtq", "vt", "vcD", "vcQ", "p", "q",
                  "udc", "idc")
    equations = tuple(
        [Equation(t, "f", v) for t, v in _F]
        + [Equation(t, "g", v) for t, v in _G]
        + [Equation(DC_PIN, "g", "udc", False),
           Equation(COUPLE_D, "g", "igD", False),
           Equation(COUPLE_Q, "g", "igQ", False)])
    params_type = UnifiedParams
    vc_global = (("y", "vcD"), ("y", "vcQ"))
    droop_param = "K_P"

    def _residuals(self, x, y, p):
        pt, qt, phid, eta, delta, zeta, thpll, gamd, itd, itq, vcd, vcq = x
        (w, thc, tht, p0, wpll, vcd_ref, itd_ref, igd, igq, igD, igQ,
         vtd, vtq, vt, vcD, vcQ, pe, qe, udc, idc) = y
        wb = p.omega_b
        c, s = ad.cos(thpll), ad.sin(thpll)
        f = [
            -p.omega_pc * pt + pe * p.omega_pc,
            -p.omega_qc * qt + qe * p.omega_qc,
            vcd_ref - vcd,
            p0 - pt,
            p.K_PC_P * (p0 - pt) + p.K_PC_I * eta,
            thc - thpll,
            wpll * wb,
            itd_ref - itd,
            wb / p.L_f * (vtd - vcd) + wb * w * itq,
            wb / p.L_f * (vtq - vcq) - wb * w * itd,
            wb / p.C_f * (itd - igd) + wb * w * vcq,
            wb / p.C_f * (itq - igq) - wb * w * vcd,
        ]
        # au2, au5, au13, au14 use the standard PI / droop / decoupling
        # signs; the printed signs make the device unstable for every K_P.
        g = [
            w - p.omega0 - wpll,
            p0 - p.p_star + p.K_P * wpll,
            vcd_ref - p.V0 - p.K_Q * (p.q_star - qt),
            delta - tht + thpll,
            wpll - p.K_PLL_P * (thc - thpll) - p.K_PLL_I * zeta,
            pe - vcd * igd - vcq * igq,
            qe - vcq * igd + vcd * igq,
            # tan(thc) form rewritten without the pi/2 pole
            vcD * ad.sin(thc) - vcQ * ad.cos(thc),
            vcD - vcd * c + vcq * s,
            vcQ - vcd * s - vcq * c,
            igD - igd * c + igq * s,
            igQ - igd * s - igq * c,
            itd_ref - p.K_VC_P * (vcd_ref - vcd) - p.K_VC_I * phid
            - p.K_VC_F * igd + w * p.C_f * vcq,
            vtd - p.K_CC_P * (itd_ref - itd) - p.K_CC_I * gamd
            - p.K_CC_F * vcd + w * p.L_f * itq,
            vt * ad.cos(tht) - vtd * c + vtq * s,
            vt * ad.sin(tht) - vtd * s - vtq * c,
            udc * idc - vtd * itd - vtq * itq,
            udc - 1.0,
        ]
        return f, g

    def flat_start(self, p):
        ps, qs = p.p_star, p.q_star
        x = [ps, qs, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, ps, 0.0, p.V0, 0.0]
        y = [p.omega0, 0.0, 0.0, ps, 0.0, p.V0, ps, ps, 0.0, ps, 0.0,
             1.0, 0.0, 1.0, p.V0, 0.0, ps, qs, 1.0, ps]
        return x, y
