"""Grid-forming inverter: omega-P and V-Q droop, cascaded voltage/current loops.

Droop gains ``K_P`` and ``K_Q`` are percentages.  Time is per-unit unless
``omega_b`` is changed from its tabulated value of 1.
"""
from dataclasses import dataclass

from .. import ad
from .base import COUPLE_D, COUPLE_Q, DC_PIN, DeviceModel, Equation, check_positive

VQ_REF = "vq_ref"


@dataclass(frozen=True)
class GfmParams:
    p_star: float = 0.8
    q_star: float = 0.25
    omega0: float = 1.0
    V0: float = 1.0
    K_P: float = 0.1  # percent
    K_Q: float = 0.01  # percent
    omega_pc: float = 332.8
    omega_qc: float = 732.8
    omega_b: float = 1.0
    K_VC_P: float = 1.0
    K_VC_I: float = 1.16
    K_VC_F: float = 1.0
    K_CC_P: float = 2.5
    K_CC_I: float = 1.19
    K_CC_F: float = 0.0
    C_f: float = 0.3
    L_f: float = 0.05

    def validate(self):
        check_positive(self, ("L_f", "C_f", "omega_b", "omega_pc", "omega_qc"))
        if not self.K_P >= 0:
            raise ValueError(f"K_P must be non-negative, got {self.K_P}")


_F = [("sm1", "pt"), ("sm2", "qt"), ("sm3", "th"), ("sm4", "betd"),
      ("sm5", "betq"), ("sm6", "gamd"), ("sm7", "gamq"), ("sm8", "vcD"),
      ("sm9", "vcQ"), ("sm10", "itd"), ("sm11", "itq")]
_G = [("am1", "w"), ("am1.5", "dw"), ("am2", "vcd_ref"), ("am3", "itd_ref"),
      ("am4", "itq_ref"), ("am5", "vtd"), ("am6", "vtq"), ("am7", "igd"),
      ("am8", "igq"), ("am9", "itD"), ("am10", "itQ"), ("am11", "vcd"),
      ("am12", "vcq"), ("am13", "p"), ("am14", "q"), ("am15", "idc")]


class GfmModel(DeviceModel):
    kind = "gfm"
    states = ("pt", "qt", "th", "betd", "betq", "gamd", "gamq", "vcD", "vcQ",
              "itd", "itq")
    algebraics = ("w", "dw", "vcd_ref", "vcq_ref", "itd_ref", "itq_ref", "igd",
                  "igq", "igD", "igQ", "itD", "itQ", "vcd", "vcq", "p", "q",
                  "vtd", "vtq", "udc", "idc")
    equations = tuple(
        [Equation(t, "f", v) for t, v in _F]
        + [Equation(t, "g", v) for t, v in _G]
        + [Equation(VQ_REF, "g", "vcq_ref", False),
           Equation(DC_PIN, "g", "udc", False),
           Equation(COUPLE_D, "g", "igD", False),
           Equation(COUPLE_Q, "g", "igQ", False)])
    params_type = GfmParams
    vc_global = (("x", "vcD"), ("x", "vcQ"))

    def _residuals(self, x, y, p):
        pt, qt, th, betd, betq, gamd, gamq, vcD, vcQ, itd, itq = x
        (w, dw, vcd_ref, vcq_ref, itd_ref, itq_ref, igd, igq, igD, igQ,
         itD, itQ, vcd, vcq, pe, qe, vtd, vtq, udc, idc) = y
        c, s = ad.cos(th), ad.sin(th)
        kp, kq = p.K_P / 100.0, p.K_Q / 100.0
        f = [
            -p.omega_pc * pt + pe * p.omega_pc,
            -p.omega_qc * qt + qe * p.omega_qc,
            p.omega_b * dw,
            vcd_ref - vcd,
            vcq_ref - vcq,
            itd_ref - itd,
            itq_ref - itq,
            # capacitor balance taken with the DQ-frame currents
            w * vcQ + (itD - igD) / p.C_f,
            -w * vcD + (itQ - igQ) / p.C_f,
            w * itq + (vtd - vcd) / p.L_f,
            -w * itd + (vtq - vcq) / p.L_f,
        ]
        g = [
            w - p.omega0 - dw,
            dw - kp * (p.p_star - pt),
            vcd_ref - p.V0 - kq * (p.q_star - qt),
            itd_ref - p.K_VC_F * igd - p.K_VC_P * (vcd_ref - vcd)
            - p.K_VC_I * betd + vcq * w * p.C_f,
            itq_ref - p.K_VC_F * igq - p.K_VC_P * (vcq_ref - vcq)
            - p.K_VC_I * betq - vcd * w * p.C_f,
            vtd - p.K_CC_F * vcd - p.K_CC_P * (itd_ref - itd)
            - p.K_CC_I * gamd + itq * w * p.L_f,
            vtq - p.K_CC_F * vcq - p.K_CC_P * (itq_ref - itq)
            - p.K_CC_I * gamq - itd * w * p.L_f,
            igd - igD * c - igQ * s,
            igq + igD * s - igQ * c,
            itd - itD * c - itQ * s,
            itq + itD * s - itQ * c,
            vcd - vcD * c - vcQ * s,
            vcq + vcD * s - vcQ * c,
            pe - vcd * igd - vcq * igq,
            qe - vcq * igd + vcd * igq,
            udc * idc - vtd * itd - vtq * itq,
            vcq_ref,
            udc - 1.0,
        ]
        return f, g

    def flat_start(self, p):
        ps, qs = p.p_star, p.q_star
        x = [ps, qs, 0.0, 0.0, 0.0, 0.0, 0.0, p.V0, 0.0, ps, 0.0]
        y = [p.omega0, 0.0, p.V0, 0.0, ps, 0.0, ps, 0.0, ps, 0.0, ps, 0.0,
             p.V0, 0.0, ps, qs, 1.0, 0.0, 1.0, ps]
        return x, y
