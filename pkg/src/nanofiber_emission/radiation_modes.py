"""Radiation (continuum) modes of a step-index fiber.

A mode is labelled by (omega, beta, l, p) with |beta| < k n2. Inside the
core the field is built from J_l(hr), outside from both Hankel functions;
the matching coefficients C_j, D_j follow from A and B = +/- i eta A. Stored
profiles are divided by sqrt(N) so the mode set is delta-normalized in
frequency with unit weight.

All routines broadcast over arrays of beta and l; the amplitude A is fixed to
1/|H_l^(1)(qa)|, which keeps every coefficient of order J_l(ha) and avoids
overflow of Y_l at small qa. Modes whose Bessel functions overflow carry
negligible weight and are returned as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.constants import c as C_LIGHT, epsilon_0, mu_0

from .fiber import FiberGeometry
from .guided_modes import CylindricalField

__all__ = [
    "RadiationModeId",
    "RadiationModeField",
    "build_radiation_mode",
    "radiation_profile",
    "radiation_fields",
    "far_field_overlap",
]


@dataclass(frozen=True)
class RadiationModeId:
    omega: float
    beta: float
    l: int
    p: int

    def __post_init__(self):
        if self.p not in (1, -1):
            raise ValueError("radiation polarization p must be +1 or -1")


@dataclass(frozen=True)
class RadiationModeField:
    """Matching coefficients of one radiation mode (before division by sqrt(N))."""

    id: RadiationModeId
    geom: FiberGeometry
    h: float
    q: float
    A: float
    B: complex
    C: tuple[complex, complex]
    D: tuple[complex, complex]
    V: tuple[complex, complex]
    M: tuple[complex, complex]
    L: tuple[complex, complex]
    eta: float
    norm_N: float
    free_space: bool = False

    def norm_from(self, j: int) -> float:
        """The normalization constant evaluated with the j-th coefficient pair."""
        n2 = self.geom.n2
        return (8 * math.pi * self.id.omega / self.q**2
                * (n2**2 * abs(self.C[j - 1]) ** 2 + mu_0 / epsilon_0 * abs(self.D[j - 1]) ** 2))


def _dj(fn, l, x):
    return (fn(l - 1, x) - fn(l + 1, x)) / 2


def _coefficients(geom: FiberGeometry, omega, beta, l, p, general: bool = False):
    """Coefficient arrays for broadcast (beta, l, p).

    At real argument conj(H^(1)) = J - iY and conj(H^(2)) = J + iY, so every
    V_j, M_j, L_j splits as X_J -/+ i X_Y with real X_J, X_Y. The exterior
    field only needs the real combinations

        Lam = L - mu0 c p eta V,    Xi = eps0 c V - p eta M,

    which give sum_j C_j H_j = 2P (Lam_J Y - Lam_Y J) exactly. Forming C_1 and
    C_2 separately and adding them would cancel catastrophically once
    |Y_l(qa)| >> |J_l(qa)|.
    """
    n1, n2, a = geom.n1, geom.n2, geom.radius_a
    k = omega / C_LIGHT
    beta, l, p = np.broadcast_arrays(np.asarray(beta, float), np.asarray(l), np.asarray(p))
    h = np.sqrt(k**2 * n1**2 - beta**2)
    q = np.sqrt(k**2 * n2**2 - beta**2)
    ha, qa = h * a, q * a

    with np.errstate(all="ignore"):
        if geom.degenerate and not general:
            # index-matched limit: free cylindrical waves, J_l everywhere
            A = np.ones_like(beta)
            eta = epsilon_0 * C_LIGHT * n2 * np.ones_like(beta)
            N = 4 * math.pi * omega * n2**2 * A**2 / q**2
            return dict(h=h, q=q, A=A, B=1j * p * eta * A, eta=eta, N=N, free_space=True)

        jq, yq = special.jv(l, qa), special.yv(l, qa)
        A = 1 / np.hypot(jq, yq)
        jq, yq = jq * A, yq * A
        djq, dyq = _dj(special.jv, l, qa) * A, _dj(special.yv, l, qa) * A
        jl, djl = special.jv(l, ha), _dj(special.jv, l, ha)
        out = {}
        pre_v = l * k * beta / (a * h**2 * q**2) * (n2**2 - n1**2) * jl
        for part, z, dz in (("J", jq, djq), ("Y", yq, dyq)):
            out["V" + part] = pre_v * z
            out["M" + part] = djl * z / h - jl * dz / q
            out["L" + part] = n1**2 * djl * z / h - n2**2 * jl * dz / q
        v2 = out["VJ"] ** 2 + out["VY"] ** 2
        m2 = out["MJ"] ** 2 + out["MY"] ** 2
        l2 = out["LJ"] ** 2 + out["LY"] ** 2
        eta = epsilon_0 * C_LIGHT * np.sqrt((n2**2 * v2 + l2) / (v2 + n2**2 * m2))
        for part in "JY":
            out["Lam" + part] = out["L" + part] - mu_0 * C_LIGHT * p * eta * out["V" + part]
            out["Xi" + part] = epsilon_0 * C_LIGHT * out["V" + part] - p * eta * out["M" + part]
        P_c = math.pi * q**2 * a / (4 * n2**2)
        P_d = math.pi * q**2 * a / 4
        N = 8 * math.pi * omega / q**2 * (
            n2**2 * P_c**2 * (out["LamJ"] ** 2 + out["LamY"] ** 2)
            + mu_0 / epsilon_0 * P_d**2 * (out["XiJ"] ** 2 + out["XiY"] ** 2))
    out.update(h=h, q=q, A=A, B=1j * p * eta * A, eta=eta, N=N, P_c=P_c, P_d=P_d,
               free_space=False)
    return out


def _matching_pairs(co):
    """Complex (C_1, C_2, D_1, D_2) rebuilt from the real combinations."""
    P_c, P_d = co["P_c"], co["P_d"]
    lj, ly, xj, xy = co["LamJ"], co["LamY"], co["XiJ"], co["XiY"]
    C1 = -1j * P_c * lj - P_c * ly
    C2 = 1j * P_c * lj - P_c * ly
    D1 = -P_d * (xj - 1j * xy)
    D2 = P_d * (xj + 1j * xy)
    return C1, C2, D1, D2


def _fields(geom: FiberGeometry, omega, beta, l, p, r, co):
    """Unnormalized profile arrays (e_r, e_phi, e_z)."""
    a = geom.radius_a
    beta, l, p = np.broadcast_arrays(np.asarray(beta, float), np.asarray(l), np.asarray(p))
    h, q = co["h"], co["q"]
    wm = omega * mu_0
    rr = max(float(r), 1e-12 * a)
    with np.errstate(all="ignore"):
        if co["free_space"] or r < a:
            amp, bcoef = co["A"], co["B"]
            x = h * rr
            jl, djl = special.jv(l, x), _dj(special.jv, l, x)
            er = 1j / h**2 * (beta * h * amp * djl + 1j * l * wm / rr * bcoef * jl)
            ephi = 1j / h**2 * (1j * l * beta / rr * amp * jl - h * wm * bcoef * djl)
            ez = amp * jl
            return er, ephi, ez
        x = q * rr
        jr, yr = special.jv(l, x), special.yv(l, x)
        djr, dyr = _dj(special.jv, l, x), _dj(special.yv, l, x)
        P_c, P_d = co["P_c"], co["P_d"]
        lj, ly, xj, xy = co["LamJ"], co["LamY"], co["XiJ"], co["XiY"]
        # sum_j C_j Z_j = 2 P_c (Lam_J Y - Lam_Y J), sum_j D_j Z_j = 2i P_d (Xi_Y J - Xi_J Y)
        c_z, c_dz = 2 * P_c * (lj * yr - ly * jr), 2 * P_c * (lj * dyr - ly * djr)
        d_z, d_dz = 2 * P_d * (xy * jr - xj * yr), 2 * P_d * (xy * djr - xj * dyr)
        er = 1j / q**2 * (beta * q * c_dz - l * wm / rr * d_z)
        ephi = -1 / q**2 * (l * beta / rr * c_z - q * wm * d_dz) + 0j
        ez = c_z + 0j
        return er, ephi, ez


def radiation_fields(geom: FiberGeometry, omega, beta, l, p, r, general: bool = False):
    """Delta-normalized profile components at radius ``r``, broadcast over (beta, l, p).

    Returns ``(e_r, e_phi, e_z)`` complex arrays; non-finite entries (Hankel
    overflow at tiny qa and large |l|) are set to zero.
    """
    co = _coefficients(geom, omega, beta, l, p, general=general)
    er, ephi, ez = _fields(geom, omega, beta, l, p, r, co)
    with np.errstate(all="ignore"):
        norm = 1 / np.sqrt(co["N"])
        comps = [np.asarray(c * norm) for c in (er, ephi, ez)]
    bad = ~np.isfinite(comps[0]) | ~np.isfinite(comps[1]) | ~np.isfinite(comps[2])
    if np.any(bad):
        for c in comps:
            c[bad] = 0.0
    return tuple(comps)


def build_radiation_mode(geom: FiberGeometry, id: RadiationModeId, general: bool = False) -> RadiationModeField:
    """Matching coefficients, eta and N for one radiation mode.

    ``general=True`` applies the matching formulas even for n1 == n2 (where the
    default is the closed-form free-space wave).
    """
    k = id.omega / C_LIGHT
    if not abs(id.beta) < k * geom.n2:
        raise ValueError("radiation modes need |beta| < k n2")
    co = _coefficients(geom, id.omega, id.beta, id.l, id.p, general=general)
    if co["free_space"]:
        half = complex(co["A"]) / 2
        C, D = (half, half), (0j, 0j)
        V = M = L = (0j, 0j)
    else:
        C1, C2, D1, D2 = (complex(x) for x in _matching_pairs(co))
        C, D = (C1, C2), (D1, D2)
        A = float(co["A"])

        def pair(name):
            # textbook values carry conj(H_j) unscaled; strip the amplitude folded in above
            xj, xy = float(co[name + "J"]) / A, float(co[name + "Y"]) / A
            return (complex(xj, -xy), complex(xj, xy))

        V, M, L = pair("V"), pair("M"), pair("L")
    return RadiationModeField(
        id=id, geom=geom, h=float(co["h"]), q=float(co["q"]),
        A=float(co["A"]), B=complex(co["B"]), C=C, D=D, V=V, M=M, L=L,
        eta=float(co["eta"]), norm_N=float(co["N"]),
        free_space=bool(co["free_space"]),
    )


def radiation_profile(mode: RadiationModeField, r: float) -> CylindricalField:
    """Delta-normalized profile of ``mode`` at radius ``r``."""
    i = mode.id
    er, ephi, ez = radiation_fields(mode.geom, i.omega, i.beta, i.l, i.p, r,
                                    general=not mode.free_space and mode.geom.degenerate)
    return CylindricalField(complex(er), complex(ephi), complex(ez))


def far_field_overlap(m1: RadiationModeField, m2: RadiationModeField) -> complex:
    """Coefficient of delta(omega - omega') in the overlap of two modes sharing (omega, beta, l).

    Only the outgoing and incoming Hankel waves reach infinity, so the
    coefficient is fixed by C_j, D_j; for m1 == m2 it reduces to 2 N.
    """
    if (m1.id.omega, m1.id.beta, m1.id.l) != (m2.id.omega, m2.id.beta, m2.id.l):
        raise ValueError("overlap is only defined between modes of equal (omega, beta, l)")
    n2, q, om = m1.geom.n2, m1.q, m1.id.omega
    total = 0j
    for j in (0, 1):
        total += (n2**2 * m1.C[j] * np.conj(m2.C[j])
                  + mu_0 / epsilon_0 * m1.D[j] * np.conj(m2.D[j]))
    return 8 * math.pi * om / q**2 * total / math.sqrt(m1.norm_N * m2.norm_N)
