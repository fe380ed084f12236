"""Electric profile functions of guided modes and their normalization.

Profiles follow the standard step-index expressions with a real amplitude A:
interior fields use J_l(hr), exterior fields K_l(qr); at r = a the exterior
branch is returned. A solution is normalized so that
``2 pi * integral n_ref(r)^2 |e|^2 r dr = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, special
from scipy.constants import mu_0

from .fiber import Family, FiberGeometry, GuidedModeSolution, ModeId, solve_beta

__all__ = [
    "CylindricalField",
    "AtomPosition",
    "QuadratureError",
    "base_profile",
    "normalization_integral",
    "normalize",
    "guided_mode",
    "full_mode_function",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested accuracy."""


@dataclass(frozen=True)
class CylindricalField:
    """Cylindrical components (e_r, e_phi, e_z); scalars or equal-shape arrays."""

    e_r: complex
    e_phi: complex
    e_z: complex

    def intensity(self):
        return abs(self.e_r) ** 2 + abs(self.e_phi) ** 2 + abs(self.e_z) ** 2

    def cartesian(self, phi) -> np.ndarray:
        """Components (e_x, e_y, e_z) at azimuth ``phi``, stacked on axis 0."""
        cp, sp = np.cos(phi), np.sin(phi)
        return np.stack(np.broadcast_arrays(
            self.e_r * cp - self.e_phi * sp,
            self.e_r * sp + self.e_phi * cp,
            self.e_z,
        )).astype(complex)

    def spherical(self, phi) -> np.ndarray:
        """Fiber-frame spherical components (e_-1, e_0, e_+1) at azimuth ``phi``."""
        ex, ey, ez = self.cartesian(phi)
        return np.stack([(ex - 1j * ey) / math.sqrt(2), ez, -(ex + 1j * ey) / math.sqrt(2)])

    def scaled(self, factor) -> "CylindricalField":
        return CylindricalField(self.e_r * factor, self.e_phi * factor, self.e_z * factor)

    def conj(self) -> "CylindricalField":
        return CylindricalField(np.conj(self.e_r), np.conj(self.e_phi), np.conj(self.e_z))

    def as_array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(self.e_r, self.e_phi, self.e_z)).astype(complex)


@dataclass(frozen=True)
class AtomPosition:
    r: float
    phi: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("radial distance must be non-negative")
        object.__setattr__(self, "phi", float(self.phi) % (2 * math.pi))


def _hybrid(sol: GuidedModeSolution, r):
    a, A, l = sol.geom.radius_a, sol.amplitude_A, sol.mode.l
    h, q, s, beta = sol.h, sol.q, sol.s_param, sol.beta
    r = np.asarray(r, dtype=float)
    inside = r < a
    er = np.empty(r.shape, complex)
    ephi = np.empty(r.shape, float)
    ez = np.empty(r.shape, float)

    hr = h * r[inside]
    jm, jl, jp = special.jv(l - 1, hr), special.jv(l, hr), special.jv(l + 1, hr)
    er[inside] = 1j * A * beta / (2 * h) * ((1 - s) * jm - (1 + s) * jp)
    ephi[inside] = -A * beta / (2 * h) * ((1 - s) * jm + (1 + s) * jp)
    ez[inside] = A * jl

    out = ~inside
    w = q * a
    qr = q * r[out]
    # exponentially scaled K keeps the J_l(ha)/K_l(qa) ratio finite far out
    damp = np.exp(-(qr - w))
    ratio = special.jv(l, h * a) / special.kve(l, w) * damp
    km, kl, kp = special.kve(l - 1, qr), special.kve(l, qr), special.kve(l + 1, qr)
    er[out] = 1j * A * beta / (2 * q) * ratio * ((1 - s) * km + (1 + s) * kp)
    ephi[out] = -A * beta / (2 * q) * ratio * ((1 - s) * km - (1 + s) * kp)
    ez[out] = A * ratio * kl
    return er, ephi, ez


def _te(sol: GuidedModeSolution, r):
    a, A, h, q = sol.geom.radius_a, sol.amplitude_A, sol.h, sol.q
    wm = sol.omega * mu_0
    r = np.asarray(r, dtype=float)
    inside = r < a
    ephi = np.empty(r.shape, complex)
    ephi[inside] = 1j * wm / h * A * special.jv(1, h * r[inside])
    qr = q * r[~inside]
    ratio = special.jv(0, h * a) / special.kve(0, q * a) * np.exp(-(qr - q * a))
    ephi[~inside] = -1j * wm / q * ratio * A * special.kve(1, qr)
    zero = np.zeros(r.shape)
    return zero.astype(complex), ephi, zero


def _tm(sol: GuidedModeSolution, r):
    a, A, h, q, beta = sol.geom.radius_a, sol.amplitude_A, sol.h, sol.q, sol.beta
    r = np.asarray(r, dtype=float)
    inside = r < a
    er = np.empty(r.shape, complex)
    ez = np.empty(r.shape, float)
    hr = h * r[inside]
    er[inside] = -1j * beta / h * A * special.jv(1, hr)
    ez[inside] = A * special.jv(0, hr)
    qr = q * r[~inside]
    ratio = special.jv(0, h * a) / special.kve(0, q * a) * np.exp(-(qr - q * a))
    er[~inside] = 1j * beta / q * ratio * A * special.kve(1, qr)
    ez[~inside] = ratio * A * special.kve(0, qr)
    return er, np.zeros(r.shape), ez


_PROFILES = {Family.HE: _hybrid, Family.EH: _hybrid, Family.TE: _te, Family.TM: _tm}


def base_profile(sol: GuidedModeSolution, r) -> CylindricalField:
    """Unsigned profile components (f = p = +1) at radius ``r`` (scalar or array)."""
    scalar = np.ndim(r) == 0
    er, ephi, ez = _PROFILES[sol.mode.family](sol, np.atleast_1d(r))
    if scalar:
        return CylindricalField(complex(er[0]), complex(ephi[0]), complex(ez[0]))
    return CylindricalField(er, ephi.astype(complex), ez.astype(complex))


def normalization_integral(sol: GuidedModeSolution, rtol: float = 1e-13) -> float:
    """``2 pi * integral n_ref^2 |e|^2 r dr`` over the whole transverse plane."""
    geom = sol.geom
    a, q = geom.radius_a, sol.q

    def density(r, n):
        return n**2 * float(base_profile(sol, r).intensity()) * r

    total = 0.0
    pieces = [(0.0, a, geom.n1)]
    edges = [a, a + 1 / q, a + 5 / q, a + 15 / q, a + 40 / q]
    pieces += [(lo, hi, geom.n2) for lo, hi in zip(edges[:-1], edges[1:])]
    for lo, hi, n in pieces:
        val, err = integrate.quad(density, lo, hi, args=(n,), epsabs=0.0, epsrel=rtol, limit=400)
        if not np.isfinite(val) or err > max(1e3 * rtol * abs(val), 1e-300):
            raise QuadratureError(f"normalization quadrature failed on [{lo:g}, {hi:g}]: err={err:g}")
        total += val
    # beyond 40/q the density decays like exp(-2 q r)
    total += density(edges[-1], geom.n2) / (2 * q)
    return 2 * math.pi * total


def normalize(sol: GuidedModeSolution) -> GuidedModeSolution:
    """Return the solution with the real, positive amplitude satisfying unit norm."""
    raw = normalization_integral(sol)
    return replace(sol, amplitude_A=sol.amplitude_A / math.sqrt(raw))


def guided_mode(geom: FiberGeometry, omega: float, mode: ModeId) -> GuidedModeSolution:
    """Solved and normalized guided mode (cached per family/l/m)."""
    base = _guided_cached(geom, omega, mode.family, mode.l, mode.m)
    return base.for_mode(mode)


_cache: dict = {}


def _guided_cached(geom, omega, family, l, m) -> GuidedModeSolution:
    key = (geom, omega, family, l, m)
    sol = _cache.get(key)
    if sol is None:
        p = 1 if Family(family).hybrid else 0
        sol = normalize(solve_beta(geom, omega, ModeId(family, l, m, 1, p)))
        # dict assignment is atomic; a racing duplicate solve is harmless
        _cache[key] = sol
    return sol


def full_mode_function(sol: GuidedModeSolution, pos: AtomPosition) -> tuple[CylindricalField, complex]:
    """Signed profile at ``pos`` and the propagation phase exp(i(f beta z + p l phi)).

    Hybrid modes give (e_r, p e_phi, f e_z); TE modes (0, e_phi, 0);
    TM modes (e_r, 0, f e_z).
    """
    mode = sol.mode
    base = base_profile(sol, pos.r)
    field = CylindricalField(
        base.e_r,
        base.e_phi * (mode.p if mode.family.hybrid else 1),
        base.e_z * mode.f,
    )
    phase = np.exp(1j * (mode.f * sol.beta * pos.z + mode.p * mode.l * pos.phi))
    return field, complex(phase)
