"""Step-index fiber dispersion: cutoffs, propagation constants and group delay.

Roots are located in the transverse variable ``u = h a`` on ``(0, V)``, with
``w = q a = sqrt(V**2 - u**2)``. Every family-specific eigenvalue equation is
multiplied through by ``J_l(u)`` (``J_0(u)`` for TE/TM) so the scanned
function has no poles and each sign change is a genuine root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np
from scipy import optimize, special
from scipy.constants import c as C_LIGHT

__all__ = [
    "Family",
    "FiberGeometry",
    "ModeId",
    "GuidedModeSolution",
    "CutoffError",
    "RootNotFoundError",
    "size_parameter",
    "cutoff_V",
    "cutoff_radius",
    "supported_modes",
    "solve_beta",
    "beta_prime",
    "eigen_residual",
    "general_residual",
]

SILICA_INDEX_780 = 1.4537


class Family(str, Enum):
    HE = "HE"
    EH = "EH"
    TE = "TE"
    TM = "TM"

    @property
    def hybrid(self) -> bool:
        return self in (Family.HE, Family.EH)


class CutoffError(ValueError):
    """The requested mode is not guided at this frequency."""


class RootNotFoundError(RuntimeError):
    """Bracketing failed for a mode that should exist."""


@dataclass(frozen=True)
class FiberGeometry:
    """Dielectric cylinder of radius ``radius_a`` (m) and index ``n1`` in a medium ``n2``.

    ``n1 == n2`` is accepted as the homogeneous (no-fiber) limit.
    """

    radius_a: float
    n1: float = SILICA_INDEX_780
    n2: float = 1.0

    def __post_init__(self):
        if not self.radius_a > 0:
            raise ValueError("fiber radius must be positive")
        if self.n2 < 1 or self.n1 < self.n2:
            raise ValueError("refractive indices must satisfy n1 >= n2 >= 1")

    @property
    def degenerate(self) -> bool:
        return self.n1 == self.n2

    @property
    def numerical_aperture(self) -> float:
        return math.sqrt(self.n1**2 - self.n2**2)


@dataclass(frozen=True)
class ModeId:
    family: Family
    l: int
    m: int
    f: int = 1
    p: int = 1

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.m < 1:
            raise ValueError("radial order m starts at 1")
        if self.f not in (1, -1):
            raise ValueError("direction f must be +1 or -1")
        if self.family.hybrid:
            if self.l < 1 or self.p not in (1, -1):
                raise ValueError("hybrid modes need l >= 1 and p = +1 or -1")
        elif self.l != 0 or self.p != 0:
            raise ValueError("TE/TM modes have l = 0 and p = 0")

    @classmethod
    def parse(cls, label: str, f: int = 1, p: int | None = None) -> "ModeId":
        """Build from a label such as ``"HE11"`` or ``"TM01"``."""
        family = Family(label[:2].upper())
        l, m = int(label[2]), int(label[3:])
        if p is None:
            p = 1 if family.hybrid else 0
        return cls(family, l, m, f, p)

    @property
    def name(self) -> str:
        return f"{self.family.value}{self.l}{self.m}"

    def with_(self, **changes) -> "ModeId":
        return replace(self, **changes)

    def variants(self) -> Iterator["ModeId"]:
        """All (f, p) members of this mode family, f major."""
        ps = (1, -1) if self.family.hybrid else (0,)
        for f in (1, -1):
            for p in ps:
                yield replace(self, f=f, p=p)


@dataclass(frozen=True)
class GuidedModeSolution:
    """Propagation constant and profile parameters of one guided mode.

    ``amplitude_A`` is 1 straight out of :func:`solve_beta`; see
    :func:`nanofiber_emission.guided_modes.normalize`.
    """

    geom: FiberGeometry
    mode: ModeId
    omega: float
    beta: float
    h: float
    q: float
    s_param: float
    amplitude_A: float
    beta_prime: float

    @property
    def k(self) -> float:
        return self.omega / C_LIGHT

    @property
    def u(self) -> float:
        return self.h * self.geom.radius_a

    @property
    def w(self) -> float:
        return self.q * self.geom.radius_a

    @property
    def effective_index(self) -> float:
        return self.beta / self.k

    def for_mode(self, mode: ModeId) -> "GuidedModeSolution":
        """Same solution relabelled with another (f, p) of the same family."""
        if (mode.family, mode.l, mode.m) != (self.mode.family, self.mode.l, self.mode.m):
            raise ValueError("can only relabel direction and circulation")
        return replace(self, mode=mode)


def size_parameter(geom: FiberGeometry, omega: float) -> float:
    """Fiber size parameter V = k a sqrt(n1^2 - n2^2)."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    return omega / C_LIGHT * geom.radius_a * geom.numerical_aperture


# -- cutoffs -----------------------------------------------------------------


def _roots_of(fn: Callable[[float], float], count: int, start: float = 1e-6) -> list[float]:
    """First ``count`` sign-change roots of ``fn`` on (start, inf)."""
    roots: list[float] = []
    step = 0.01
    x0, f0 = start, fn(start)
    while len(roots) < count:
        x1 = x0 + step
        f1 = fn(x1)
        if f0 == 0.0:
            roots.append(x0)
        elif f0 * f1 < 0:
            roots.append(optimize.brentq(fn, x0, x1, xtol=1e-13, rtol=1e-15))
        x0, f0 = x1, f1
    return roots


@lru_cache(maxsize=None)
def _cutoff_table(family: Family, l: int, n1: float, n2: float, count: int) -> tuple[float, ...]:
    if family in (Family.TE, Family.TM):
        return tuple(special.jn_zeros(0, count))
    if family is Family.EH:
        return tuple(special.jn_zeros(l, count))
    if l == 1:
        return (0.0,) + tuple(special.jn_zeros(1, count - 1))
    ratio = n1**2 / n2**2 + 1

    def fn(v):
        return ratio * (l - 1) * special.jv(l - 1, v) - v * special.jv(l, v)

    return tuple(_roots_of(fn, count, start=1e-3))


def cutoff_V(geom: FiberGeometry, family: Family | str, l: int, m: int) -> float:
    """Cutoff size parameter of the m-th mode of a family."""
    family = Family(family)
    ModeId(family, l, m, 1, 1 if family.hybrid else 0)  # validates the combination
    return _cutoff_table(family, l, geom.n1, geom.n2, max(m, 4))[m - 1]


def cutoff_radius(family: Family | str, l: int, m: int, wavelength: float,
                  n1: float = SILICA_INDEX_780, n2: float = 1.0) -> float:
    """Fiber radius (m) at which the mode reaches cutoff."""
    geom = FiberGeometry(1.0, n1, n2)
    return cutoff_V(geom, family, l, m) * wavelength / (2 * math.pi * geom.numerical_aperture)


def supported_modes(geom: FiberGeometry, omega: float, l_max: int = 5, m_max: int = 3) -> list[ModeId]:
    """Guided (family, l, m) at ``omega``, ordered by increasing cutoff."""
    V = size_parameter(geom, omega)
    found = []
    for family in Family:
        ls = range(1, l_max + 1) if family.hybrid else (0,)
        for l in ls:
            for m in range(1, m_max + 1):
                if cutoff_V(geom, family, l, m) < V:
                    found.append(ModeId(family, l, m, 1, 1 if family.hybrid else 0))
    found.sort(key=lambda mode: cutoff_V(geom, mode.family, mode.l, mode.m))
    return found


# -- eigenvalue equations ----------------------------------------------------


def _k_ratio(l: int, w):
    """K_l'(w) / (w K_l(w)), computed from exponentially scaled K."""
    kl = special.kve(l, w)
    return -(special.kve(l - 1, w) + special.kve(l + 1, w)) / (2 * w * kl)


def eigen_residual(family: Family, l: int, u, V: float, n1: float, n2: float, nk_ratio=None):
    """Pole-free residual of the family eigenvalue equation at ``u = h a``.

    HE/EH use the split form of the hybrid equation multiplied by ``J_l(u)``;
    TE/TM use their l = 0 equations multiplied by ``J_0(u)``. ``nk_ratio`` is
    ``beta / (n1 k)``; it is derived from u and V when omitted.
    """
    u = np.asarray(u, dtype=float)
    w = np.sqrt(np.maximum(V**2 - u**2, 0.0))
    if family in (Family.TE, Family.TM):
        kr = special.kve(1, w) / (w * special.kve(0, w))
        weight = 1.0 if family is Family.TE else n2**2 / n1**2
        return special.jv(1, u) / u + weight * special.jv(0, u) * kr
    if nk_ratio is None:
        # beta^2 = n1^2 k^2 - h^2 and V^2 = k^2 a^2 (n1^2 - n2^2)
        nk_ratio = np.sqrt(1 - (u / V) ** 2 * (1 - n2**2 / n1**2))
    kp = _k_ratio(l, w)
    inv = 1 / u**2 + 1 / w**2
    big_r = np.sqrt(((n1**2 - n2**2) / (2 * n1**2)) ** 2 * kp**2 + (l * nk_ratio) ** 2 * inv**2)
    sign = -1.0 if family is Family.HE else 1.0
    rest = (n1**2 + n2**2) / (2 * n1**2) * kp - l / u**2 - sign * big_r
    return special.jv(l - 1, u) / u + special.jv(l, u) * rest


def general_residual(sol: GuidedModeSolution) -> float:
    """Scaled residual of the unsplit hybrid/TE/TM eigenvalue equation."""
    n1, n2 = sol.geom.n1, sol.geom.n2
    l, u, w = sol.mode.l, sol.u, sol.w
    jr = (special.jv(l - 1, u) - special.jv(l + 1, u)) / (2 * u * special.jv(l, u))
    kr = _k_ratio(l, w)
    lhs = (jr + kr) * (n1**2 * jr + n2**2 * kr)
    rhs = l**2 * (1 / u**2 + 1 / w**2) ** 2 * (sol.beta / sol.k) ** 2
    scale = (abs(jr) + abs(kr)) * (n1**2 * abs(jr) + n2**2 * abs(kr)) + abs(rhs)
    return abs(lhs - rhs) / scale


def _scan_grid(V: float, npts: int = 4096) -> np.ndarray:
    uniform = np.linspace(0, V, npts + 1)[1:-1]
    # cluster towards both ends, where roots hug the light lines
    tail = V * (1 - np.logspace(-14, -2, 200))
    head = V * np.logspace(-8, -2, 60)
    return np.unique(np.concatenate([head, uniform, tail]))


def _roots_u(family: Family, l: int, V: float, n1: float, n2: float) -> list[float]:
    grid = _scan_grid(V)
    if family is Family.EH:
        # EH roots lie above the first zero of J_l; below it the split form
        # only has rounding-level sign changes near u = 0
        grid = grid[grid > special.jn_zeros(l, 1)[0]]
    with np.errstate(all="ignore"):
        vals = eigen_residual(family, l, grid, V, n1, n2)
    roots = []
    for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
        lo, hi = grid[i], grid[i + 1]
        if not (np.isfinite(vals[i]) and np.isfinite(vals[i + 1])):
            continue
        roots.append(optimize.brentq(lambda x: float(eigen_residual(family, l, x, V, n1, n2)),
                                     lo, hi, xtol=1e-15 * V, rtol=1e-15, maxiter=500))
    return roots


@lru_cache(maxsize=4096)
def _solve_u(family: Family, l: int, m: int, V: float, n1: float, n2: float) -> float:
    roots = _roots_u(family, l, V, n1, n2)
    if len(roots) < m:
        raise RootNotFoundError(f"{family.value}{l}{m}: only {len(roots)} roots found at V = {V:.6g}")
    return roots[m - 1]


def _beta_of(geom: FiberGeometry, omega: float, mode: ModeId) -> tuple[float, float]:
    """(beta, u) for the mode at ``omega``."""
    V = size_parameter(geom, omega)
    if geom.degenerate or cutoff_V(geom, mode.family, mode.l, mode.m) >= V:
        raise CutoffError(f"{mode.name} is not guided at V = {V:.6g}")
    u = _solve_u(mode.family, mode.l, mode.m, V, geom.n1, geom.n2)
    k = omega / C_LIGHT
    beta = math.sqrt(geom.n1**2 * k**2 - (u / geom.radius_a) ** 2)
    return beta, u


def beta_prime(geom: FiberGeometry, omega: float, mode: ModeId, rel_step: float = 1e-6,
               n1_of_omega: Callable[[float], float] | None = None) -> float:
    """Group delay d(beta)/d(omega) in s/m.

    Central differences at steps ``d`` and ``d/2`` combined by Richardson
    extrapolation. Indices are held fixed unless ``n1_of_omega`` supplies a
    material dispersion law for the core.
    """

    def beta_at(om: float) -> float:
        g = geom if n1_of_omega is None else replace(geom, n1=n1_of_omega(om))
        return _beta_of(g, om, mode)[0]

    d = rel_step * omega
    try:
        beta_at(omega - d)
    except CutoffError:
        # within one step of cutoff: second-order forward differences stay guided
        b0, b1, b2 = beta_at(omega), beta_at(omega + d), beta_at(omega + 2 * d)
        return (-3 * b0 + 4 * b1 - b2) / (2 * d)
    coarse = (beta_at(omega + d) - beta_at(omega - d)) / (2 * d)
    fine = (beta_at(omega + d / 2) - beta_at(omega - d / 2)) / d
    return (4 * fine - coarse) / 3


def solve_beta(geom: FiberGeometry, omega: float, mode: ModeId) -> GuidedModeSolution:
    """Solve for the m-th propagation constant of ``mode`` and its profile parameters."""
    beta, u = _beta_of(geom, omega, mode)
    a = geom.radius_a
    k = omega / C_LIGHT
    h = u / a
    q = math.sqrt(beta**2 - geom.n2**2 * k**2)
    s = 0.0
    if mode.family.hybrid:
        l, w = mode.l, q * a
        jr = (special.jv(l - 1, u) - special.jv(l + 1, u)) / (2 * u * special.jv(l, u))
        s = l * (1 / u**2 + 1 / w**2) / (jr + _k_ratio(l, w))
    return GuidedModeSolution(
        geom=geom, mode=mode, omega=omega, beta=beta, h=h, q=q, s_param=float(s),
        amplitude_A=1.0, beta_prime=beta_prime(geom, omega, mode),
    )
