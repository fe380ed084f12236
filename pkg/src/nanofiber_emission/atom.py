"""Hyperfine sublevels of the 87Rb D2 line, dipole elements and frame rotation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy import constants as sc

from .specfun import HalfInteger, wigner_3j, wigner_6j

__all__ = [
    "Sublevel",
    "QuantizationFrame",
    "PhysicalConstants",
    "LevelStructure",
    "RB87_D2",
    "dipole_spherical_component",
    "rotation_matrix",
    "frame_rotate",
    "to_spherical",
    "from_spherical",
    "free_space_rate",
]

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, order=True)
class Sublevel:
    manifold: str  # "excited" or "ground"
    J: HalfInteger
    F: HalfInteger
    M: HalfInteger

    def __post_init__(self):
        if self.manifold not in ("excited", "ground"):
            raise ValueError("manifold must be 'excited' or 'ground'")
        for name in ("J", "F", "M"):
            object.__setattr__(self, name, HalfInteger.of(getattr(self, name)))
        if abs(self.M.twice_value) > self.F.twice_value:
            raise ValueError("|M| must not exceed F")

    @classmethod
    def excited(cls, F, M, J=1.5) -> "Sublevel":
        return cls("excited", J, F, M)

    @classmethod
    def ground(cls, F, M, J=0.5) -> "Sublevel":
        return cls("ground", J, F, M)

    @property
    def reflected(self) -> "Sublevel":
        """The sublevel with M -> -M."""
        return Sublevel(self.manifold, self.J, self.F, -self.M)

    @property
    def label(self) -> str:
        f, m = float(self.F), float(self.M)
        prime = "'" if self.manifold == "excited" else ""
        return f"F{prime}={f:g},M{prime}={m:+g}".replace("+0", "0")


@dataclass(frozen=True)
class QuantizationFrame:
    """Orientation of the quantization axis: polar angle from the fiber axis and azimuth."""

    theta_Q: float = 0.0
    phi_Q: float = 0.0

    def __post_init__(self):
        if not 0 <= self.theta_Q <= math.pi + 1e-12:
            raise ValueError("theta_Q must lie in [0, pi]")


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants; epsilon0 is derived from mu0 so that c^2 eps0 mu0 = 1 holds to rounding."""

    c: float = sc.c
    epsilon0: float = 1 / (sc.mu_0 * sc.c**2)
    mu0: float = sc.mu_0
    hbar: float = sc.hbar
    wavelength0: float = 780e-9
    reduced_dipole: float = 1.0

    @property
    def omega0(self) -> float:
        return 2 * math.pi * self.c / self.wavelength0

    @property
    def k0(self) -> float:
        return 2 * math.pi / self.wavelength0


@dataclass(frozen=True)
class LevelStructure:
    """Fine-structure pair J -> J' with nuclear spin I, resolved into |F M> sublevels."""

    J_ground: float = 0.5
    J_excited: float = 1.5
    nuclear_spin: float = 1.5

    def _manifold(self, kind: str, J: float) -> list[Sublevel]:
        I = self.nuclear_spin
        tF = range(abs(_t(J) - _t(I)), _t(J) + _t(I) + 1, 2)
        return [Sublevel(kind, J, HalfInteger(f), HalfInteger(m))
                for f in tF for m in range(-f, f + 1, 2)]

    @cached_property
    def excited(self) -> list[Sublevel]:
        return self._manifold("excited", self.J_excited)

    @cached_property
    def ground(self) -> list[Sublevel]:
        return self._manifold("ground", self.J_ground)

    @property
    def levels(self) -> list[Sublevel]:
        return self.excited + self.ground

    def excited_F(self, F) -> list[Sublevel]:
        tf = HalfInteger.of(F)
        return [e for e in self.excited if e.F == tf]

    @cached_property
    def dipole_table(self) -> np.ndarray:
        """d[e, g, k] for q = k - 1 in {-1, 0, +1}, unit reduced element."""
        table = np.zeros((len(self.excited), len(self.ground), 3))
        for i, e in enumerate(self.excited):
            for j, g in enumerate(self.ground):
                for k, q in enumerate((-1, 0, 1)):
                    table[i, j, k] = dipole_spherical_component(e, g, q, self.nuclear_spin)
        return table


def _t(x) -> int:
    return HalfInteger.of(x).twice_value


RB87_D2 = LevelStructure()


def dipole_spherical_component(e: Sublevel, g: Sublevel, q: int, nuclear_spin=1.5,
                               reduced: float = 1.0) -> float:
    """Spherical component d_q of <e|D|g> in the quantization frame."""
    if e.manifold != "excited" or g.manifold != "ground":
        raise ValueError("expected an excited and a ground sublevel")
    return reduced * _dipole(e, g, q, _t(nuclear_spin))


@lru_cache(maxsize=None)
def _dipole(e: Sublevel, g: Sublevel, q: int, tI: int) -> float:
    if e.M.twice_value - g.M.twice_value != 2 * q:
        return 0.0
    tJp, tFp, tMp = e.J.twice_value, e.F.twice_value, e.M.twice_value
    tJ, tF, tM = g.J.twice_value, g.F.twice_value, g.M.twice_value
    phase = -1 if ((tI + tJp - tMp) // 2) % 2 else 1
    six = wigner_6j(HalfInteger(tJp), HalfInteger(tFp), HalfInteger(tI),
                    HalfInteger(tF), HalfInteger(tJ), 1)
    three = wigner_3j(HalfInteger(tF), 1, HalfInteger(tFp),
                      HalfInteger(tM), q, HalfInteger(-tMp))
    return phase * math.sqrt((tF + 1) * (tFp + 1)) * six * three


def rotation_matrix(frame: QuantizationFrame) -> np.ndarray:
    """Real orthogonal R with (e_xQ, e_yQ, e_zQ) = R @ (e_x, e_y, e_z)."""
    ct, st = math.cos(frame.theta_Q), math.sin(frame.theta_Q)
    cp, sp = math.cos(frame.phi_Q), math.sin(frame.phi_Q)
    return np.array([
        [cp * ct, sp * ct, -st],
        [-sp, cp, 0.0],
        [cp * st, sp * st, ct],
    ])


# rows give (v_-1, v_0, v_+1) from (v_x, v_y, v_z)
SPHERICAL = np.array([
    [1 / SQRT2, -1j / SQRT2, 0],
    [0, 0, 1],
    [-1 / SQRT2, -1j / SQRT2, 0],
])


def to_spherical(cartesian) -> np.ndarray:
    return SPHERICAL @ np.asarray(cartesian)


def from_spherical(spherical) -> np.ndarray:
    return np.linalg.inv(SPHERICAL) @ np.asarray(spherical)


def frame_rotate(field, atom_phi: float, frame: QuantizationFrame) -> np.ndarray:
    """Spherical components (e_-1Q, e_0Q, e_+1Q) of a cylindrical field at azimuth ``atom_phi``."""
    cart = field.cartesian(atom_phi)
    rotated = np.tensordot(rotation_matrix(frame), cart, axes=1)
    return np.tensordot(SPHERICAL, rotated, axes=1)


def free_space_rate(constants: PhysicalConstants, J_excited: float = 1.5) -> float:
    """Vacuum decay rate of any excited sublevel, omega0^3 |<J'||D||J>|^2 / (3 pi eps0 hbar c^3 (2J'+1))."""
    k = constants
    return (k.omega0**3 * k.reduced_dipole**2
            / (3 * math.pi * k.epsilon0 * k.hbar * k.c**3 * (2 * J_excited + 1)))
