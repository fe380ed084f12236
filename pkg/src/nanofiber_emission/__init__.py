"""Spontaneous emission of a multilevel 87Rb atom into the modes of an ultrathin fiber."""

from .atom import RB87_D2, PhysicalConstants, QuantizationFrame, Sublevel
from .fiber import FiberGeometry, ModeId, solve_beta, supported_modes
from .guided_modes import AtomPosition
from .rates import AtomConfiguration, RadiationQuadrature, directional_report, rate_report

__version__ = "0.1.0"

__all__ = [
    "RB87_D2",
    "PhysicalConstants",
    "QuantizationFrame",
    "Sublevel",
    "FiberGeometry",
    "ModeId",
    "solve_beta",
    "supported_modes",
    "AtomPosition",
    "AtomConfiguration",
    "RadiationQuadrature",
    "rate_report",
    "directional_report",
]
