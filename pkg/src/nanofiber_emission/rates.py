"""Spontaneous-emission rates of a multilevel atom near the fiber.

The engine works with field-correlation tensors: for a set of modes with
weights w, ``W = sum w e e^H`` in the local cylindrical basis (r, phi, z) at
the atom. A decay coefficient is then a bilinear form in the dipole vectors,

    gamma_{ee'gg'} = d_eg^T W_Q conj(d_e'g'),

with ``W_Q = T W T^T`` rotated into the quantization frame. Guided tensors
carry w = omega beta' / (2 eps0 hbar) per mode, the radiation tensor
w = omega / (2 eps0 hbar) times the beta quadrature weight. Tensors depend
only on (geometry, r), so frame and azimuth sweeps reuse them.

All rates in reports are divided by the free-space rate gamma_0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .atom import (
    RB87_D2,
    SPHERICAL,
    LevelStructure,
    PhysicalConstants,
    QuantizationFrame,
    Sublevel,
    dipole_spherical_component,
    free_space_rate,
    from_spherical,
    frame_rotate,
    rotation_matrix,
)
from .fiber import FiberGeometry, GuidedModeSolution, ModeId, size_parameter, supported_modes
from .guided_modes import AtomPosition, CylindricalField, full_mode_function, guided_mode
from .radiation_modes import RadiationModeId, radiation_fields
from .specfun import clebsch_gordan

__all__ = [
    "AtomConfiguration",
    "RadiationQuadrature",
    "QuadratureConvergenceError",
    "IntegrationError",
    "DecayCoefficientTensor",
    "RateReport",
    "DirectionalReport",
    "coupling_guided",
    "coupling_radiation",
    "guided_correlations",
    "radiation_correlation",
    "gamma_guided",
    "gamma_radiation",
    "decay_tensor",
    "rate_report",
    "directional_report",
    "rate_decomposition",
    "evolve_density_matrix",
    "asymmetry",
]


class QuadratureConvergenceError(RuntimeError):
    """The radiation-mode quadrature did not reach its tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved relative change {achieved:.3g})")
        self.achieved = achieved


class IntegrationError(RuntimeError):
    """The density-matrix integrator failed (e.g. step-size underflow)."""


@dataclass(frozen=True)
class AtomConfiguration:
    geom: FiberGeometry
    pos: AtomPosition
    frame: QuantizationFrame = QuantizationFrame()
    constants: PhysicalConstants = PhysicalConstants()
    levels: LevelStructure = RB87_D2

    @property
    def omega(self) -> float:
        return self.constants.omega0

    @property
    def gamma0(self) -> float:
        return free_space_rate(self.constants, self.levels.J_excited)

    def with_(self, **changes) -> "AtomConfiguration":
        return replace(self, **changes)


@dataclass(frozen=True)
class RadiationQuadrature:
    """Gauss-Legendre rule in theta (beta = k n2 sin theta) plus an |l| <= L cut.

    Nodes double and L grows in steps of ``l_step`` until the Frobenius norm
    of the correlation tensor changes by less than ``rtol``. Narrow leaky-mode
    resonances near |beta| = k n2 get dedicated panels.
    """

    rtol: float = 1e-6
    nodes: int = 200
    l_start: int = 10
    l_step: int = 10
    max_nodes: int = 6400
    max_l: int = 400

    @classmethod
    def coarse(cls) -> "RadiationQuadrature":
        return cls(rtol=1e-3, nodes=48, l_start=8, l_step=6)


# -- geometry helpers ------------------------------------------------------------


def _cyl_to_cart(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _to_frame(config: AtomConfiguration) -> np.ndarray:
    """Real matrix taking local cylindrical components to quantization-frame Cartesian ones."""
    return rotation_matrix(config.frame) @ _cyl_to_cart(config.pos.phi)


@lru_cache(maxsize=64)
def _dipole_cartesian(levels: LevelStructure) -> np.ndarray:
    """d[e, g, :] as quantization-frame Cartesian vectors."""
    table = levels.dipole_table  # (e, g, q+1)
    return np.einsum("ij,egj->egi", np.linalg.inv(SPHERICAL), table)


# -- coupling coefficients (direct route) ----------------------------------------


def _dot_spherical(d_sph, e_sph) -> complex:
    """d . e = sum_q (-1)^q d_q e_{-q}, arrays ordered (q = -1, 0, +1)."""
    return -d_sph[0] * e_sph[2] + d_sph[1] * e_sph[1] - d_sph[2] * e_sph[0]


def _dipole_sph(e: Sublevel, g: Sublevel, nuclear_spin, reduced) -> np.ndarray:
    return np.array([dipole_spherical_component(e, g, q, nuclear_spin, reduced) for q in (-1, 0, 1)])


def coupling_guided(config: AtomConfiguration, sol: GuidedModeSolution, e: Sublevel, g: Sublevel) -> complex:
    """G for guided mode ``sol.mode`` and transition e -> g."""
    c = config.constants
    fld, phase = full_mode_function(sol, config.pos)
    e_sph = frame_rotate(fld, config.pos.phi, config.frame)
    d_sph = _dipole_sph(e, g, config.levels.nuclear_spin, c.reduced_dipole)
    amp = math.sqrt(sol.omega * sol.beta_prime / (4 * math.pi * c.epsilon0 * c.hbar))
    return amp * complex(_dot_spherical(d_sph, e_sph)) * phase


def coupling_radiation(config: AtomConfiguration, mode: RadiationModeId, e: Sublevel, g: Sublevel) -> complex:
    """G for a delta-normalized radiation mode and transition e -> g."""
    c = config.constants
    er, ephi, ez = radiation_fields(config.geom, mode.omega, mode.beta, mode.l, mode.p, config.pos.r)
    fld = CylindricalField(complex(er), complex(ephi), complex(ez))
    e_sph = frame_rotate(fld, config.pos.phi, config.frame)
    d_sph = _dipole_sph(e, g, config.levels.nuclear_spin, c.reduced_dipole)
    phase = np.exp(1j * (mode.beta * config.pos.z + mode.l * config.pos.phi))
    amp = math.sqrt(mode.omega / (4 * math.pi * c.epsilon0 * c.hbar))
    return amp * complex(_dot_spherical(d_sph, e_sph)) * complex(phase)


# -- correlation tensors ------------------------------------------------------------


@dataclass(frozen=True)
class GuidedChannel:
    """One guided mode (N, f, p) evaluated at the atom's radius."""

    mode: ModeId
    solution: GuidedModeSolution
    field: np.ndarray  # cylindrical (e_r, e_phi, e_z)
    weight: float  # omega beta' / (2 eps0 hbar)

    @property
    def tensor(self) -> np.ndarray:
        return self.weight * np.outer(self.field, self.field.conj())


def _mode_search_limits(geom: FiberGeometry, omega: float) -> tuple[int, int]:
    V = size_parameter(geom, omega)
    return int(V) + 2, int(V / math.pi) + 2


@lru_cache(maxsize=4096)
def _guided_channels(geom: FiberGeometry, omega: float, r: float, epsilon0: float,
                     hbar: float) -> tuple[GuidedChannel, ...]:
    if geom.degenerate:
        return ()
    l_max, m_max = _mode_search_limits(geom, omega)
    pos = AtomPosition(r)
    out = []
    for base in supported_modes(geom, omega, l_max=l_max, m_max=m_max):
        for mode in base.variants():
            sol = guided_mode(geom, omega, mode)
            fld, _ = full_mode_function(sol, pos)
            out.append(GuidedChannel(
                mode, sol, fld.as_array(),
                omega * sol.beta_prime / (2 * epsilon0 * hbar),
            ))
    return tuple(out)


def guided_correlations(config: AtomConfiguration) -> dict[tuple[str, int], np.ndarray]:
    """Cylindrical-basis tensors per (mode-family name, direction f), summed over p."""
    c = config.constants
    out: dict[tuple[str, int], np.ndarray] = {}
    for ch in _guided_channels(config.geom, config.omega, config.pos.r, c.epsilon0, c.hbar):
        key = (ch.mode.name, ch.mode.f)
        out[key] = out.get(key, 0) + ch.tensor
    return out


@dataclass(frozen=True)
class RadiationCorrelation:
    tensor: np.ndarray  # cylindrical basis
    nodes: int
    l_max: int
    achieved: float
    resonances: tuple[float, ...] = ()  # theta of narrow leaky-mode peaks


def _scan_density(geom, omega, r, ls, c, sign):
    """l-summed |e|^2 per unit theta at theta = sign * arccos(c)."""
    k = omega / 299792458.0
    theta = sign * np.arccos(c)
    beta = k * geom.n2 * np.sin(theta)
    dens = np.zeros_like(c)
    for p in (1, -1):
        comps = radiation_fields(geom, omega, beta[:, None], np.asarray(ls)[None, :], p, r)
        dens += sum(np.abs(x) ** 2 for x in comps).sum(axis=1)
    return theta, dens * c


def _half_max_bracket(d, j):
    half = d[j] / 2
    lo, hi = j, j
    while lo > 0 and d[lo] > half:
        lo -= 1
    while hi < len(d) - 1 and d[hi] > half:
        hi += 1
    return lo, hi, d[lo] <= half and d[hi] <= half


def _find_resonances(geom, omega, r, ls, max_width: float = 0.02) -> list[tuple[float, float]]:
    """Narrow peaks (theta, half width) of the l-summed integrand near |beta| = k n2.

    Just below a guided-mode cutoff the mode survives as a leaky resonance
    whose width shrinks toward the cutoff; a global rule cannot resolve it,
    so it gets its own panels. A logarithmic scan in q = k n2 cos theta finds
    candidate maxima, which are zoomed into until the half width is resolved.
    """
    c = np.logspace(-7, -0.05, 600)
    found = []
    for sign in (1, -1):
        theta, dens = _scan_density(geom, omega, r, ls, c, sign)
        for i in range(1, len(c) - 1):
            if not (dens[i] > dens[i - 1] and dens[i] >= dens[i + 1]):
                continue
            lo, hi, bracketed = _half_max_bracket(dens, i)
            if not bracketed:
                continue
            if hi - lo >= 6:
                width = abs(theta[hi] - theta[lo]) / 2
                if width < max_width:
                    found.append((float(theta[i]), float(width)))
                continue
            lo_c, hi_c = c[max(lo - 1, 0)], c[min(hi + 1, len(c) - 1)]
            for _ in range(12):
                cc = np.geomspace(lo_c, hi_c, 65)
                th, dd = _scan_density(geom, omega, r, ls, cc, sign)
                j = int(np.argmax(dd))
                lo, hi, bracketed = _half_max_bracket(dd, j)
                if not bracketed:
                    break
                if hi - lo >= 6:
                    width = abs(th[hi] - th[lo]) / 2
                    if width < max_width:
                        found.append((float(th[j]), float(width)))
                    break
                lo_c, hi_c = cc[max(lo - 1, 0)], cc[min(hi + 1, 64)]
    return found


def _theta_rule(n: int, resonances) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre on [-pi/2, pi/2], with geometric panels around resonances."""
    half_pi = math.pi / 2
    breaks = set()
    for t0, w in resonances:
        d = 3 * w
        while d < 0.1:
            for b in (t0 - d, t0 + d):
                if -half_pi < b < half_pi:
                    breaks.add(b)
            d *= 10
    edges = np.array([-half_pi, *sorted(breaks), half_pi])
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        m = max(n // 16, math.ceil(n * (hi - lo) / math.pi), 8)
        x, w = np.polynomial.legendre.leggauss(m)
        xs.append(lo + (hi - lo) * (x + 1) / 2)
        ws.append(w * (hi - lo) / 2)
    return np.concatenate(xs), np.concatenate(ws)


def _radiation_block(geom, omega, r, rule, ls) -> np.ndarray:
    """Per-l cylindrical tensors (unweighted by omega / 2 eps0 hbar)."""
    theta, w = rule
    k = omega / 299792458.0
    wt = w * k * geom.n2 * np.cos(theta)
    beta = k * geom.n2 * np.sin(theta)
    ls = np.asarray(ls)
    out = np.zeros((len(ls), 3, 3), complex)
    for p in (1, -1):
        comps = np.stack(radiation_fields(geom, omega, beta[:, None], ls[None, :], p, r))
        out += np.einsum("inl,jnl,n->lij", comps, comps.conj(), wt)
    return out


@lru_cache(maxsize=4096)
def _radiation_cached(geom: FiberGeometry, omega: float, r: float,
                      quad: RadiationQuadrature) -> RadiationCorrelation:
    if geom.degenerate:
        resonances = ()
    else:
        l_res = int(size_parameter(geom, omega)) + 3
        resonances = tuple(_find_resonances(geom, omega, r, np.arange(-l_res, l_res + 1)))
    n = quad.nodes
    prev = None
    while True:
        rule = _theta_rule(n, resonances)
        L = quad.l_start
        blocks = _radiation_block(geom, omega, r, rule, np.arange(-L, L + 1))
        while True:
            total = blocks.sum(axis=0)
            scale = np.linalg.norm(total)
            edge = np.linalg.norm(blocks[0]) + np.linalg.norm(blocks[-1])
            if edge <= quad.rtol * scale or scale == 0:
                break
            if L >= quad.max_l:
                raise QuadratureConvergenceError("azimuthal sum did not converge", edge / scale)
            new = np.arange(L + 1, L + quad.l_step + 1)
            lo = _radiation_block(geom, omega, r, rule, -new[::-1])
            hi = _radiation_block(geom, omega, r, rule, new)
            blocks = np.concatenate([lo, blocks, hi])
            L += quad.l_step
        if prev is not None:
            change = np.linalg.norm(total - prev) / max(scale, 1e-300)
            if change <= quad.rtol:
                return RadiationCorrelation(total, len(rule[0]), L, change,
                                            tuple(t for t, _ in resonances))
            if 2 * n > quad.max_nodes:
                raise QuadratureConvergenceError("beta quadrature did not converge", change)
        prev = total
        n *= 2


def radiation_correlation(config: AtomConfiguration,
                          quad: RadiationQuadrature = RadiationQuadrature()) -> RadiationCorrelation:
    """Cylindrical-basis radiation tensor at the atom, weight included."""
    c = config.constants
    raw = _radiation_cached(config.geom, config.omega, float(config.pos.r), quad)
    weight = config.omega / (2 * c.epsilon0 * c.hbar)
    return replace(raw, tensor=raw.tensor * weight)


# -- decay coefficients ---------------------------------------------------------------


def _coefficients(config: AtomConfiguration, W_cyl: np.ndarray) -> np.ndarray:
    """gamma[e, e', g, g'] for one cylindrical correlation tensor."""
    T = _to_frame(config)
    WQ = T @ W_cyl @ T.T
    D = _dipole_cartesian(config.levels) * config.constants.reduced_dipole
    return np.einsum("egi,ij,fhj->efgh", D, WQ, D.conj())


def _sublevel_rates(config: AtomConfiguration, W_cyl: np.ndarray) -> np.ndarray:
    """sum_g gamma_{eegg} for every excited sublevel."""
    T = _to_frame(config)
    WQ = T @ W_cyl @ T.T
    D = _dipole_cartesian(config.levels) * config.constants.reduced_dipole
    return np.einsum("egi,ij,egj->e", D, WQ, D.conj()).real


@dataclass(frozen=True)
class DecayCoefficientTensor:
    """gamma_{ee'gg'} (absolute units, 1/s) over excited x excited x ground x ground."""

    guided: np.ndarray
    radiation: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.guided + self.radiation

    def excited_matrix(self) -> np.ndarray:
        """gamma_{ee'} = sum_g gamma_{ee'gg}."""
        return np.einsum("efgg->ef", self.total)


def gamma_guided(config: AtomConfiguration) -> tuple[np.ndarray, dict[tuple[str, int], np.ndarray]]:
    """Guided decay-coefficient tensor and per-(N, f) sublevel rates, both absolute."""
    corr = guided_correlations(config)
    per_mode = {key: _sublevel_rates(config, W) for key, W in corr.items()}
    total = sum(corr.values()) if corr else np.zeros((3, 3), complex)
    return _coefficients(config, total), per_mode


def gamma_radiation(config: AtomConfiguration,
                    quad: RadiationQuadrature = RadiationQuadrature()) -> tuple[np.ndarray, np.ndarray]:
    """Radiation decay-coefficient tensor and sublevel rates, both absolute."""
    W = radiation_correlation(config, quad).tensor
    return _coefficients(config, W), _sublevel_rates(config, W)


def decay_tensor(config: AtomConfiguration,
                 quad: RadiationQuadrature = RadiationQuadrature()) -> DecayCoefficientTensor:
    guided, _ = gamma_guided(config)
    radiation, _ = gamma_radiation(config, quad)
    return DecayCoefficientTensor(guided, radiation)


# -- reports -----------------------------------------------------------------------------


def asymmetry(plus, minus):
    """(plus - minus) / (plus + minus), defined as 0 where both vanish."""
    plus, minus = np.asarray(plus, float), np.asarray(minus, float)
    s = plus + minus
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(s > 0, (plus - minus) / np.where(s > 0, s, 1.0), 0.0)


@dataclass(frozen=True)
class RateReport:
    """Per-sublevel rates in units of gamma_0, indexed like ``sublevels``.

    ``radiation_total`` is all-NaN when the report was built without the
    radiation quadrature; the totals and fractional rates are then NaN too.
    """

    sublevels: tuple[Sublevel, ...]
    per_mode_rates: dict[tuple[str, int], np.ndarray]
    radiation_total: np.ndarray
    quadrature: RadiationCorrelation | None = None

    @property
    def mode_names(self) -> list[str]:
        names = []
        for name, _ in self.per_mode_rates:
            if name not in names:
                names.append(name)
        return names

    def mode_rate(self, name: str) -> np.ndarray:
        """gamma_e^(N): both directions summed."""
        return self.per_mode_rates[(name, 1)] + self.per_mode_rates[(name, -1)]

    @property
    def directional_guided(self) -> dict[int, np.ndarray]:
        zero = np.zeros(len(self.sublevels))
        return {f: sum((v for (n, ff), v in self.per_mode_rates.items() if ff == f), zero)
                for f in (1, -1)}

    @property
    def guided_total(self) -> np.ndarray:
        d = self.directional_guided
        return d[1] + d[-1]

    @property
    def total(self) -> np.ndarray:
        return self.guided_total + self.radiation_total

    def asymmetry_mode(self, name: str) -> np.ndarray:
        return asymmetry(self.per_mode_rates[(name, 1)], self.per_mode_rates[(name, -1)])

    @property
    def asymmetry_total(self) -> np.ndarray:
        d = self.directional_guided
        return asymmetry(d[1], d[-1])

    def fractional_mode(self, name: str) -> np.ndarray:
        return self.mode_rate(name) / self.total

    @property
    def fractional_guided(self) -> np.ndarray:
        return self.guided_total / self.total

    def fractional_directional(self, f: int) -> np.ndarray:
        return self.directional_guided[f] / self.total

    def index(self, F, M) -> int:
        target = Sublevel.excited(F, M)
        for i, s in enumerate(self.sublevels):
            if (s.F, s.M) == (target.F, target.M):
                return i
        raise KeyError(f"no excited sublevel F'={F}, M'={M}")

    def select_F(self, F) -> list[int]:
        tf = Sublevel.excited(F, 0 if float(F) == int(float(F)) else 0.5).F
        return [i for i, s in enumerate(self.sublevels) if s.F == tf]


def rate_report(config: AtomConfiguration, quad: RadiationQuadrature | None = RadiationQuadrature(),
                ) -> RateReport:
    """All per-sublevel rates for ``config``; ``quad=None`` skips the radiation modes."""
    g0 = config.gamma0
    _, per_mode = gamma_guided(config)
    n = len(config.levels.excited)
    per_mode = {key: v / g0 for key, v in per_mode.items()}
    if quad is None:
        return RateReport(tuple(config.levels.excited), per_mode, np.full(n, np.nan))
    corr = radiation_correlation(config, quad)
    rad = _sublevel_rates(config, corr.tensor) / g0
    return RateReport(tuple(config.levels.excited), per_mode, rad, corr)


@dataclass(frozen=True)
class DirectionalReport:
    sublevels: tuple[Sublevel, ...]
    per_mode: dict[tuple[str, int], np.ndarray]
    directional: dict[int, np.ndarray]
    asymmetry_mode: dict[str, np.ndarray]
    asymmetry_total: np.ndarray
    fractional_directional: dict[int, np.ndarray] | None


def directional_report(config: AtomConfiguration,
                       quad: RadiationQuadrature | None = None) -> DirectionalReport:
    """Directional rates and asymmetry factors; fractional rates need ``quad``."""
    rep = rate_report(config, quad)
    frac = None if quad is None else {f: rep.fractional_directional(f) for f in (1, -1)}
    return DirectionalReport(
        rep.sublevels, rep.per_mode_rates, rep.directional_guided,
        {name: rep.asymmetry_mode(name) for name in rep.mode_names},
        rep.asymmetry_total, frac,
    )


# -- scalar / vector / tensor parts ------------------------------------------------


def _sph(v) -> np.ndarray:
    """Spherical components (v_-1, v_0, v_+1) of a Cartesian vector."""
    v = np.asarray(v, complex)
    return np.array([(v[0] - 1j * v[1]) / math.sqrt(2), v[2], -(v[0] + 1j * v[1]) / math.sqrt(2)])


def _rank2(a, b) -> np.ndarray:
    """{a x b}_{2,m} for m = -2..2 via Clebsch-Gordan coupling of spherical components."""
    sa, sb = _sph(a), _sph(b)
    out = np.zeros(5, complex)
    for m in range(-2, 3):
        for m1 in (-1, 0, 1):
            m2 = m - m1
            if abs(m2) <= 1:
                out[m + 2] += clebsch_gordan(1, m1, 1, m2, 2, m) * sa[m1 + 1] * sb[m2 + 1]
    return out


def _rank2_dot(x, y) -> complex:
    return sum((-1) ** m * x[m + 2] * y[-m + 2] for m in range(-2, 3))


def rate_decomposition(config: AtomConfiguration, sol: GuidedModeSolution, e: Sublevel,
                       g: Sublevel, f: int) -> tuple[float, float, float]:
    """Scalar, vector and rank-2 parts of the rate into family ``sol.mode`` along ``f``.

    Summed over the polarization index p; absolute units (1/s).
    """
    c = config.constants
    T = _to_frame(config)
    d = np.asarray(from_spherical(_dipole_sph(e, g, config.levels.nuclear_spin, c.reduced_dipole)))
    pref = sol.omega * sol.beta_prime / (c.epsilon0 * c.hbar)
    s_e2, s_cross, s_t2 = 0.0, np.zeros(3, complex), np.zeros(5, complex)
    for mode in sol.mode.with_(f=f).variants():
        if mode.f != f:
            continue
        fld, _ = full_mode_function(sol.for_mode(mode), config.pos)
        ev = T @ fld.as_array()
        s_e2 += float(np.vdot(ev, ev).real)
        s_cross += np.cross(ev.conj(), ev)
        s_t2 += _rank2(ev.conj(), ev)
    g0 = pref / 6 * float(np.vdot(d, d).real) * s_e2
    g1 = pref / 4 * complex(np.dot(np.cross(d.conj(), d), s_cross))
    g2 = pref / 2 * _rank2_dot(_rank2(d.conj(), d), s_t2)
    return g0, float(g1.real), float(complex(g2).real)


# -- master equation -----------------------------------------------------------------


def evolve_density_matrix(config: AtomConfiguration, rho0: np.ndarray, t_grid,
                          tensor: DecayCoefficientTensor | None = None,
                          quad: RadiationQuadrature = RadiationQuadrature(),
                          rtol: float = 1e-10, atol: float = 1e-12) -> np.ndarray:
    """Integrate the pure-decay master equation on the excited + ground manifolds.

    ``rho0`` is ordered excited sublevels first, then ground ones (as in
    ``config.levels.levels``). Returns an array of shape (len(t_grid), n, n).
    """
    if tensor is None:
        tensor = decay_tensor(config, quad)
    gam = tensor.total
    ne, ng = gam.shape[0], gam.shape[2]
    n = ne + ng
    rho0 = np.asarray(rho0, complex)
    if rho0.shape != (n, n):
        raise ValueError(f"rho0 must be {n}x{n}")
    if not np.allclose(rho0, rho0.conj().T, atol=1e-12):
        raise ValueError("rho0 must be Hermitian")
    if abs(np.trace(rho0) - 1) > 1e-10:
        raise ValueError("rho0 must have unit trace")
    G = np.einsum("efgg->ef", gam)
    # feeding term: rho_gg' += sum_{ee'} gamma_{e'eg'g} rho_ee'
    feed = np.transpose(gam, (1, 0, 3, 2))  # feed[e, e', g, g'] = gamma_{e'eg'g}

    def rhs(_t, y):
        rho = y.reshape(n, n)
        out = np.zeros_like(rho)
        ee = rho[:ne, :ne]
        out[:ne, :ne] = -0.5 * (G @ ee + ee @ G)
        out[ne:, ne:] = np.einsum("efgh,ef->gh", feed, ee)
        out[:ne, ne:] = -0.5 * G @ rho[:ne, ne:]
        out[ne:, :ne] = out[:ne, ne:].conj().T
        return out.ravel()

    t_grid = np.asarray(t_grid, float)
    sol = solve_ivp(rhs, (0.0, float(t_grid[-1])), rho0.ravel(), method="DOP853",
                    t_eval=t_grid, rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(sol.message)
    return sol.y.T.reshape(len(t_grid), n, n)
