import math

import numpy as np
import pytest
from scipy import special
from scipy.constants import c as C_LIGHT

from nanofiber_emission.fiber import FiberGeometry
from nanofiber_emission.guided_modes import CylindricalField
from nanofiber_emission.radiation_modes import (
    RadiationModeId, build_radiation_mode, far_field_overlap, radiation_fields,
    radiation_profile,
)

NM = 1e-9
OMEGA = 2 * math.pi * C_LIGHT / (780 * NM)
K = OMEGA / C_LIGHT
GEOM = FiberGeometry(400 * NM, 1.4537, 1.0)

BETAS = K * np.array([0.93, 0.5, 0.1, 1e-3])
LS = [0, 1, 2, 3, 5]
RADII = np.array([50, 399, 400, 700, 2500]) * NM
PHIS = [0.0, 0.9, 2.5]


def field(beta, l, p, r):
    return CylindricalField(*(complex(c) for c in radiation_fields(GEOM, OMEGA, beta, l, p, r)))


def grid():
    for b in BETAS:
        for sb in (1, -1):
            for l in LS:
                for sl in (1, -1):
                    for p in (1, -1):
                        for r in RADII:
                            yield sb * b, sl * l, p, r


def close(x, y, scale):
    return abs(x - y) <= 1e-12 * scale


def _scale(e):
    return math.sqrt(float(e.intensity())) + 1e-300


# -- coefficients ------------------------------------------------------------------------

@pytest.mark.parametrize("beta", [0.9 * K, -0.3 * K, 0.0, 1e-4 * K])
@pytest.mark.parametrize("l", [-3, 0, 1, 4])
@pytest.mark.parametrize("p", [1, -1])
def test_coefficient_relations(beta, l, p):
    mode = build_radiation_mode(GEOM, RadiationModeId(OMEGA, beta, l, p))
    assert mode.h == pytest.approx(math.sqrt(K**2 * 1.4537**2 - beta**2), rel=1e-14)
    assert mode.q == pytest.approx(math.sqrt(K**2 - beta**2), rel=1e-14)
    assert mode.B == 1j * p * mode.eta * mode.A
    assert mode.norm_N > 0
    # both coefficient pairs give the same normalization
    assert abs(mode.norm_from(1) - mode.norm_from(2)) < 1e-9 * mode.norm_N
    assert abs(mode.norm_from(1) - mode.norm_N) < 1e-9 * mode.norm_N
    # e_z continuity at the interface
    qa, ha = mode.q * GEOM.radius_a, mode.h * GEOM.radius_a
    outer = mode.C[0] * special.hankel1(l, qa) + mode.C[1] * special.hankel2(l, qa)
    inner = mode.A * special.jv(l, ha)
    assert abs(outer - inner) < 1e-9 * abs(inner) + 1e-15
    if l == 0:
        assert mode.V == (0j, 0j)


def test_out_of_band_beta_rejected():
    with pytest.raises(ValueError):
        build_radiation_mode(GEOM, RadiationModeId(OMEGA, 1.01 * K, 0, 1))
    with pytest.raises(ValueError):
        RadiationModeId(OMEGA, 0.0, 0, 0)


@pytest.mark.parametrize("beta", [0.8 * K, -0.2 * K])
@pytest.mark.parametrize("l", [0, 2, -1])
def test_polarizations_are_orthogonal(beta, l):
    plus = build_radiation_mode(GEOM, RadiationModeId(OMEGA, beta, l, 1))
    minus = build_radiation_mode(GEOM, RadiationModeId(OMEGA, beta, l, -1))
    diag = far_field_overlap(plus, plus)
    assert abs(diag - 2) < 1e-9
    assert abs(far_field_overlap(plus, minus)) < 1e-8 * abs(diag)


def test_interface_conditions_of_profile():
    a = GEOM.radius_a
    for beta in (0.7 * K, -0.2 * K):
        for l in (0, 1, -2):
            for p in (1, -1):
                inner, outer = field(beta, l, p, a * (1 - 1e-13)), field(beta, l, p, a)
                s = _scale(outer)
                assert abs(inner.e_z - outer.e_z) < 1e-9 * s
                assert abs(inner.e_phi - outer.e_phi) < 1e-9 * s
                assert abs(GEOM.n1**2 * inner.e_r - outer.e_r) < 1e-9 * GEOM.n1**2 * s


def test_index_matched_general_path_equals_closed_form():
    g = FiberGeometry(400 * NM, 1.2, 1.2)
    for beta in (0.5 * K, -0.9 * K):
        for l in (0, 1, 3):
            for p in (1, -1):
                for r in (100 * NM, 900 * NM):
                    closed = np.array(radiation_fields(g, OMEGA, beta, l, p, r))
                    general = np.array(radiation_fields(g, OMEGA, beta, l, p, r, general=True))
                    assert np.allclose(closed, general, rtol=1e-9, atol=1e-9 * np.abs(closed).max())


def test_profile_matches_broadcast_evaluation():
    mode = build_radiation_mode(GEOM, RadiationModeId(OMEGA, 0.4 * K, 2, -1))
    direct = radiation_profile(mode, 600 * NM).as_array()
    assert np.allclose(direct, field(0.4 * K, 2, -1, 600 * NM).as_array(), rtol=1e-15, atol=0)


# -- pointwise symmetry relations ----------------------------------------------------------

def test_reality_pattern():
    for beta, l, p, r in grid():
        e = field(beta, l, p, r)
        s = _scale(e)
        assert abs(e.e_r.real) <= 1e-14 * s
        assert abs(e.e_phi.imag) <= 1e-14 * s and abs(e.e_z.imag) <= 1e-14 * s


def test_azimuthal_mirror():
    for beta, l, p, r in grid():
        e, m = field(beta, l, p, r), field(beta, -l, -p, r)
        s = _scale(e)
        sign = (-1) ** l
        assert close(e.e_r, sign * m.e_r, s)
        assert close(e.e_phi, -sign * m.e_phi, s)
        assert close(e.e_z, sign * m.e_z, s)


def test_axial_mirror():
    """(beta, l, p) -> (-beta, l, -p) flips e_r and e_phi and keeps e_z."""
    for beta, l, p, r in grid():
        e, m = field(beta, l, p, r), field(-beta, l, -p, r)
        s = _scale(e)
        assert close(e.e_r, -m.e_r, s) and close(e.e_phi, -m.e_phi, s) and close(e.e_z, m.e_z, s)


def test_conjugation_relation():
    """e(beta, l, p) = (-1)^l conj(e(-beta, -l, p))."""
    for beta, l, p, r in grid():
        e, m = field(beta, l, p, r).as_array(), field(-beta, -l, p, r).as_array()
        assert np.all(np.abs(e - (-1) ** l * np.conj(m)) <= 1e-12 * np.abs(e).max() + 1e-300)


def test_spherical_relations():
    for beta, l, p, r in grid():
        for phi in PHIS:
            e = field(beta, l, p, r).spherical(phi)
            s = np.abs(e).max() + 1e-300
            axial = field(-beta, l, -p, r).spherical(phi)
            mirror = field(beta, -l, -p, r).spherical(phi)
            for q in (-1, 0, 1):
                assert abs(e[q + 1] - (-1) ** q * axial[q + 1]) <= 1e-12 * s
                assert abs(e[q + 1] - (-1) ** (l + q) * np.exp(2j * q * phi) * mirror[1 - q]) <= 1e-12 * s
                assert abs(e[q + 1] - (-1) ** q * np.exp(2j * q * phi) * np.conj(e[q + 1])) <= 1e-12 * s


# -- relations in the literal printed form (do not hold; see the decisions ledger) -------------

def _literal_failures(check):
    return sum(not check(beta, l, p, r) for beta, l, p, r in grid() if l != 0 or beta != 0)


@pytest.mark.xfail(strict=True, reason="printed axial relation pairs (beta, l) -> (-beta, -l) at fixed p")
def test_axial_relation_printed_form():
    def check(beta, l, p, r):
        e, m = field(beta, l, p, r), field(-beta, -l, p, r)
        s = _scale(e)
        return close(e.e_r, -m.e_r, s) and close(e.e_phi, -m.e_phi, s) and close(e.e_z, m.e_z, s)
    assert _literal_failures(check) == 0


@pytest.mark.xfail(strict=True, reason="printed conjugation relation keeps beta")
def test_conjugation_relation_printed_form():
    def check(beta, l, p, r):
        e, m = field(beta, l, p, r).as_array(), field(beta, -l, p, r).as_array()
        return np.all(np.abs(e - (-1) ** l * np.conj(m)) <= 1e-12 * np.abs(e).max() + 1e-300)
    assert _literal_failures(check) == 0


def _spherical_literal(relation):
    phi = 0.9

    def check(beta, l, p, r):
        e = field(beta, l, p, r).spherical(phi)
        m = field(beta, -l, p, r).spherical(phi)
        s = np.abs(e).max() + 1e-300
        return all(abs(e[q + 1] - relation(l, q, phi, m)) <= 1e-12 * s for q in (-1, 0, 1))
    return _literal_failures(check)


@pytest.mark.xfail(strict=True, reason="printed spherical parity relation uses (beta, -l, p)")
def test_spherical_parity_printed_form():
    assert _spherical_literal(lambda l, q, phi, m: (-1) ** q * m[q + 1]) == 0


@pytest.mark.xfail(strict=True, reason="printed spherical exchange relation uses (beta, -l, p)")
def test_spherical_exchange_printed_form():
    assert _spherical_literal(lambda l, q, phi, m: (-1) ** (l + q) * np.exp(2j * q * phi) * m[1 - q]) == 0
