"""Convergence of the radiation-mode rate against quadrature settings.

For a few fiber radii (atom on the surface, z_Q = z) the radiation rates of
the F' = 3 sublevels are computed with the coarse, default and a tight rule,
and compared with the tight result. Radii next to a guided-mode cutoff
exercise the leaky-resonance panels.

    python scripts/convergence_study.py [--radii 400 450 282.9]
"""

import argparse
import time

import numpy as np

from nanofiber_emission.atom import QuantizationFrame
from nanofiber_emission.fiber import FiberGeometry
from nanofiber_emission.guided_modes import AtomPosition
from nanofiber_emission.rates import AtomConfiguration, RadiationQuadrature, rate_report

RULES = {
    "coarse": RadiationQuadrature.coarse(),
    "default": RadiationQuadrature(),
    "tight": RadiationQuadrature(rtol=1e-9, nodes=400, l_start=20),
}


def study(a_nm: float) -> None:
    cfg = AtomConfiguration(FiberGeometry(a_nm * 1e-9, 1.4537, 1.0), AtomPosition(a_nm * 1e-9),
                            QuantizationFrame())
    results = {}
    for name, quad in RULES.items():
        t0 = time.perf_counter()
        rep = rate_report(cfg, quad)
        idx = rep.select_F(3)
        results[name] = (rep.radiation_total[idx], rep.quadrature, time.perf_counter() - t0)
    ref = results["tight"][0]
    for name, (values, corr, seconds) in results.items():
        err = np.max(np.abs(values / ref - 1))
        print(f"a = {a_nm:7.2f} nm  {name:7s} nodes {corr.nodes:5d}  L {corr.l_max:3d}  "
              f"resonances {len(corr.resonances)}  max rel. deviation {err:.2e}  {seconds:6.2f} s")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--radii", type=float, nargs="+", default=[200.0, 282.9, 400.0, 450.0, 499.9])
    args = parser.parse_args()
    for a in args.radii:
        study(a)


if __name__ == "__main__":
    main()
