"""The two worked examples: Gaussian kernels, period pi."""

import math

from .coefficients import ModelParams, TrigPoly
from .kernel import gaussian

__all__ = ["example1", "example2", "PAPER_CAPTIONS"]

# initial-data amplitudes quoted alongside the two simulations
PAPER_CAPTIONS = {
    "example1": {"p0": 0.7660, "q0": 0.2977},
    "example2": {"p0": 0.2378, "q0": 0.4779},
}


def _tp(mean, sin=0.0, cos=0.0):
    harmonics = ((1, sin, cos),) if (sin or cos) else ()
    return TrigPoly(math.pi, mean, harmonics)


def example1(resolution=2048) -> ModelParams:
    """Species ``u`` wins: the certified speed is positive."""
    return ModelParams(
        math.pi,
        d1=_tp(10.0), r1=_tp(3.5), a1=_tp(5.0, sin=3.0), b1=_tp(10.0, sin=3.0),
        d2=_tp(15.0), r2=_tp(3.0), a2=_tp(15.0, cos=3.0), b2=_tp(8.0, cos=3.0),
        kernel1=gaussian(1.0), kernel2=gaussian(1.0), resolution=resolution,
    )


def example2(resolution=2048) -> ModelParams:
    """Species ``v`` wins: the certified speed is negative."""
    return ModelParams(
        math.pi,
        d1=_tp(100.0), r1=_tp(3.0), a1=_tp(14.0, sin=3.0), b1=_tp(35.0, sin=5.0),
        d2=_tp(120.0), r2=_tp(3.4), a2=_tp(16.0, cos=1.5), b2=_tp(6.0, cos=1.5),
        kernel1=gaussian(1.0), kernel2=gaussian(1.0), resolution=resolution,
    )
