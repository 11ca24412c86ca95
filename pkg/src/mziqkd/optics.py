"""Optical components of the polarizing Mach-Zehnder interferometer.

Single-photon basis order is fixed everywhere as (1+, 1-, 2+, 2-): port 1 or
2, right-handed (+) or left-handed (-) circular polarization.

The composed interferometer is built by multiplying the four component
matrices and is checked on every call against an independently transcribed
closed form.  A mismatch means one of the stored matrices is wrong.
"""
from __future__ import annotations

import cmath
import math
from enum import Enum

import numpy as np

from .hilbert import TOL, apply, basis, dagger, frozen, max_abs_diff

TWO_PI = 2.0 * math.pi
_S = 1.0 / math.sqrt(2.0)


class InternalConsistencyError(RuntimeError):
    """The composed interferometer disagrees with its closed form."""


class PortPolarization(Enum):
    R1 = "1+"
    L1 = "1-"
    R2 = "2+"
    L2 = "2-"

    @property
    def index(self) -> int:
        return _LABELS.index(self)

    @property
    def port(self) -> int:
        return int(self.value[0])

    @property
    def right_handed(self) -> bool:
        return self.value[1] == "+"

    @classmethod
    def from_index(cls, index: int) -> "PortPolarization":
        return _LABELS[index]

    def ket(self) -> np.ndarray:
        return basis(4, self.index)

    def __str__(self) -> str:
        return self.value


_LABELS = (PortPolarization.R1, PortPolarization.L1, PortPolarization.R2, PortPolarization.L2)
LABELS = _LABELS


def canonical_phase(alpha: float) -> float:
    """Reduce a phase to [0, 2*pi)."""
    a = math.fmod(float(alpha), TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:
        a = 0.0
    return a


def phase_to_plane(alpha: float) -> float:
    """Polarization-plane angle analyzed by an interferometer of phase alpha.

    The interferometer phase is twice the plane angle: V_alpha sends the
    plane at alpha/2 to output 2+.  This pair of functions is the only place
    the factor of two lives.
    """
    return canonical_phase(alpha) / 2.0


def plane_to_phase(theta: float) -> float:
    return canonical_phase(2.0 * float(theta))


# 2x2 symmetric beam splitter of the ordinary (Elitzur-Vaidman) interferometer.
EV_BEAM_SPLITTER = frozen(_S * np.array([[1j, 1], [1, 1j]]))

POLARIZING_BEAM_SPLITTER = frozen(
    [
        [1j, 0, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [0, 1, 0, 0],
    ]
)

HALF_WAVE_PLATE = frozen(
    [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 1, 0],
    ]
)

SYMMETRIC_MIRROR = frozen(
    _S
    * np.array(
        [
            [1j, 0, 1, 0],
            [0, 1j, 0, 1],
            [1, 0, 1j, 0],
            [0, 1, 0, 1j],
        ]
    )
)


def ev_interferometer() -> np.ndarray:
    return EV_BEAM_SPLITTER


def polarizing_beam_splitter() -> np.ndarray:
    """Circular-polarization analyzer: right-handed light in port 1 is reflected up."""
    return POLARIZING_BEAM_SPLITTER


def half_wave_plate() -> np.ndarray:
    return HALF_WAVE_PLATE


def symmetric_mirror() -> np.ndarray:
    return SYMMETRIC_MIRROR


def phase_shifter(alpha: float) -> np.ndarray:
    """Multiplies both port-1 amplitudes by exp(i*alpha)."""
    w = cmath.exp(1j * canonical_phase(alpha))
    return frozen(np.diag([w, w, 1.0, 1.0]))


def closed_form_interferometer(alpha: float) -> np.ndarray:
    w = cmath.exp(1j * canonical_phase(alpha))
    return frozen(
        _S
        * np.array(
            [
                [-w, 1, 0, 0],
                [0, 0, 1j * w, 1],
                [1j * w, 1j, 0, 0],
                [0, 0, w, 1j],
            ]
        )
    )


def composed_interferometer(alpha: float) -> np.ndarray:
    return frozen(
        symmetric_mirror() @ phase_shifter(alpha) @ half_wave_plate() @ polarizing_beam_splitter()
    )


def interferometer(alpha: float) -> np.ndarray:
    """V_alpha = mirror . phase . half-wave plate . analyzer, cross-checked."""
    composed = composed_interferometer(alpha)
    dev = max_abs_diff(composed, closed_form_interferometer(alpha))
    if dev > TOL:
        raise InternalConsistencyError(
            f"Eq13: composed interferometer differs from closed form by {dev:.3e} at alpha={alpha}"
        )
    return composed


def linear_basis(alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """(|alpha>, |alpha_perp>): the input states V_alpha routes to i|2+> and -|1+>."""
    vd = dagger(interferometer(alpha))
    parallel = apply(vd, 1j * PortPolarization.R2.ket())
    perpendicular = apply(vd, -PortPolarization.R1.ket())
    return parallel, perpendicular


def linear_state(theta: float) -> np.ndarray:
    """Port-1 photon linearly polarized in the plane at angle theta (x at 0)."""
    return linear_basis(plane_to_phase(theta))[0]


def x_polarized() -> np.ndarray:
    return frozen(_S * np.array([1, 1, 0, 0]))


def y_polarized() -> np.ndarray:
    return frozen(_S * np.array([-1, 1, 0, 0]))
