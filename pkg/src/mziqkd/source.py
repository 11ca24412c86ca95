"""Two-photon input states.

Pair amplitudes live in the 16-dimensional space (Alice photon) x (Bob photon),
Alice's index varying slowest.  Alice receives the photon travelling left.

Two conventions coexist for the entangled source: the protocol uses Psi+,
while the Bell-experiment figure describes photons arriving in a singlet.
Both are provided; protocol runs default to Psi+.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .hilbert import TOL, UsageError, frozen, max_abs_diff, norm, tensor
from .optics import LABELS, PortPolarization, canonical_phase, linear_basis

_S = 1.0 / math.sqrt(2.0)


class SourceLabel(Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PRODUCT = "product"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class PairState:
    amplitudes: np.ndarray
    label: SourceLabel = SourceLabel.CUSTOM

    def __post_init__(self):
        amps = frozen(self.amplitudes)
        if amps.shape != (16,):
            raise UsageError(f"pair state needs 16 amplitudes, got shape {amps.shape}")
        if abs(norm(amps) - 1.0) > TOL:
            raise UsageError(f"pair state is not normalized (norm {norm(amps)!r})")
        object.__setattr__(self, "amplitudes", amps)

    def amplitude(self, alice: PortPolarization, bob: PortPolarization) -> complex:
        return complex(self.amplitudes[4 * alice.index + bob.index])

    def key(self) -> bytes:
        """Hashable fingerprint of the amplitudes, used for caching."""
        return self.amplitudes.tobytes()

    def slot_probabilities(self, slot: int) -> dict[PortPolarization, float]:
        """Marginal Born weights of one photon in the port/circular basis."""
        weights = np.abs(self.amplitudes.reshape(4, 4)) ** 2
        marginal = weights.sum(axis=1 - slot)
        return {lab: float(marginal[lab.index]) for lab in LABELS}


def _entangled(sign: float) -> np.ndarray:
    r, l = PortPolarization.R1.ket(), PortPolarization.L1.ket()
    return _S * (np.kron(r, l) + sign * np.kron(l, r))


def psi_plus() -> PairState:
    """(|1+>|1-> + |1->|1+>)/sqrt(2)."""
    return PairState(_entangled(+1.0), SourceLabel.PSI_PLUS)


def psi_minus() -> PairState:
    """(|1+>|1-> - |1->|1+>)/sqrt(2)."""
    return PairState(_entangled(-1.0), SourceLabel.PSI_MINUS)


def product(alice: np.ndarray, bob: np.ndarray) -> PairState:
    return PairState(tensor(alice, bob), SourceLabel.PRODUCT)


def from_label(label: SourceLabel | str) -> PairState:
    label = SourceLabel(label)
    if label is SourceLabel.PSI_PLUS:
        return psi_plus()
    if label is SourceLabel.PSI_MINUS:
        return psi_minus()
    raise UsageError(f"no canonical state for source label {label.value!r}")


def linear_form(state: PairState, alpha: float) -> np.ndarray:
    """Rebuild Psi+/Psi- from the linear basis analyzed at phase alpha.

    Psi+ = e^{i alpha}/sqrt(2) (|a>|a> - |a_perp>|a_perp>)
    Psi- = e^{i alpha}/sqrt(2) (|a_perp>|a> - |a>|a_perp>)

    The result equals the circular-basis amplitudes exactly for every alpha.
    """
    a, a_perp = linear_basis(alpha)
    pref = cmath.exp(1j * canonical_phase(alpha)) * _S
    if state.label is SourceLabel.PSI_PLUS:
        return frozen(pref * (np.kron(a, a) - np.kron(a_perp, a_perp)))
    if state.label is SourceLabel.PSI_MINUS:
        return frozen(pref * (np.kron(a_perp, a) - np.kron(a, a_perp)))
    raise UsageError(f"linear_form is defined only for psi+/psi-, not {state.label.value}")


def linear_form_defect(state: PairState, alpha: float) -> float:
    return max_abs_diff(linear_form(state, alpha), state.amplitudes)
