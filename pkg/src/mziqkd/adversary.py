"""Eavesdropping channels acting on each pair in transit.

Every attack is described by a finite ensemble of branches (probability,
delivered state or loss, Eve's record).  ``apply_attack`` samples one branch;
``detection_probability`` for the path-block model is computed from the same
ensemble, while the two measurement attacks also have closed forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .hilbert import UsageError, frozen, norm
from .measurement import (
    JOINT_LABELS,
    Apparatus,
    OutcomeDistribution,
    TestKind,
    cumulative,
    mismatch_probability,
    pair_distribution,
    sample_index,
)
from .optics import PortPolarization, linear_state, polarizing_beam_splitter
from .rng import RngStream
from .source import PairState, SourceLabel, from_label, product, psi_plus


class Side(Enum):
    ALICE = "alice"
    BOB = "bob"


class Path(Enum):
    UPPER = "upper"
    LOWER = "lower"


@dataclass(frozen=True)
class NoAttack:
    name = "none"


@dataclass(frozen=True)
class InterceptResendCircular:
    """Eve measures both photons' circular polarization and resends what she saw."""

    name = "intercept"


@dataclass(frozen=True)
class NastySendLinear:
    """Eve measures circular polarization but forwards two identical linear photons.

    ``plane`` is the polarization-plane angle of the forwarded photons in
    radians (0 = x).  The interferometer phase analyzing that plane is
    ``2 * plane``.
    """

    plane: float = 0.0
    name = "nasty"


@dataclass(frozen=True)
class PathBlock:
    """An obstacle in one arm of one party's interferometer."""

    side: Side = Side.ALICE
    path: Path = Path.UPPER
    name = "block"


AttackModel = Union[NoAttack, InterceptResendCircular, NastySendLinear, PathBlock]


@dataclass(frozen=True, eq=False)
class AttackResult:
    delivered: Optional[PairState]
    eve_bits: Optional[tuple[PortPolarization, PortPolarization]] = None

    @property
    def lost(self) -> bool:
        return self.delivered is None


@dataclass(frozen=True, eq=False)
class Branch:
    probability: float
    result: AttackResult


def _circular_outcomes(state: PairState) -> OutcomeDistribution:
    return OutcomeDistribution(JOINT_LABELS, np.abs(state.amplitudes) ** 2)


def _blocked_photon_filter(path: Path) -> np.ndarray:
    """Single-photon operator that removes whatever the analyzer sends along ``path``.

    Upper arm = port-1 outputs of the analyzer, lower arm = port-2 outputs.
    For port-1 inputs this keeps the left-handed part when the upper arm is
    blocked and the right-handed part when the lower arm is blocked.
    """
    u = polarizing_beam_splitter()
    keep = np.diag([0, 0, 1, 1] if path is Path.UPPER else [1, 1, 0, 0]).astype(complex)
    return u.conj().T @ keep @ u


def attack_ensemble(model: AttackModel, state: PairState) -> list[Branch]:
    if isinstance(model, NoAttack):
        return [Branch(1.0, AttackResult(state))]

    if isinstance(model, (InterceptResendCircular, NastySendLinear)):
        dist = _circular_outcomes(state)
        if isinstance(model, NastySendLinear):
            photon = linear_state(model.plane)
            resent = product(photon, photon)
        branches = []
        for (pa, pb), p in zip(dist.outcomes, cumulative_weights(dist)):
            if p == 0.0:
                continue
            if isinstance(model, InterceptResendCircular):
                resent = product(pa.ket(), pb.ket())
            branches.append(Branch(p, AttackResult(resent, (pa, pb))))
        return branches

    if isinstance(model, PathBlock):
        filt = _blocked_photon_filter(model.path)
        eye = np.eye(4)
        op = np.kron(filt, eye) if model.side is Side.ALICE else np.kron(eye, filt)
        survived = op @ state.amplitudes
        p_keep = norm(survived) ** 2
        branches = []
        if p_keep > 0.0:
            kept = PairState(frozen(survived / math.sqrt(p_keep)), SourceLabel.CUSTOM)
            branches.append(Branch(p_keep, AttackResult(kept)))
        if 1.0 - p_keep > 0.0:
            branches.append(Branch(1.0 - p_keep, AttackResult(None)))
        return branches

    raise UsageError(f"unknown attack model {model!r}")


def cumulative_weights(dist: OutcomeDistribution) -> list[float]:
    """Cell weights with rounding residue of exact zeros cleared."""
    cdf = cumulative(dist)
    return [cdf[0]] + [cdf[i] - cdf[i - 1] for i in range(1, len(cdf))]


@lru_cache(maxsize=64)
def _ensemble_cdf(model: AttackModel, source: SourceLabel) -> tuple[tuple[float, ...], tuple[Branch, ...]]:
    branches = tuple(attack_ensemble(model, from_label(source)))
    return tuple(np.cumsum([b.probability for b in branches]).tolist()), branches


def apply_attack(model: AttackModel, state: PairState, rng: RngStream | float) -> AttackResult:
    """Send one pair through Eve's channel.

    ``rng`` may be a stream or an already drawn uniform in [0, 1).
    """
    u = rng if isinstance(rng, float) else rng.uniform()
    if state.label in (SourceLabel.PSI_PLUS, SourceLabel.PSI_MINUS):
        cdf, branches = _ensemble_cdf(model, state.label)
    else:
        branches = tuple(attack_ensemble(model, state))
        cdf = tuple(np.cumsum([b.probability for b in branches]).tolist())
    if len(branches) == 1:
        return branches[0].result
    return branches[sample_index(cdf, u)].result


def ensemble_mismatch_probability(model: AttackModel, test: TestKind,
                                  state: PairState | None = None,
                                  alpha: float = 0.0) -> float:
    """Mismatch rate of surviving pairs on a test, by Born rule over the ensemble."""
    state = psi_plus() if state is None else state
    if test is TestKind.LINEAR:
        a = b = Apparatus.interferometer(alpha)
    else:
        a = b = Apparatus.circular()
    num = den = 0.0
    for br in attack_ensemble(model, state):
        if br.result.lost:
            continue
        dist = pair_distribution(br.result.delivered, a, b)
        num += br.probability * mismatch_probability(dist, test, state.label)
        den += br.probability
    return num / den if den > 0.0 else 0.0


def detection_probability(model: AttackModel, test: TestKind, alpha: float = 0.0) -> float:
    """Per-tested-pair mismatch probability against a Psi+ source.

    ``alpha`` is the phase of the interferometers used for the linear test.
    """
    if isinstance(model, NoAttack):
        return 0.0
    if isinstance(model, InterceptResendCircular):
        return 0.5 if test is TestKind.LINEAR else 0.0
    if isinstance(model, NastySendLinear):
        if test is TestKind.CIRCULAR:
            return 0.5
        # each photon independently exits 2+ with cos^2(plane - alpha/2)
        delta = 2.0 * model.plane - alpha
        return 0.5 * math.sin(delta) ** 2
    return ensemble_mismatch_probability(model, test, psi_plus(), alpha)


def parse_attack(kind: str, plane: float = 0.0, side: str = "alice", path: str = "upper") -> AttackModel:
    if kind == "none":
        return NoAttack()
    if kind == "intercept":
        return InterceptResendCircular()
    if kind == "nasty":
        return NastySendLinear(float(plane))
    if kind == "block":
        return PathBlock(Side(side), Path(path))
    raise UsageError(f"unknown attack {kind!r}")


def describe(model: AttackModel) -> dict:
    d = {"kind": model.name}
    if isinstance(model, NastySendLinear):
        d["plane"] = model.plane
    elif isinstance(model, PathBlock):
        d["side"] = model.side.value
        d["path"] = model.path.value
    return d
