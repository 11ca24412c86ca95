"""Born-rule outcome distributions, sampling and the analytic coincidence law."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import product as cartesian
from typing import Sequence

import numpy as np

from .hilbert import apply, tensor
from .optics import LABELS, PortPolarization, canonical_phase, interferometer, polarizing_beam_splitter
from .rng import RngStream
from .source import PairState, SourceLabel, psi_plus

# Born weights below this are rounding residue of exact zeros.
NUMERICAL_ZERO = 1e-15

JOINT_LABELS = tuple(cartesian(LABELS, LABELS))


class ApparatusKind(Enum):
    INTERFEROMETER = "V"
    CIRCULAR = "U"


@dataclass(frozen=True)
class Apparatus:
    kind: ApparatusKind
    alpha: float = 0.0

    def __post_init__(self):
        alpha = canonical_phase(self.alpha) if self.kind is ApparatusKind.INTERFEROMETER else 0.0
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def interferometer(cls, alpha: float = 0.0) -> "Apparatus":
        return cls(ApparatusKind.INTERFEROMETER, alpha)

    @classmethod
    def circular(cls) -> "Apparatus":
        return cls(ApparatusKind.CIRCULAR)

    def __str__(self) -> str:
        if self.kind is ApparatusKind.CIRCULAR:
            return "U+-"
        return f"V({self.alpha:g})"


class TestKind(Enum):
    LINEAR = "linear"
    CIRCULAR = "circular"

    __test__ = False  # not a pytest class


def apparatus_unitary(a: Apparatus) -> np.ndarray:
    if a.kind is ApparatusKind.CIRCULAR:
        return polarizing_beam_splitter()
    return interferometer(a.alpha)


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Probabilities over a fixed, ordered list of outcomes."""

    outcomes: tuple
    probabilities: np.ndarray

    def __getitem__(self, outcome) -> float:
        return float(self.probabilities[self.outcomes.index(outcome)])

    def get(self, outcome, default: float = 0.0) -> float:
        try:
            return self[outcome]
        except ValueError:
            return default

    def as_dict(self) -> dict:
        return {o: float(p) for o, p in zip(self.outcomes, self.probabilities)}

    def total(self) -> float:
        return float(self.probabilities.sum())


def single_distribution(state: np.ndarray, a: Apparatus) -> OutcomeDistribution:
    out = apply(apparatus_unitary(a), state)
    return OutcomeDistribution(LABELS, np.abs(out) ** 2)


def pair_distribution(state: PairState | np.ndarray, a: Apparatus, b: Apparatus) -> OutcomeDistribution:
    amps = state.amplitudes if isinstance(state, PairState) else np.asarray(state)
    out = apply(tensor(apparatus_unitary(a), apparatus_unitary(b)), amps)
    return OutcomeDistribution(JOINT_LABELS, np.abs(out) ** 2)


def coincidence_probability(alpha: float, beta: float, joint: tuple[PortPolarization, PortPolarization]) -> float:
    """Closed-form joint probability for Psi+ through V_alpha (x) V_beta.

    Same + port on both sides: cos^2((alpha-beta)/2)/2.  Opposite + ports:
    sin^2((alpha-beta)/2)/2.  Anything left-handed never fires.
    """
    pa, pb = joint
    if not (pa.right_handed and pb.right_handed):
        return 0.0
    half = (canonical_phase(alpha) - canonical_phase(beta)) / 2.0
    if pa is pb:
        return 0.5 * math.cos(half) ** 2
    return 0.5 * math.sin(half) ** 2


def _outcome_value(label: PortPolarization) -> int:
    # +1 for the |alpha> port (2+), -1 for the |alpha_perp> port (1+)
    return 1 if label is PortPolarization.R2 else -1


def correlation(alpha: float, beta: float) -> float:
    """E(alpha, beta) = P(same port) - P(different port) = cos(alpha - beta).

    cos^2(h) - sin^2(h) is folded with the double-angle identity; the
    term-by-term sum is ``correlation_from_coincidences``.
    """
    half = (canonical_phase(alpha) - canonical_phase(beta)) / 2.0
    return math.cos(2.0 * half)


def correlation_from_coincidences(alpha: float, beta: float) -> float:
    total = 0.0
    for pa in (PortPolarization.R1, PortPolarization.R2):
        for pb in (PortPolarization.R1, PortPolarization.R2):
            total += _outcome_value(pa) * _outcome_value(pb) * coincidence_probability(alpha, beta, (pa, pb))
    return total


def correlation_from_distribution(dist: OutcomeDistribution) -> float:
    total = 0.0
    for (pa, pb), p in zip(dist.outcomes, dist.probabilities):
        if pa.right_handed and pb.right_handed:
            total += _outcome_value(pa) * _outcome_value(pb) * float(p)
    return total


def numeric_correlation(alpha: float, beta: float, state: PairState | None = None) -> float:
    state = psi_plus() if state is None else state
    return correlation_from_distribution(
        pair_distribution(state, Apparatus.interferometer(alpha), Apparatus.interferometer(beta))
    )


def chsh(angles: Sequence[float], corr=correlation) -> tuple[list[float], float]:
    """CHSH value S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')| for angles (a, a', b, b')."""
    a, a2, b, b2 = angles
    es = [corr(a, b), corr(a, b2), corr(a2, b), corr(a2, b2)]
    return es, abs(math.fsum([es[0], -es[1], es[2], es[3]]))


def cumulative(dist: OutcomeDistribution) -> list[float]:
    probs = np.where(dist.probabilities < NUMERICAL_ZERO, 0.0, dist.probabilities)
    return np.cumsum(probs).tolist()


def _pick(cdf: Sequence[float], u: float) -> int:
    i = bisect.bisect_right(cdf, u)
    if i >= len(cdf):
        # u beyond the rounded total: take the last cell with weight
        i = len(cdf) - 1
        while i > 0 and cdf[i] == cdf[i - 1]:
            i -= 1
    return i


def sample_index(cdf: Sequence[float], u: float) -> int:
    return _pick(cdf, u * min(cdf[-1], 1.0))


def sample(dist: OutcomeDistribution, rng: RngStream):
    """Inverse-CDF draw of one outcome in the distribution's label order."""
    return dist.outcomes[sample_index(cumulative(dist), rng.uniform())]


def sample_many(dist: OutcomeDistribution, rng: RngStream, n: int) -> np.ndarray:
    """Vectorized inverse-CDF sampling; returns outcome indices."""
    cdf = np.asarray(cumulative(dist))
    u = rng.uniforms(n) * min(cdf[-1], 1.0)
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(cdf) - 1)


def is_mismatch(test: TestKind, alice: PortPolarization, bob: PortPolarization,
                source: SourceLabel = SourceLabel.PSI_PLUS) -> bool:
    """Whether a tested pair violates the correlation the source promises.

    Linear test: Psi+ gives identical linear outcomes, Psi- opposite ones.
    Circular test: both sources give opposite handedness.
    """
    if test is TestKind.LINEAR:
        same = alice is bob
        return not same if source is not SourceLabel.PSI_MINUS else same
    return alice.right_handed == bob.right_handed


def mismatch_probability(dist: OutcomeDistribution, test: TestKind,
                         source: SourceLabel = SourceLabel.PSI_PLUS) -> float:
    return float(sum(p for (pa, pb), p in zip(dist.outcomes, dist.probabilities)
                     if is_mismatch(test, pa, pb, source)))


@lru_cache(maxsize=4096)
def _cached_cdf(amps_bytes: bytes, a: Apparatus, b: Apparatus) -> tuple[float, ...]:
    amps = np.frombuffer(amps_bytes, dtype=complex)
    return tuple(cumulative(pair_distribution(amps, a, b)))


def pair_cdf(state: PairState, a: Apparatus, b: Apparatus) -> tuple[float, ...]:
    """Cached joint CDF, for the hot loop of protocol runs."""
    return _cached_cdf(state.key(), a, b)
