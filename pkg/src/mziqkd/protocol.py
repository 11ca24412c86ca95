"""BBM92-style key distribution with polarizing interferometers.

Per pair, Alice and Bob each pick V_0 (linear analyzer) or U+- (circular
analyzer) with probability 1/2.  Configurations are labelled by the two
choices: vv, vu, uv, uu.  Mixed configurations are discarded.  All vv pairs
are compared publicly (linear test); a random fraction of uu pairs is
sacrificed for the circular test and the rest become key bits.

Key bits: Alice maps right-handed -> 0, left-handed -> 1; Bob uses the
opposite map, so the anti-correlated handedness of the source gives equal keys.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .adversary import (
    AttackModel,
    InterceptResendCircular,
    NastySendLinear,
    NoAttack,
    apply_attack,
    describe,
    detection_probability,
    parse_attack,
)
from .hilbert import UsageError
from .measurement import JOINT_LABELS, Apparatus, TestKind, is_mismatch, pair_cdf, sample_index
from .optics import PortPolarization
from .rng import RngStream
from .source import PairState, SourceLabel, from_label

LINEAR = Apparatus.interferometer(0.0)
CIRCULAR = Apparatus.circular()

DEFAULT_SACRIFICE = 0.25
DEFAULT_THRESHOLD = 0.05


class Verdict(Enum):
    CLEAN = "Clean"
    DETECTED = "EavesdropperDetected"
    ABORTED = "Aborted"


@dataclass(frozen=True)
class SessionConfig:
    n_pairs: int
    attack: AttackModel = field(default_factory=NoAttack)
    seed: int = 0
    sacrifice_fraction: float = DEFAULT_SACRIFICE
    abort_qber_threshold: float = DEFAULT_THRESHOLD
    source: SourceLabel = SourceLabel.PSI_PLUS

    def __post_init__(self):
        if int(self.n_pairs) <= 0:
            raise UsageError("n_pairs must be positive")
        if not 0.0 < self.sacrifice_fraction < 1.0:
            raise UsageError("sacrifice_fraction must lie strictly between 0 and 1")
        if not 0.0 <= self.abort_qber_threshold < 1.0:
            raise UsageError("abort_qber_threshold must lie in [0, 1)")
        if self.source not in (SourceLabel.PSI_PLUS, SourceLabel.PSI_MINUS):
            raise UsageError("source must be psi+ or psi-")

    def to_dict(self) -> dict:
        return {
            "n_pairs": self.n_pairs,
            "attack": describe(self.attack),
            "seed": self.seed,
            "sacrifice_fraction": self.sacrifice_fraction,
            "abort_qber_threshold": self.abort_qber_threshold,
            "source": self.source.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SessionConfig":
        att = d["attack"]
        return cls(
            n_pairs=d["n_pairs"],
            attack=parse_attack(att["kind"], att.get("plane", 0.0), att.get("side", "alice"), att.get("path", "upper")),
            seed=d["seed"],
            sacrifice_fraction=d["sacrifice_fraction"],
            abort_qber_threshold=d["abort_qber_threshold"],
            source=SourceLabel(d["source"]),
        )


@dataclass(frozen=True)
class PairRecord:
    index: int
    alice_basis: Apparatus
    bob_basis: Apparatus
    alice_outcome: Optional[PortPolarization] = None
    bob_outcome: Optional[PortPolarization] = None
    lost: bool = False
    eve_bits: Optional[tuple[PortPolarization, PortPolarization]] = None

    @property
    def configuration(self) -> str:
        return self.alice_basis.kind.value.lower() + self.bob_basis.kind.value.lower()


def simulate_pair(config: SessionConfig, index: int, state: PairState | None = None) -> PairRecord:
    """Everything that happens to pair ``index``; reads only its own stream."""
    state = from_label(config.source) if state is None else state
    u = RngStream(config.seed, index).uniforms(4)
    a = LINEAR if u[0] < 0.5 else CIRCULAR
    b = LINEAR if u[1] < 0.5 else CIRCULAR
    result = apply_attack(config.attack, state, float(u[2]))
    if result.lost:
        return PairRecord(index, a, b, lost=True, eve_bits=result.eve_bits)
    pa, pb = JOINT_LABELS[sample_index(pair_cdf(result.delivered, a, b), float(u[3]))]
    return PairRecord(index, a, b, pa, pb, eve_bits=result.eve_bits)


def simulate_range(config: SessionConfig, start: int, stop: int) -> list[PairRecord]:
    state = from_label(config.source)
    return [simulate_pair(config, k, state) for k in range(start, stop)]


def simulate_pairs(config: SessionConfig, workers: int = 1) -> list[PairRecord]:
    n = config.n_pairs
    if workers <= 1 or n < 2 * workers:
        return simulate_range(config, 0, n)
    bounds = [n * i // workers for i in range(workers + 1)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunks = pool.map(simulate_range, [config] * workers, bounds[:-1], bounds[1:])
        return [rec for chunk in chunks for rec in chunk]


def alice_bit(label: PortPolarization) -> int:
    return 0 if label.right_handed else 1


def bob_bit(label: PortPolarization) -> int:
    return 1 if label.right_handed else 0


@dataclass
class TestResult:
    tested: int = 0
    mismatches: int = 0

    __test__ = False

    @property
    def qber(self) -> Optional[float]:
        return self.mismatches / self.tested if self.tested else None


@dataclass
class SessionReport:
    config: SessionConfig
    counts: dict
    linear_test: TestResult
    circular_test: TestResult
    sifted_key_alice: str
    sifted_key_bob: str
    eve_present: bool
    eve_knowledge_rate: Optional[float]
    verdict: Verdict

    @property
    def loss_count(self) -> int:
        return self.counts["lost"]

    @property
    def linear_test_qber(self) -> Optional[float]:
        return self.linear_test.qber

    @property
    def circular_test_qber(self) -> Optional[float]:
        return self.circular_test.qber

    @property
    def key_length(self) -> int:
        return len(self.sifted_key_alice)

    @property
    def key_agreement_rate(self) -> Optional[float]:
        n = self.key_length
        if n == 0:
            return None
        return sum(x == y for x, y in zip(self.sifted_key_alice, self.sifted_key_bob)) / n

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "counts": dict(self.counts),
            "linear_test": {
                "tested": self.linear_test.tested,
                "mismatches": self.linear_test.mismatches,
                "qber": self.linear_test_qber,
            },
            "circular_test": {
                "tested": self.circular_test.tested,
                "mismatches": self.circular_test.mismatches,
                "qber": self.circular_test_qber,
            },
            "key": {
                "length": self.key_length,
                "agreement_rate": self.key_agreement_rate,
                "alice": self.sifted_key_alice,
                "bob": self.sifted_key_bob,
            },
            "eve": {"present": self.eve_present, "knowledge_rate": self.eve_knowledge_rate},
            "verdict": self.verdict.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SessionReport":
        return cls(
            config=SessionConfig.from_dict(d["config"]),
            counts={k: d["counts"][k] for k in ("vv", "vu", "uv", "uu", "lost")},
            linear_test=TestResult(d["linear_test"]["tested"], d["linear_test"]["mismatches"]),
            circular_test=TestResult(d["circular_test"]["tested"], d["circular_test"]["mismatches"]),
            sifted_key_alice=d["key"]["alice"],
            sifted_key_bob=d["key"]["bob"],
            eve_present=d["eve"]["present"],
            eve_knowledge_rate=d["eve"]["knowledge_rate"],
            verdict=Verdict(d["verdict"]),
        )


def sift(config: SessionConfig, records: list[PairRecord]) -> SessionReport:
    counts = {"vv": 0, "vu": 0, "uv": 0, "uu": 0, "lost": 0}
    linear = TestResult()
    uu: list[PairRecord] = []
    for rec in records:
        if rec.lost:
            counts["lost"] += 1
            continue
        conf = rec.configuration
        counts[conf] += 1
        if conf == "vv":
            linear.tested += 1
            linear.mismatches += is_mismatch(TestKind.LINEAR, rec.alice_outcome, rec.bob_outcome, config.source)
        elif conf == "uu":
            uu.append(rec)

    n_sacrifice = math.ceil(config.sacrifice_fraction * len(uu))
    lottery = RngStream(config.seed, config.n_pairs + 1).generator
    sacrificed = set(lottery.permutation(len(uu))[:n_sacrifice].tolist())

    circular = TestResult()
    key_a, key_b, eve_hits = [], [], 0
    eve_present = isinstance(config.attack, (InterceptResendCircular, NastySendLinear))
    for i, rec in enumerate(uu):
        if i in sacrificed:
            circular.tested += 1
            circular.mismatches += is_mismatch(TestKind.CIRCULAR, rec.alice_outcome, rec.bob_outcome, config.source)
            continue
        bit = alice_bit(rec.alice_outcome)
        key_a.append(str(bit))
        key_b.append(str(bob_bit(rec.bob_outcome)))
        if rec.eve_bits is not None:
            eve_hits += alice_bit(rec.eve_bits[0]) == bit

    knowledge = eve_hits / len(key_a) if eve_present and key_a else None

    if linear.tested == 0 or circular.tested == 0:
        verdict = Verdict.ABORTED
    elif linear.qber > config.abort_qber_threshold or circular.qber > config.abort_qber_threshold:
        verdict = Verdict.DETECTED
    else:
        verdict = Verdict.CLEAN

    return SessionReport(
        config=config,
        counts=counts,
        linear_test=linear,
        circular_test=circular,
        sifted_key_alice="".join(key_a),
        sifted_key_bob="".join(key_b),
        eve_present=eve_present,
        eve_knowledge_rate=knowledge,
        verdict=verdict,
    )


def run_session(config: SessionConfig, workers: int = 1) -> SessionReport:
    return sift(config, simulate_pairs(config, workers))


def detection_curve(model: AttackModel, test_pairs_max: int,
                    test: Optional[TestKind] = None) -> list[tuple[int, float]]:
    """Probability that at least one of n tested pairs shows a mismatch.

    Without ``test`` the more sensitive of the two tests is used.
    """
    if test is None:
        p = max(detection_probability(model, t) for t in TestKind)
    else:
        p = detection_probability(model, test)
    return [(n, 1.0 - (1.0 - p) ** n) for n in range(1, test_pairs_max + 1)]


def bbm92_mapping_doc() -> dict:
    """Which measurement here plays which role in the BBM92 security proof."""
    return {
        "mapping": [
            {"measurement": "circular", "apparatus": "U+-", "observable": "sigma_z",
             "eigenstates": ["1+", "1-"], "role": "key"},
            {"measurement": "linear", "apparatus": "V_0", "observable": "sigma_x",
             "eigenstates": ["1x", "1y"], "role": "eavesdropping test"},
        ]
    }
