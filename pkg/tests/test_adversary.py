import math
from collections import Counter

import numpy as np
import pytest

from mziqkd.adversary import (
    InterceptResendCircular,
    NastySendLinear,
    NoAttack,
    Path,
    PathBlock,
    Side,
    apply_attack,
    attack_ensemble,
    detection_probability,
    ensemble_mismatch_probability,
    parse_attack,
)
from mziqkd.measurement import Apparatus, TestKind, is_mismatch, pair_distribution
from mziqkd.optics import PortPolarization as PP
from mziqkd.optics import x_polarized
from mziqkd.rng import RngStream
from mziqkd.source import SourceLabel, product, psi_minus, psi_plus

from conftest import three_sigma

MODELS = [
    NoAttack(),
    InterceptResendCircular(),
    NastySendLinear(0.0),
    PathBlock(Side.ALICE, Path.UPPER),
    PathBlock(Side.BOB, Path.LOWER),
]


def test_no_attack_is_identity():
    st = psi_plus()
    res = apply_attack(NoAttack(), st, RngStream(0, 0))
    assert np.array_equal(res.delivered.amplitudes, st.amplitudes)
    assert res.eve_bits is None and not res.lost
    for k in range(10):
        assert np.array_equal(apply_attack(NoAttack(), st, RngStream(0, k)).delivered.amplitudes, st.amplitudes)


def test_intercept_resend_delivers_anticorrelated_products():
    # oracle: the only nonzero squared amplitudes of psi+ are (1+,1-) and (1-,1+)
    weights = np.abs(psi_plus().amplitudes.reshape(4, 4)) ** 2
    support = {(PP.from_index(i), PP.from_index(j)) for i, j in zip(*np.nonzero(weights))}
    assert support == {(PP.R1, PP.L1), (PP.L1, PP.R1)}

    seen = Counter()
    n = 20_000
    for k in range(n):
        res = apply_attack(InterceptResendCircular(), psi_plus(), RngStream(3, k))
        a, b = res.eve_bits
        assert (a, b) in support
        assert np.array_equal(res.delivered.amplitudes, product(a.ket(), b.ket()).amplitudes)
        seen[(a, b)] += 1
    assert abs(seen[(PP.R1, PP.L1)] / n - 0.5) <= three_sigma(0.5, n)


def test_nasty_always_delivers_xx():
    xx = np.kron(x_polarized(), x_polarized())
    for k in range(200):
        res = apply_attack(NastySendLinear(0.0), psi_plus(), RngStream(1, k))
        assert np.max(np.abs(res.delivered.amplitudes - xx)) <= 1e-12
        assert res.eve_bits in {(PP.R1, PP.L1), (PP.L1, PP.R1)}


def test_path_block_removes_the_right_component():
    # upper arm carries right-handed light: blocking it leaves Alice's photon left-handed
    br = attack_ensemble(PathBlock(Side.ALICE, Path.UPPER), psi_plus())
    kept = [b for b in br if not b.result.lost][0]
    assert kept.probability == pytest.approx(0.5, abs=1e-12)
    assert np.max(np.abs(kept.result.delivered.amplitudes - product(PP.L1.ket(), PP.R1.ket()).amplitudes)) <= 1e-12
    br = attack_ensemble(PathBlock(Side.BOB, Path.LOWER), psi_plus())
    kept = [b for b in br if not b.result.lost][0]
    assert np.max(np.abs(kept.result.delivered.amplitudes - product(PP.L1.ket(), PP.R1.ket()).amplitudes)) <= 1e-12


def test_path_block_loss_rate():
    n = 20_000
    lost = sum(apply_attack(PathBlock(), psi_plus(), RngStream(9, k)).lost for k in range(n))
    assert abs(lost / n - 0.5) <= three_sigma(0.5, n)


def test_only_path_block_loses_photons():
    for m in MODELS:
        for br in attack_ensemble(m, psi_plus()):
            if br.result.lost:
                assert isinstance(m, PathBlock)
            else:
                assert abs(np.linalg.norm(br.result.delivered.amplitudes) - 1) <= 1e-12
            assert (br.result.eve_bits is not None) == isinstance(m, (InterceptResendCircular, NastySendLinear))


def test_ensembles_are_normalized():
    for m in MODELS:
        for st in (psi_plus(), psi_minus()):
            assert sum(b.probability for b in attack_ensemble(m, st)) == pytest.approx(1.0, abs=1e-12)


def oracle_detection(model, test):
    """Brute force: Born rule on each delivered state, weighted by the ensemble."""
    app = Apparatus.interferometer(0.0) if test is TestKind.LINEAR else Apparatus.circular()
    num = den = 0.0
    for br in attack_ensemble(model, psi_plus()):
        if br.result.lost:
            continue
        d = pair_distribution(br.result.delivered, app, app)
        num += br.probability * sum(p for (a, b), p in d.as_dict().items()
                                    if is_mismatch(test, a, b, SourceLabel.PSI_PLUS))
        den += br.probability
    return num / den


@pytest.mark.parametrize("model,test,expected", [
    (NoAttack(), TestKind.LINEAR, 0.0),
    (NoAttack(), TestKind.CIRCULAR, 0.0),
    (InterceptResendCircular(), TestKind.LINEAR, 0.5),
    (InterceptResendCircular(), TestKind.CIRCULAR, 0.0),
    (NastySendLinear(0.0), TestKind.LINEAR, 0.0),
    (NastySendLinear(0.0), TestKind.CIRCULAR, 0.5),
    (PathBlock(Side.ALICE, Path.UPPER), TestKind.LINEAR, 0.5),
    (PathBlock(Side.ALICE, Path.UPPER), TestKind.CIRCULAR, 0.0),
])
def test_detection_table(model, test, expected):
    assert oracle_detection(model, test) == pytest.approx(expected, abs=1e-12)
    assert detection_probability(model, test) == pytest.approx(expected, abs=1e-12)


def test_intercept_linear_product_state_oracle():
    d = pair_distribution(product(PP.R1.ket(), PP.L1.ket()), Apparatus.interferometer(0), Apparatus.interferometer(0))
    for a in (PP.R1, PP.R2):
        for b in (PP.R1, PP.R2):
            assert d[(a, b)] == pytest.approx(0.25, abs=1e-12)


@pytest.mark.parametrize("plane", [0.2, math.pi / 8, math.pi / 4, 1.3])
def test_nasty_off_axis_closed_form_matches_ensemble(plane):
    m = NastySendLinear(plane)
    for test in TestKind:
        assert detection_probability(m, test) == pytest.approx(ensemble_mismatch_probability(m, test), abs=1e-12)


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("test", list(TestKind))
def test_monte_carlo_detection_rates(model, test):
    n = 100_000
    app = Apparatus.interferometer(0.0) if test is TestKind.LINEAR else Apparatus.circular()
    st = psi_plus()
    mismatches = tested = 0
    for k in range(n):
        rs = RngStream(77, k)
        res = apply_attack(model, st, rs)
        if res.lost:
            continue
        a, b = _fast_sample(res.delivered, app, rs)
        tested += 1
        mismatches += is_mismatch(test, a, b)
    p = detection_probability(model, test)
    assert abs(mismatches / tested - p) <= three_sigma(p, tested) + 1e-12


def _fast_sample(state, app, rs):
    from mziqkd.measurement import JOINT_LABELS, pair_cdf, sample_index

    return JOINT_LABELS[sample_index(pair_cdf(state, app, app), rs.uniform())]


def test_parse_attack():
    assert parse_attack("none") == NoAttack()
    assert parse_attack("nasty", 0.5) == NastySendLinear(0.5)
    assert parse_attack("block", side="bob", path="lower") == PathBlock(Side.BOB, Path.LOWER)
