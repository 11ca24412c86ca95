import math

import numpy as np
import pytest

from mziqkd.hilbert import UsageError, equal_up_to_global_phase
from mziqkd.optics import PortPolarization as PP
from mziqkd.optics import linear_basis, x_polarized, y_polarized
from mziqkd.source import PairState, SourceLabel, linear_form, product, psi_minus, psi_plus

S = 1 / math.sqrt(2)


def test_psi_plus_amplitudes():
    st = psi_plus()
    assert st.amplitude(PP.R1, PP.L1) == pytest.approx(S)
    assert st.amplitude(PP.L1, PP.R1) == pytest.approx(S)
    others = [abs(st.amplitude(a, b)) for a in PP for b in PP if (a, b) not in ((PP.R1, PP.L1), (PP.L1, PP.R1))]
    assert max(others) == 0.0
    assert abs(np.linalg.norm(st.amplitudes) - 1) <= 1e-12


def test_psi_plus_equals_linear_xx_minus_yy():
    x, y = x_polarized(), y_polarized()
    assert equal_up_to_global_phase(psi_plus().amplitudes, S * (np.kron(x, x) - np.kron(y, y)))


def test_psi_minus():
    st = psi_minus()
    assert st.amplitude(PP.R1, PP.L1) == pytest.approx(S)
    assert st.amplitude(PP.L1, PP.R1) == pytest.approx(-S)
    assert abs(np.vdot(psi_plus().amplitudes, st.amplitudes)) <= 1e-12
    a, a_perp = linear_basis(1.1)
    assert equal_up_to_global_phase(st.amplitudes, S * (np.kron(a_perp, a) - np.kron(a, a_perp)))


@pytest.mark.parametrize("alpha", [0.0, 0.3, math.pi / 2, 2.0])
def test_linear_form_psi_plus_exact(alpha):
    assert np.max(np.abs(linear_form(psi_plus(), alpha) - psi_plus().amplitudes)) <= 1e-12


def test_linear_form_psi_minus_exact():
    assert np.max(np.abs(linear_form(psi_minus(), 0.3) - psi_minus().amplitudes)) <= 1e-12


def expand_by_hand(alpha, sign):
    """Oracle: build |alpha>, |alpha_perp> from the adjoint formulas directly."""
    w = np.exp(-1j * alpha)
    par = 1j * (-1j * S * np.array([w, 1, 0, 0]))       # V^dag (i|2+>)
    perp = -(-S * np.array([w, -1, 0, 0]))              # V^dag (-|1+>)
    pre = np.exp(1j * alpha) * S
    if sign > 0:
        return pre * (np.kron(par, par) - np.kron(perp, perp))
    return pre * (np.kron(perp, par) - np.kron(par, perp))


def test_rotational_invariance_grid():
    for alpha in np.linspace(0, 2 * math.pi, 50):
        for state, sign in ((psi_plus(), 1), (psi_minus(), -1)):
            assert np.max(np.abs(linear_form(state, alpha) - state.amplitudes)) <= 1e-12
            assert np.max(np.abs(expand_by_hand(alpha, sign) - state.amplitudes)) <= 1e-12


def test_linear_form_rejects_other_states():
    with pytest.raises(UsageError):
        linear_form(product(PP.R1.ket(), PP.L1.ket()), 0.0)


def test_maximal_entanglement():
    for st in (psi_plus(), psi_minus()):
        for slot in (0, 1):
            p = st.slot_probabilities(slot)
            assert p[PP.R1] == pytest.approx(0.5, abs=1e-12)
            assert p[PP.L1] == pytest.approx(0.5, abs=1e-12)


def test_support_on_port_one_only():
    for st in (psi_plus(), psi_minus()):
        amps = st.amplitudes.reshape(4, 4)
        assert np.all(amps[2:, :] == 0) and np.all(amps[:, 2:] == 0)


def test_pair_state_validation():
    with pytest.raises(UsageError):
        PairState(np.zeros(16))
    with pytest.raises(UsageError):
        PairState(np.ones(4) / 2)
    st = product(PP.R1.ket(), PP.L1.ket())
    assert st.label is SourceLabel.PRODUCT
