import numpy as np
import pytest

from mziqkd import optics
from mziqkd.verify import CHECKS, cmd_verify, run_checks


def run_verify():
    lines = []
    code = cmd_verify(out=lines.append)
    return code, "\n".join(lines)


def failed_names(text):
    return {line.split()[1] for line in text.splitlines() if line.startswith("FAIL")}


def test_fresh_build_passes():
    code, text = run_verify()
    assert code == 0
    assert not failed_names(text)
    assert len({name for name, _, _ in CHECKS}) >= 12
    assert all(r.passed for r in run_checks())


def perturbed_constant(name, i, j, delta=1e-6):
    m = np.array(getattr(optics, name))
    m[i, j] += delta
    m.setflags(write=False)
    return m


ENTRIES = [(i, j) for i in range(4) for j in range(4)]


@pytest.mark.parametrize("i,j", ENTRIES)
@pytest.mark.parametrize("const,eq", [
    ("POLARIZING_BEAM_SPLITTER", "Eq9"),
    ("HALF_WAVE_PLATE", "Eq10"),
    ("SYMMETRIC_MIRROR", "Eq12"),
])
def test_fault_in_stored_component(monkeypatch, const, eq, i, j):
    monkeypatch.setattr(optics, const, perturbed_constant(const, i, j))
    code, text = run_verify()
    assert code != 0
    assert eq in failed_names(text)


@pytest.mark.parametrize("i,j", ENTRIES)
def test_fault_in_phase_shifter(monkeypatch, i, j):
    good = optics.phase_shifter

    def bad(alpha):
        m = np.array(good(alpha))
        m[i, j] += 1e-6
        return m

    monkeypatch.setattr(optics, "phase_shifter", bad)
    code, text = run_verify()
    assert code != 0 and "Eq11" in failed_names(text)


@pytest.mark.parametrize("i,j", ENTRIES)
def test_fault_in_closed_form(monkeypatch, i, j):
    good = optics.closed_form_interferometer

    def bad(alpha):
        m = np.array(good(alpha))
        m[i, j] += 1e-6
        return m

    monkeypatch.setattr(optics, "closed_form_interferometer", bad)
    code, text = run_verify()
    assert code != 0 and "Eq13" in failed_names(text)


@pytest.mark.parametrize("i,j", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_fault_in_ev_splitter(monkeypatch, i, j):
    m = np.array(optics.EV_BEAM_SPLITTER)
    m[i, j] += 1e-6
    monkeypatch.setattr(optics, "EV_BEAM_SPLITTER", m)
    code, text = run_verify()
    assert code != 0 and failed_names(text) & {"Eq3", "Eq4"}


def test_sign_flip_in_closed_form_names_eq13(monkeypatch):
    good = optics.closed_form_interferometer

    def bad(alpha):
        m = np.array(good(alpha))
        m[0, 0] = -m[0, 0]
        return m

    monkeypatch.setattr(optics, "closed_form_interferometer", bad)
    code, text = run_verify()
    assert code != 0
    assert "Eq13" in failed_names(text)
    assert "FAILED:" in text and "Eq13" in text.splitlines()[-1]
