"""Algebraic identity suite.

Each check is named after the printed equation it certifies and reports the
largest entrywise deviation it found.  Component matrices are looked up
through the ``optics`` module at call time, so a corrupted entry anywhere in
the stored matrices makes the corresponding check fail.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import optics
from .hilbert import TOL, apply, basis, dagger, max_abs_diff, projector, tensor, unitarity_defect
from .measurement import coincidence_probability
from .optics import PortPolarization as PP
from .source import linear_form_defect, psi_minus, psi_plus

_S = 1.0 / math.sqrt(2.0)
_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)

# phases used by the per-alpha checks; include the special points
ALPHA_GRID = [0.0, math.pi / 3, math.pi / 2, math.pi, 1.1, 2.0, 4.0, 5.9] + [
    2 * math.pi * k / 20 + 0.05 for k in range(20)
]


@dataclass
class CheckResult:
    name: str
    description: str
    deviation: float
    error: str = ""

    @property
    def passed(self) -> bool:
        return not self.error and self.deviation <= TOL

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        detail = self.error or f"max_dev={self.deviation:.3e}"
        return f"{status}  {self.name:<9} {detail:<22} {self.description}"


def _ket(label: PP) -> np.ndarray:
    return label.ket()


def check_eq3() -> float:
    out = apply(optics.ev_interferometer(), basis(2, 0))
    return max_abs_diff(out, _S * np.array([1j, 1]))


def check_eq4() -> float:
    u = optics.ev_interferometer()
    return max(max_abs_diff(u @ u, 1j * _SIGMA_X), unitarity_defect(u))


def check_eq5() -> float:
    dev = 0.0
    for a, b in [(1, 0), (0, 1), (0.6, 0.8j), (_S, -_S)]:
        out = apply(optics.polarizing_beam_splitter(), np.array([a, b, 0, 0], dtype=complex))
        dev = max(dev, max_abs_diff(out, [1j * a, 0, 0, b]))
    return dev


def check_eq9() -> float:
    u = optics.polarizing_beam_splitter()
    # port-2 inputs as printed: 2+ -> 1-, 2- -> 2+
    dev = max(max_abs_diff(u @ _ket(PP.R2), _ket(PP.L1)), max_abs_diff(u @ _ket(PP.L2), _ket(PP.R2)))
    return max(dev, unitarity_defect(u), check_eq5())


def check_eq10() -> float:
    h = optics.half_wave_plate()
    expected = {PP.R1: PP.R1, PP.L1: PP.L1, PP.R2: PP.L2, PP.L2: PP.R2}
    dev = max(max_abs_diff(h @ _ket(i), _ket(o)) for i, o in expected.items())
    return max(dev, max_abs_diff(h @ h, np.eye(4)))


def check_eq11() -> float:
    dev = 0.0
    for a in ALPHA_GRID:
        m = optics.phase_shifter(a)
        w = cmath.exp(1j * a)
        for lab in optics.LABELS:
            factor = w if lab.port == 1 else 1.0
            dev = max(dev, max_abs_diff(m @ _ket(lab), factor * _ket(lab)))
        dev = max(dev, unitarity_defect(m))
    return dev


def check_eq12() -> float:
    m = optics.symmetric_mirror()
    ev = _S * np.array([[1j, 1], [1, 1j]])
    plus, minus = [0, 2], [1, 3]
    dev = max(
        max_abs_diff(m[np.ix_(plus, plus)], ev),
        max_abs_diff(m[np.ix_(minus, minus)], ev),
        max_abs_diff(m[np.ix_(plus, minus)], np.zeros((2, 2))),
        max_abs_diff(m[np.ix_(minus, plus)], np.zeros((2, 2))),
        unitarity_defect(m),
    )
    sq = m @ m
    dev = max(dev, max_abs_diff(sq[np.ix_(plus, plus)], 1j * _SIGMA_X))
    return dev


def check_eq13() -> float:
    grid = ALPHA_GRID + [2 * math.pi * k / 100 for k in range(100)]
    dev = 0.0
    for a in grid:
        closed = optics.closed_form_interferometer(a)
        dev = max(dev, max_abs_diff(optics.composed_interferometer(a), closed), unitarity_defect(closed))
    return dev


def _adjoint_check(out_label: PP, expected: Callable[[complex], list]) -> float:
    dev = 0.0
    for a in ALPHA_GRID:
        vd = dagger(optics.interferometer(a))
        dev = max(dev, max_abs_diff(vd @ _ket(out_label), expected(cmath.exp(-1j * a))))
    return dev


def check_eq14() -> float:
    return _adjoint_check(PP.R1, lambda w: -_S * np.array([w, -1, 0, 0]))


def check_eq15() -> float:
    return _adjoint_check(PP.L1, lambda w: -1j * _S * np.array([0, 0, w, 1j]))


def check_eq16() -> float:
    return _adjoint_check(PP.R2, lambda w: -1j * _S * np.array([w, 1, 0, 0]))


def check_eq17() -> float:
    return _adjoint_check(PP.L2, lambda w: _S * np.array([0, 0, w, -1j]))


def check_eq6_7() -> float:
    v0 = optics.interferometer(0.0)
    x = _S * np.array([1, 1, 0, 0])
    y = _S * np.array([-1, 1, 0, 0])
    return max(max_abs_diff(v0 @ x, 1j * _ket(PP.R2)), max_abs_diff(v0 @ y, _ket(PP.R1)))


def check_eq18_19() -> float:
    a0, a0_perp = optics.linear_basis(0.0)
    dev = max(max_abs_diff(a0, optics.x_polarized()), max_abs_diff(a0_perp, -optics.y_polarized()))
    for a in ALPHA_GRID:
        v = optics.interferometer(a)
        par, perp = optics.linear_basis(a)
        dev = max(dev, max_abs_diff(v @ par, 1j * _ket(PP.R2)), max_abs_diff(v @ perp, -_ket(PP.R1)))
        dev = max(dev, abs(np.vdot(par, perp)))
    return dev


def check_eq24_25() -> float:
    x, y = optics.x_polarized(), optics.y_polarized()
    linear = _S * (np.kron(x, x) - np.kron(y, y))
    circular = _S * (np.kron(_ket(PP.R1), _ket(PP.L1)) + np.kron(_ket(PP.L1), _ket(PP.R1)))
    return max(max_abs_diff(linear, circular), max_abs_diff(psi_plus().amplitudes, circular))


def check_eq21() -> float:
    state = psi_plus()
    return max(linear_form_defect(state, 2 * math.pi * k / 50) for k in range(50))


def check_eq22() -> float:
    state = psi_minus()
    return max(linear_form_defect(state, 2 * math.pi * k / 50) for k in range(50))


def check_eq23() -> float:
    """Projector expectation vs 1/2 cos^2((a-b)/2) on a 30x30 grid."""
    psi = psi_plus().amplitudes
    ports = (PP.R1, PP.R2)
    proj = {lab: projector(_ket(lab)) for lab in ports}
    grid = [2 * math.pi * k / 30 for k in range(30)]
    dev = 0.0
    for a in grid:
        va = optics.interferometer(a)
        for b in grid:
            out = tensor(va, optics.interferometer(b)) @ psi
            for pa in ports:
                for pb in ports:
                    p = float(np.real(np.vdot(out, tensor(proj[pa], proj[pb]) @ out)))
                    dev = max(dev, abs(p - coincidence_probability(a, b, (pa, pb))))
            same = 0.5 * math.cos((a - b) / 2) ** 2
            dev = max(dev, abs(coincidence_probability(a, b, (PP.R1, PP.R1)) - same))
    return dev


CHECKS: list[tuple[str, str, Callable[[], float]]] = [
    ("Eq3", "EV splitter: U|1> = (i|1> + |2>)/sqrt2", check_eq3),
    ("Eq4", "EV interferometer: U^2 = i sigma_x", check_eq4),
    ("Eq5", "analyzer on port 1: (A,B) -> iA|1+> + B|2->", check_eq5),
    ("Eq9", "polarizing beam splitter matrix, unitary", check_eq9),
    ("Eq10", "half-wave plate swaps 2+ <-> 2-", check_eq10),
    ("Eq11", "phase shifter multiplies port 1 by e^{ia}", check_eq11),
    ("Eq12", "symmetric mirror = EV splitter per polarization", check_eq12),
    ("Eq13", "composed V_a equals closed form", check_eq13),
    ("Eq14", "V_a^dag |1+> formula", check_eq14),
    ("Eq15", "V_a^dag |1-> formula", check_eq15),
    ("Eq16", "V_a^dag |2+> formula", check_eq16),
    ("Eq17", "V_a^dag |2-> formula", check_eq17),
    ("Eq6-7", "V_0|1x> = i|2+>, V_0|1y> = |1+>", check_eq6_7),
    ("Eq18-19", "linear basis |a>, |a_perp>; |0> = |1x>", check_eq18_19),
    ("Eq24-25", "psi+ linear form equals circular form", check_eq24_25),
    ("Eq21", "psi+ in the linear basis, any alpha", check_eq21),
    ("Eq22", "psi- in the linear basis, any alpha", check_eq22),
    ("Eq23", "coincidence law on a 30x30 phase grid", check_eq23),
]


def run_checks() -> list[CheckResult]:
    results = []
    for name, desc, fn in CHECKS:
        try:
            dev = fn()
            results.append(CheckResult(name, desc, dev))
        except Exception as exc:  # a broken matrix may raise instead of deviating
            results.append(CheckResult(name, desc, math.inf, f"error: {exc}"))
    return results


def cmd_verify(out=print) -> int:
    results = run_checks()
    for r in results:
        out(r.line())
    failed = [r.name for r in results if not r.passed]
    out(f"{len(results)} checks, {len(failed)} failed")
    if failed:
        out("FAILED: " + ", ".join(failed))
        return 1
    return 0
