"""Command-line front end: verify, run, bell, coincidence-scan.

Exit codes: 0 success / clean session, 1 verify failure, 2 eavesdropper
detected, 3 session aborted, 64 usage error.

All angles are interferometer phases in radians.  The polarization plane an
interferometer analyzes is half its phase; human-readable output shows both.
"""
from __future__ import annotations

import argparse
import math
import os
import re
import sys

import numpy as np

from . import report as fmt
from .adversary import parse_attack
from .hilbert import UsageError
from .measurement import (
    JOINT_LABELS,
    Apparatus,
    chsh,
    coincidence_probability,
    pair_distribution,
    sample_many,
)
from .optics import PortPolarization as PP
from .optics import phase_to_plane
from .protocol import SessionConfig, Verdict, run_session
from .rng import RngStream
from .source import SourceLabel, psi_plus
from .verify import cmd_verify

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_DETECTED = 2
EXIT_ABORTED = 3
EXIT_USAGE = 64

SEED_ENV = "MZI_QKD_SEED"
DEFAULT_ANGLES = (0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4)

_PI_EXPR = re.compile(r"^\s*([+-]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_angle(text: str) -> float:
    """A float, or a multiple of pi such as ``pi/4``, ``3pi/4``, ``-0.5*pi``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_EXPR.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}")
    coef = m.group(1)
    if coef in ("", "+"):
        k = 1.0
    elif coef == "-":
        k = -1.0
    else:
        k = float(coef)
    div = float(m.group(2)) if m.group(2) else 1.0
    if div == 0.0:
        raise argparse.ArgumentTypeError(f"division by zero in {text!r}")
    return k * math.pi / div


def _angles(text: str) -> tuple[float, ...]:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected four comma-separated angles a,a',b,b'")
    return tuple(parse_angle(p) for p in parts)


def _grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be start:stop:steps")
    start, stop = parse_angle(parts[0]), parse_angle(parts[1])
    try:
        steps = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"steps must be an integer, got {parts[2]!r}") from None
    if steps < 1:
        raise argparse.ArgumentTypeError("steps must be at least 1")
    return np.linspace(start, stop, steps)


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _open_unit(text: str) -> float:
    x = float(text)
    if not 0.0 < x < 1.0:
        raise argparse.ArgumentTypeError("must lie strictly between 0 and 1")
    return x


def _threshold(text: str) -> float:
    x = float(text)
    if not 0.0 <= x < 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1)")
    return x


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mzi-qkd", description="Polarizing Mach-Zehnder QKD simulator")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("verify", help="run the algebraic identity suite")

    r = sub.add_parser("run", help="simulate a key-distribution session")
    r.add_argument("--pairs", type=_positive_int, default=100_000)
    r.add_argument("--attack", choices=["none", "intercept", "nasty", "block"], default="none")
    r.add_argument("--plane", type=parse_angle, default=0.0,
                   help="polarization plane (radians) of the photons the nasty attack forwards")
    r.add_argument("--block-side", choices=["alice", "bob"], default="alice")
    r.add_argument("--block-path", choices=["upper", "lower"], default="upper")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--sacrifice", type=_open_unit, default=0.25)
    r.add_argument("--threshold", type=_threshold, default=0.05)
    r.add_argument("--source", choices=["psi+", "psi-"], default="psi+")
    r.add_argument("--format", choices=["json", "csv", "human"], default="json")
    r.add_argument("--workers", type=_positive_int, default=1)

    b = sub.add_parser("bell", help="CHSH correlations for psi+")
    b.add_argument("--mode", choices=["exact", "sample"], default="exact")
    b.add_argument("--pairs", type=_positive_int, default=100_000, help="pairs per setting (sample mode)")
    b.add_argument("--angles", type=_angles, default=DEFAULT_ANGLES, help="phases a,a',b,b' in radians")
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--format", choices=["json", "csv", "human"], default="json")

    c = sub.add_parser("coincidence-scan", help="joint port probabilities against the closed form")
    c.add_argument("--alpha-grid", type=_grid, default=_grid("0:2pi:9"))
    c.add_argument("--beta", type=parse_angle, default=0.0)
    c.add_argument("--format", choices=["csv", "json"], default="csv")
    return p


# --- run -------------------------------------------------------------------

def _human_report(d: dict) -> str:
    cfg = d["config"]
    lines = [
        f"pairs           {cfg['n_pairs']}  (source {cfg['source']}, seed {cfg['seed']})",
        f"attack          {cfg['attack']['kind']}",
        "counts          " + "  ".join(f"{k}={v}" for k, v in d["counts"].items()),
    ]
    for name in ("linear_test", "circular_test"):
        t = d[name]
        q = "undefined" if t["qber"] is None else f"{t['qber']:.6f}"
        lines.append(f"{name:<15} {t['mismatches']}/{t['tested']}  qber={q}")
    key = d["key"]
    rate = "undefined" if key["agreement_rate"] is None else f"{key['agreement_rate']:.6f}"
    lines.append(f"key             {key['length']} bits, agreement {rate}")
    if d["eve"]["present"]:
        kr = d["eve"]["knowledge_rate"]
        lines.append("eve knowledge   " + ("undefined" if kr is None else f"{kr:.6f}"))
    lines.append("interferometers V_0 (phase 0, analyzes plane 0 = x)")
    lines.append(f"verdict         {d['verdict']}")
    return "\n".join(lines) + "\n"


def cmd_run(args) -> int:
    config = SessionConfig(
        n_pairs=args.pairs,
        attack=parse_attack(args.attack, args.plane, args.block_side, args.block_path),
        seed=resolve_seed(args.seed),
        sacrifice_fraction=args.sacrifice,
        abort_qber_threshold=args.threshold,
        source=SourceLabel(args.source),
    )
    rep = run_session(config, workers=args.workers)
    d = rep.to_dict()
    if args.format == "json":
        sys.stdout.write(fmt.dumps(d) + "\n")
    elif args.format == "csv":
        sys.stdout.write(fmt.to_csv([fmt.flatten(d)]))
    else:
        sys.stdout.write(_human_report(d))
    return {Verdict.CLEAN: EXIT_OK, Verdict.DETECTED: EXIT_DETECTED, Verdict.ABORTED: EXIT_ABORTED}[rep.verdict]


# --- bell ------------------------------------------------------------------

def sampled_correlation(alpha: float, beta: float, pairs: int, rng: RngStream) -> float:
    dist = pair_distribution(psi_plus(), Apparatus.interferometer(alpha), Apparatus.interferometer(beta))
    idx = sample_many(dist, rng, pairs)
    counts = np.bincount(idx, minlength=len(JOINT_LABELS))
    same = diff = 0
    for i, (pa, pb) in enumerate(JOINT_LABELS):
        if pa.right_handed and pb.right_handed:
            if pa is pb:
                same += counts[i]
            else:
                diff += counts[i]
    return float(same - diff) / pairs


def bell_result(mode: str, angles, pairs: int = 100_000, seed: int = 0) -> dict:
    if mode == "exact":
        es, s = chsh(angles)
    else:
        # chsh evaluates the four settings in a fixed order; setting j reads stream j
        streams = iter(range(4))
        es, s = chsh(angles, lambda a, b: sampled_correlation(a, b, pairs, RngStream(seed, next(streams))))
    names = [("a", "b"), ("a", "b'"), ("a'", "b"), ("a'", "b'")]
    values = [(angles[0], angles[2]), (angles[0], angles[3]), (angles[1], angles[2]), (angles[1], angles[3])]
    return {
        "mode": mode,
        "pairs": pairs if mode == "sample" else None,
        "seed": seed if mode == "sample" else None,
        "correlations": [
            {"setting": f"{na},{nb}", "alpha": a, "beta": b, "E": e}
            for (na, nb), (a, b), e in zip(names, values, es)
        ],
        "S": s,
        "classical_bound": 2.0,
        "violation": s > 2.0,
    }


def cmd_bell(args) -> int:
    res = bell_result(args.mode, args.angles, args.pairs, resolve_seed(args.seed))
    if args.format == "json":
        sys.stdout.write(fmt.dumps(res) + "\n")
    elif args.format == "csv":
        rows = [{"setting": c["setting"], "alpha": c["alpha"], "beta": c["beta"], "E": c["E"]}
                for c in res["correlations"]]
        rows.append({"setting": "S", "alpha": None, "beta": None, "E": res["S"]})
        sys.stdout.write(fmt.to_csv(rows))
    else:
        lines = [f"CHSH ({res['mode']}" + (f", {res['pairs']} pairs per setting" if res["pairs"] else "") + ")"]
        for c in res["correlations"]:
            lines.append(
                f"  E({c['setting']:<5}) alpha={c['alpha']:.6f} (plane {phase_to_plane(c['alpha']):.6f})"
                f"  beta={c['beta']:.6f} (plane {phase_to_plane(c['beta']):.6f})  E={c['E']:+.6f}"
            )
        lines.append(f"  S = {fmt.fmt_float(res['S'])}  (classical bound 2, violated: {res['violation']})")
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


# --- coincidence scan --------------------------------------------------------

_SCAN_CELLS = [("P(1+,1+)", (PP.R1, PP.R1)), ("P(2+,2+)", (PP.R2, PP.R2)),
               ("P(1+,2+)", (PP.R1, PP.R2)), ("P(2+,1+)", (PP.R2, PP.R1))]


def coincidence_rows(alphas, beta: float) -> list[dict]:
    rows = []
    for a in alphas:
        a = float(a)
        dist = pair_distribution(psi_plus(), Apparatus.interferometer(a), Apparatus.interferometer(beta))
        row = {"alpha": a, "beta": beta}
        err = 0.0
        for name, joint in _SCAN_CELLS:
            row[name] = dist[joint]
            err = max(err, abs(dist[joint] - coincidence_probability(a, beta, joint)))
        row["analytic_value"] = 0.5 * math.cos((a - beta) / 2) ** 2
        row["abs_error"] = err
        rows.append(row)
    return rows


def cmd_coincidence_scan(args) -> int:
    rows = coincidence_rows(args.alpha_grid, args.beta)
    if args.format == "csv":
        sys.stdout.write(fmt.to_csv(rows))
    else:
        sys.stdout.write(fmt.dumps({"rows": rows}) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify()
        if args.command == "run":
            return cmd_run(args)
        if args.command == "bell":
            return cmd_bell(args)
        return cmd_coincidence_scan(args)
    except UsageError as exc:
        print(f"mzi-qkd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
