"""Command-line front end: ``tdqss run | deal | compile``.

Exit codes: 0 on success, 2 for bad flag combinations, 3 when the inputs
violate a protocol invariant (composite ``d`` for Shamir, non power-of-two
``d`` for the qubit backend, and so on).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .compiler import circuit_from_text, compile_protocol, run_compiled
from .errors import QuditError
from .protocol import (
    ProtocolConfig,
    ShadowSet,
    deal_shamir_random,
    expected_secret,
    make_shadows_random,
    make_shadows_shamir,
    run_tdqss,
)

SIG = 12


def _round(x: float) -> float:
    return float(f"{x:.{SIG}g}")


def _ints(text: str) -> List[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


@dataclass
class RunReport:
    config: dict
    distribution: List[float]
    reconstructed: int
    measurements: List[int]
    stages: Dict[str, list] = field(default_factory=dict)
    display: Optional[str] = None
    expected: Optional[int] = None
    elapsed_ms: Optional[float] = None

    @classmethod
    def from_result(cls, result, trace: bool = False, top: Optional[int] = None) -> "RunReport":
        cfg = result.config
        stages = {}
        if trace:
            for label, state in result.trace.items():
                terms = sorted(state.terms(), key=lambda kv: (-abs(kv[1]), kv[0]))
                if top is not None:
                    terms = terms[:top]
                stages[label] = [
                    {"digits": list(digits), "amplitude": [_round(a.real), _round(a.imag)]}
                    for digits, a in terms
                ]
        return cls(
            config={
                "d": cfg.d,
                "t": cfg.t,
                "shadows": list(cfg.shadows),
                "cnot": cfg.cnot_mode.value,
                "backend": cfg.backend.value,
                "seed": cfg.seed,
                "disentangle": result.disentangled,
            },
            distribution=[_round(float(p)) for p in result.distribution],
            reconstructed=int(result.reconstructed),
            measurements=list(result.measurements),
            stages=stages,
            display=result.display,
            expected=expected_secret(cfg.shadows),
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("stages", "display", "elapsed_ms"):
            if not out[key]:
                out.pop(key)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


def _fmt_amp(a) -> str:
    re, im = a
    return f"{re:+.6f}{im:+.6f}j"


def _plain_report(report: RunReport) -> str:
    cfg = report.config
    lines = [
        "d={d} t={t} shadows={s} cnot={cnot} backend={backend} seed={seed}".format(
            s=",".join(map(str, cfg["shadows"])), **cfg
        )
    ]
    if not cfg["disentangle"]:
        lines.append("disentanglement step skipped (diagnostic)")
    for label, terms in report.stages.items():
        lines.append(f"{label}:")
        for term in terms:
            ket = "|" + ",".join(map(str, term["digits"])) + ">"
            lines.append(f"  {_fmt_amp(term['amplitude'])} {ket}")
    lines.append("distribution(qudit 0): " + " ".join(f"{p:.6g}" for p in report.distribution))
    lines.append("measured: " + " ".join(map(str, report.measurements)))
    if report.display is not None:
        lines.append(f"display: {report.display}")
    if report.elapsed_ms is not None:
        lines.append(f"elapsed_ms: {report.elapsed_ms:.3f}")
    lines.append(str(report.reconstructed))
    return "\n".join(lines)


def _resolve_shadows(args, parser) -> List[int]:
    if args.shadows is not None and args.secret is not None:
        parser.error("give either --shadows or --secret/--seed, not both")
    if args.shadows is not None:
        if args.t is not None and args.t != len(args.shadows):
            raise _ConfigMismatch(f"--t {args.t} but {len(args.shadows)} shadows given")
        return args.shadows
    if args.secret is None:
        parser.error("one of --shadows or --secret is required")
    if args.seed is None or args.t is None:
        parser.error("--secret needs --t and --seed for random dealing")
    rng = np.random.default_rng(args.seed)
    return list(make_shadows_random(args.d, args.t, args.secret, rng))


class _ConfigMismatch(QuditError):
    pass


def cmd_run(args, parser) -> int:
    shadows = _resolve_shadows(args, parser)
    config = ProtocolConfig.create(
        args.d, shadows, cnot_mode=args.cnot, backend=args.backend, seed=args.seed or 0
    )
    start = time.perf_counter()
    if args.circuit is not None:
        if args.backend != "qubit":
            parser.error("--circuit requires --backend qubit")
        with open(args.circuit) as fh:
            circuit = circuit_from_text(fh.read())
        result = run_compiled(config, disentangle=not args.no_disentangle, circuit=circuit)
    else:
        result = run_tdqss(config, disentangle=not args.no_disentangle)
    elapsed = (time.perf_counter() - start) * 1e3

    report = RunReport.from_result(result, trace=args.trace, top=args.top)
    if args.json:
        if args.timing:
            report.elapsed_ms = elapsed
        print(report.to_json())
    else:
        report.elapsed_ms = elapsed
        print(_plain_report(report))
    return 0


def cmd_deal(args, parser) -> int:
    if args.mode == "shamir":
        if args.coeffs is not None:
            xs = args.xs if args.xs is not None else list(range(1, args.t + 1))
            shadow_set = make_shadows_shamir(args.d, args.secret, args.coeffs, xs)
        else:
            rng = np.random.default_rng(args.seed)
            shadow_set = deal_shamir_random(args.d, args.t, args.secret, rng, xs=args.xs)
    else:
        if args.xs is not None or args.coeffs is not None:
            parser.error("--xs/--coeffs only apply to --mode shamir")
        rng = np.random.default_rng(args.seed)
        shadow_set = make_shadows_random(args.d, args.t, args.secret, rng)
    if args.t is not None and shadow_set.t != args.t:
        raise _ConfigMismatch(f"--t {args.t} but {shadow_set.t} shadows were dealt")

    total = expected_secret(shadow_set)
    if args.json:
        print(json.dumps({"d": args.d, "mode": args.mode, "shadows": list(shadow_set), "sum": total}))
    else:
        print("shadows: " + ",".join(map(str, shadow_set)))
        print(f"sum mod {args.d}: {total}")
    return 0


def cmd_compile(args, parser) -> int:
    if args.t is not None and args.t != len(args.shadows):
        raise _ConfigMismatch(f"--t {args.t} but {len(args.shadows)} shadows given")
    config = ProtocolConfig.create(args.d, args.shadows, cnot_mode="xor", backend="qubit")
    circuit = compile_protocol(config, disentangle=not args.no_disentangle)
    text = circuit.to_text()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tdqss", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the reconstruction protocol")
    run.add_argument("--d", type=int, required=True)
    run.add_argument("--t", type=int)
    run.add_argument("--shadows", type=_ints)
    run.add_argument("--secret", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--cnot", choices=["add-sub", "xor"], default="add-sub")
    run.add_argument("--backend", choices=["qudit", "qubit"], default="qudit")
    run.add_argument("--trace", action="store_true", help="include per-stage amplitudes")
    run.add_argument("--top", type=int, help="keep only the N largest terms per stage")
    run.add_argument("--json", action="store_true")
    run.add_argument("--timing", action="store_true", help="add elapsed_ms to JSON output")
    run.add_argument("--circuit", help="simulate a circuit text file instead of compiling")
    run.add_argument(
        "--no-disentangle", action="store_true", help="diagnostic: skip the disentanglement CNOTs"
    )
    run.set_defaults(func=cmd_run)

    deal = sub.add_parser("deal", help="deal shadows for a secret")
    deal.add_argument("--d", type=int, required=True)
    deal.add_argument("--t", type=int)
    deal.add_argument("--secret", type=int, required=True)
    deal.add_argument("--mode", choices=["random", "shamir"], default="random")
    deal.add_argument("--xs", type=_ints)
    deal.add_argument("--coeffs", type=_ints)
    deal.add_argument("--seed", type=int, default=0)
    deal.add_argument("--json", action="store_true")
    deal.set_defaults(func=cmd_deal)

    comp = sub.add_parser("compile", help="emit the qubit circuit for d = 2**n")
    comp.add_argument("--d", type=int, required=True)
    comp.add_argument("--t", type=int)
    comp.add_argument("--shadows", type=_ints, required=True)
    comp.add_argument("--output", "-o")
    comp.add_argument("--no-disentangle", action="store_true")
    comp.set_defaults(func=cmd_compile)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "deal" and args.t is None and args.mode == "random":
        parser.error("--t is required for random dealing")
    if args.command == "deal" and args.mode == "shamir" and args.t is None and args.xs is None:
        parser.error("--t or --xs is required for shamir dealing")
    if args.command == "deal" and args.t is None:
        args.t = len(args.xs)
    try:
        return args.func(args, parser)
    except QuditError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
