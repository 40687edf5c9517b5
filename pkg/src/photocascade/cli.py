"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 resource cap exceeded, 4 conditioning on a
zero-probability outcome, 5 validation or completeness failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from photocascade.errors import (
    InvalidArgumentError,
    ResourceLimitError,
    UnachievableTargetError,
    ZeroProbabilityError,
)
from photocascade.nport import build_symmetric_nport, extend_with_loss
from photocascade.povm import (
    INF,
    COMPLETENESS_TOL,
    PreparationEnsemble,
    build_cascade_povm,
    check_completeness,
    confinput_ensemble,
    device_confidence,
    downconverter_ensemble,
    iter_devices,
    maximal_ensemble,
    parse_modes,
)
from photocascade.statistics import (
    ClickDistribution,
    as_fraction,
    click_distribution,
    closed_form_pkk,
    format_number,
    monte_carlo_clicks,
)
from photocascade import validation

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE, EXIT_ZERO_PROB, EXIT_VALIDATION = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _efficiency(text: str) -> Fraction:
    try:
        eta = as_fraction(text)
    except InvalidArgumentError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not 0 <= eta <= 1:
        raise argparse.ArgumentTypeError(f"efficiency must lie in [0, 1], got {text}")
    return eta


def _modes(text: str) -> int | float:
    try:
        return parse_modes(text)
    except InvalidArgumentError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_output_flags(p: argparse.ArgumentParser, formats: Sequence[str], default: str) -> None:
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--output", metavar="PATH", help="write to PATH instead of standard output")
    p.add_argument("--precision", type=int, default=10, help="significant digits (default 10)")
    p.add_argument("--exact", action="store_true", help='print rationals as "p/q" where available')


def _load_ensemble(args) -> PreparationEnsemble:
    if args.state:
        return PreparationEnsemble.load(args.state)
    name, _, param = args.benchmark.partition(":")
    if name == "maximal":
        return maximal_ensemble()
    if name == "downconverter":
        return downconverter_ensemble(param or "1/10")
    if name == "confinput":
        return confinput_ensemble(param or "1")
    raise UsageError(f"unknown benchmark {args.benchmark!r}")


# --- prob -----------------------------------------------------------------

def cmd_prob(args) -> int:
    N, m, eta = args.modes, args.photons, args.efficiency
    if N == INF:
        raise UsageError("prob needs a finite --modes")
    if args.clicks is not None and not 0 <= args.clicks <= N:
        raise UsageError(f"--clicks must lie in [0, {N}]")
    if args.dump_unitary:
        with open(args.dump_unitary, "w", encoding="utf-8") as fh:
            fh.write(extend_with_loss(build_symmetric_nport(N), eta).to_json(indent=2) + "\n")

    if args.method == "montecarlo":
        dist = monte_carlo_clicks(N, float(eta), m, args.trials, args.seed)
    elif args.method == "closed" and m > 2:
        if args.clicks != m:
            raise UsageError("closed forms beyond two photons exist only for --clicks equal to --photons")
        dist = ClickDistribution(N, eta, m, {(m, m): closed_form_pkk(N, m, eta)}, "closed",
                                 photon_numbers=(m,))
    else:
        full = click_distribution(N, eta, m, args.method, composition_cap=args.max_compositions)
        dist = ClickDistribution(N, eta, m, {km: p for km, p in full.table.items() if km[1] == m},
                                 args.method, photon_numbers=(m,))

    if args.clicks is not None:
        dist = ClickDistribution(N, eta, m, {(args.clicks, m): dist.prob(args.clicks, m)},
                                 dist.method, dist.trials, dist.seed, photon_numbers=(m,))
        ks = [args.clicks]
    else:
        ks = list(range(min(m, N) + 1))

    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "eta_sq", "m", "k", "probability", "method"])
        for k in ks:
            w.writerow([N, format_number(eta, args.precision, args.exact), m, k,
                        format_number(dist.prob(k, m), args.precision, args.exact), dist.method])
        text = buf.getvalue()
    elif args.format == "json":
        text = dist.to_json(args.exact, indent=2) + "\n"
    else:
        lines = [format_number(dist.prob(k, m), args.precision, args.exact) for k in ks]
        if len(ks) > 1:
            lines = [f"{k}\t{v}" for k, v in zip(ks, lines)]
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_OK


# --- confidence -------------------------------------------------------------

def cmd_confidence(args) -> int:
    ensemble = _load_ensemble(args)
    report = device_confidence(ensemble, args.device, args.efficiency, args.clicks, args.target_m)
    if args.format == "csv":
        text = report.to_csv(args.precision, args.exact)
    else:
        text = report.to_json(args.precision, args.exact, indent=2) + "\n"
    _emit(text, args.output)
    return EXIT_OK


# --- sweep ------------------------------------------------------------------

def _grid(args) -> list:
    if args.values:
        return [as_fraction(v) for v in args.values.split(",")]
    lo, hi = as_fraction(args.start), as_fraction(args.stop)
    if not lo < hi:
        raise UsageError("--from must be smaller than --to")
    if args.parameter == "modes":
        return list(range(int(lo), int(hi) + 1))
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    return [lo + (hi - lo) * i / (args.steps - 1) for i in range(args.steps)]


def sweep_rows(args) -> tuple[list[str], list[list], int]:
    """Rows sorted by (N, swept value); points whose conditioning event is impossible are skipped."""
    grid = _grid(args)
    rows, skipped = [], 0
    if args.parameter == "modes":
        ensemble = _load_ensemble(args)
        header = ["eta_sq", "N", "confidence"]
        points = [(parse_modes(N), None, args.efficiency) for N in grid]
    else:
        devices = iter_devices(args.devices)
        if args.parameter == "efficiency":
            ensemble = _load_ensemble(args)
            header = ["eta_sq", "N", "confidence"]
            points = [(N, None, x) for N in devices for x in grid]
        else:
            ensemble = None
            header = ["delta", "eta_sq", "N", "confidence"]
            points = [(N, x, args.efficiency) for N in devices for x in grid]
    points.sort(key=lambda p: (p[0], p[1] if p[1] is not None else 0, p[2]))
    for N, delta, eta in points:
        ens = ensemble if delta is None else confinput_ensemble(delta)
        device = f"cascade:{'inf' if N == INF else N}"
        try:
            C = device_confidence(ens, device, eta, args.clicks, args.target_m).confidence
        except ZeroProbabilityError:
            skipped += 1
            continue
        row = [eta, "inf" if N == INF else N, C]
        rows.append(row if delta is None else [delta] + row)
    return header, rows, skipped


def cmd_sweep(args) -> int:
    header, rows, skipped = sweep_rows(args)
    if skipped:
        print(f"skipped {skipped} point(s) with zero conditioning probability", file=sys.stderr)

    def fmt(v):
        return v if isinstance(v, (str, int)) else format_number(v, args.precision, args.exact)

    if args.format == "json":
        text = json.dumps([dict(zip(header, (fmt(v) for v in r))) for r in rows], indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows([fmt(v) for v in r] for r in rows)
        text = buf.getvalue()
    _emit(text, args.output)
    return EXIT_OK


# --- povm -------------------------------------------------------------------

def cmd_povm(args) -> int:
    povm = build_cascade_povm(args.modes, args.efficiency, args.max_photons, args.method)
    deviation = check_completeness(povm)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "m", "value"])
        for e in povm:
            for m, p in enumerate(e.diagonal):
                w.writerow([e.outcome_label, m, format_number(p, args.precision, args.exact)])
        text = buf.getvalue()
    else:
        doc = {
            "device": povm[0].device,
            "eta_sq": str(args.efficiency) if args.exact else float(args.efficiency),
            "cutoff": args.max_photons,
            "elements": [e.to_dict(args.exact) for e in povm],
            "completeness_deviation": (str(deviation) if args.exact and isinstance(deviation, Fraction)
                                       else float(deviation)),
        }
        text = json.dumps(doc, indent=2) + "\n"
    _emit(text, args.output)
    if args.check and deviation >= COMPLETENESS_TOL:
        print(f"completeness deviation {float(deviation):.3g} >= {COMPLETENESS_TOL:g}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


# --- validate ---------------------------------------------------------------

def cmd_validate(args) -> int:
    results = validation.run_validation(args.max_modes, args.max_photons, args.trials, args.seed)
    if args.format == "json":
        text = json.dumps([r.__dict__ for r in results], indent=2) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "status", "cases", "detail"])
        for r in results:
            w.writerow([r.name, "pass" if r.passed else "fail", r.cases, r.detail])
        text = buf.getvalue()
    else:
        ok = all(r.passed for r in results)
        text = "\n".join(r.line() for r in results) + f"\n{'ALL PASS' if ok else 'FAILURES'}\n"
    _emit(text, args.output)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photocascade",
        description="Click statistics, POVMs and preparation confidence for detector cascades.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prob", help="p_N(k|m) for a cascade")
    p.add_argument("--modes", type=_modes, required=True, help="number of detectors N")
    p.add_argument("--photons", type=int, required=True, help="input photon number m")
    p.add_argument("--clicks", type=int, help="coincidence order k (default: whole row)")
    p.add_argument("--efficiency", type=_efficiency, default=Fraction(1), help='eta^2, decimal or "p/q"')
    p.add_argument("--method", choices=["closed", "multinomial", "mdhp", "montecarlo"], default="multinomial")
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-compositions", type=int, default=10**7, help="cap for exhaustive routes")
    p.add_argument("--dump-unitary", metavar="PATH", help="write the lossy 2N-port unitary as JSON")
    _add_output_flags(p, ["text", "csv", "json"], "text")
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("confidence", help="confidence of preparation for one device")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--state", metavar="PATH", help="ensemble JSON document")
    src.add_argument("--benchmark", default="maximal",
                     help="maximal | downconverter:XI | confinput:DELTA (default maximal)")
    p.add_argument("--device", default="cascade:4", help="cascade:N | cascade:inf | spr-paper | spr-model")
    p.add_argument("--efficiency", type=_efficiency, default=Fraction(1))
    p.add_argument("--clicks", type=int, default=1)
    p.add_argument("--target-m", type=int, default=1)
    _add_output_flags(p, ["json", "csv"], "json")
    p.set_defaults(func=cmd_confidence)

    p = sub.add_parser("sweep", help="confidence curves (default: efficiency 0..1, N = 1, 4, 16, inf)")
    p.add_argument("--parameter", choices=["efficiency", "delta", "modes"], default="efficiency")
    p.add_argument("--from", dest="start", default="0")
    p.add_argument("--to", dest="stop", default="1")
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--values", help="comma-separated explicit grid (overrides --from/--to/--steps)")
    p.add_argument("--devices", default="1,4,16,inf", help="cascade sizes, comma-separated")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--state", metavar="PATH")
    src.add_argument("--benchmark", default="maximal")
    p.add_argument("--efficiency", type=_efficiency, default=Fraction(22, 25),
                   help="fixed eta^2 for delta and modes sweeps")
    p.add_argument("--clicks", type=int, default=1)
    p.add_argument("--target-m", type=int, default=1)
    _add_output_flags(p, ["csv", "json"], "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("povm", help="cascade POVM elements and completeness deviation")
    p.add_argument("--modes", type=_modes, required=True)
    p.add_argument("--efficiency", type=_efficiency, default=Fraction(1))
    p.add_argument("--max-photons", type=int, required=True)
    p.add_argument("--method", choices=["multinomial", "mdhp", "closed"], default="multinomial")
    p.add_argument("--check", action="store_true", help="exit 5 if completeness deviation >= 1e-10")
    _add_output_flags(p, ["json", "csv"], "json")
    p.set_defaults(func=cmd_povm)

    p = sub.add_parser("validate", help="run the cross-route consistency suite")
    p.add_argument("--max-modes", type=int, default=5)
    p.add_argument("--max-photons", type=int, default=4)
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    _add_output_flags(p, ["text", "csv", "json"], "text")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidArgumentError, UnachievableTargetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ZeroProbabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ZERO_PROB


if __name__ == "__main__":
    sys.exit(main())
