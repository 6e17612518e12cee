"""Command-line entry point ``qfid``.

Exit status is 0 on success, 1 on bad input (unreadable or malformed files,
dimension mismatches, bad parameters) and 2 when ``proptest`` finds a
violated property.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import io as qio
from .channels import (apply_channel, channel_from_string, entanglement_fidelity,
                       entanglement_fidelity_purified)
from .errors import QfidError
from .fidelity import bures_angle, check_bounds, fidelity, trace_distance
from .measurement import (classical_fidelity, classical_trace_distance, fidelity_optimal_povm,
                          helstrom_povm, induced_distribution, lifted_truncation_povm)
from .properties import SUITE_NAMES, run_suites
from .states import same_dims
from .truncation import (default_cap_dim, epsilon_schedule, generator_from_string,
                         truncated_fidelity_sweep)

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2

SWEEP_HEADER = ("trunc_dim", "alpha_n", "beta_n", "classical_fidelity", "quantum_fidelity", "gap")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for violations here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _load_density(path: str) -> np.ndarray:
    return qio.density_from_json(qio.load_json(path), where=path)


def _load_pair(args) -> tuple[np.ndarray, np.ndarray]:
    rho, sigma = _load_density(args.rho), _load_density(args.sigma)
    same_dims(rho, sigma)
    return rho, sigma


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, int) else repr(float(v)) for v in row])
    return buf.getvalue()


# commands: each returns (artifact text, exit status) ---------------------------

def cmd_fidelity(args):
    rho, sigma = _load_pair(args)
    out = {"fidelity": fidelity(rho, sigma), "bures_angle": bures_angle(rho, sigma),
           "trace_distance": trace_distance(rho, sigma)}
    return qio.dumps(out), EXIT_OK


def cmd_bounds(args):
    rho, sigma = _load_pair(args)
    return qio.dumps(check_bounds(rho, sigma).to_dict()), EXIT_OK


def cmd_povm(args):
    rho, sigma = _load_pair(args)
    povm = qio.povm_from_json(qio.load_json(args.povm), where=args.povm)
    if povm.dim != rho.shape[0]:
        raise InputError(f"{args.povm}: POVM has dim {povm.dim}, states have dim {rho.shape[0]}")
    p, q = induced_distribution(rho, povm), induced_distribution(sigma, povm)
    out = {"p": p.tolist(), "q": q.tolist(),
           "classical_fidelity": classical_fidelity(p, q),
           "quantum_fidelity": fidelity(rho, sigma),
           "classical_trace_distance": classical_trace_distance(p, q),
           "trace_distance": trace_distance(rho, sigma)}
    return qio.dumps(out), EXIT_OK


def cmd_optimal_povm(args):
    rho, sigma = _load_pair(args)
    if args.trunc_dims:
        rows = []
        for n in args.trunc_dims:
            r = lifted_truncation_povm(rho, sigma, n)
            rows.append((n, r.alpha, r.beta, r.classical_fidelity, r.quantum_fidelity, r.gap))
        if args.format == "csv":
            return _csv(SWEEP_HEADER, rows), EXIT_OK
        return qio.dumps({"rows": [dict(zip(SWEEP_HEADER, r)) for r in rows]}), EXIT_OK
    if args.format == "csv":
        raise InputError("--format csv requires --trunc-dims")
    povm = helstrom_povm(rho, sigma) if args.helstrom else fidelity_optimal_povm(rho, sigma)
    p, q = induced_distribution(rho, povm), induced_distribution(sigma, povm)
    out = {"kind": "helstrom" if args.helstrom else "fidelity-optimal",
           "effects": qio.povm_to_json(povm),
           "classical_fidelity": classical_fidelity(p, q),
           "quantum_fidelity": fidelity(rho, sigma),
           "classical_trace_distance": classical_trace_distance(p, q),
           "trace_distance": trace_distance(rho, sigma)}
    return qio.dumps(out), EXIT_OK


def cmd_entfid(args):
    rho = _load_density(args.rho)
    spec = args.channel
    if spec.endswith(".json") or Path(spec).is_file():
        ch = qio.channel_from_json(qio.load_json(spec), where=spec)
    else:
        ch = channel_from_string(spec, rho.shape[0])
    out = {"entanglement_fidelity": entanglement_fidelity(rho, ch),
           "entanglement_fidelity_purified": entanglement_fidelity_purified(rho, ch),
           "fidelity_squared_bound": fidelity(rho, apply_channel(ch, rho)) ** 2}
    return qio.dumps(out), EXIT_OK


def cmd_converge(args):
    cap = args.cap_dim or default_cap_dim()
    g1 = generator_from_string(args.g1, None, cap)
    g2 = generator_from_string(args.g2, args.rotate, cap)
    schedule = None
    if args.eps is not None:
        schedule = {repr(e): epsilon_schedule(g1, g2, e, cap) for e in args.eps}
    report = truncated_fidelity_sweep(g1, g2, args.dims, cap)
    if args.format == "csv":
        if schedule is not None:
            raise InputError("--eps output is JSON only")
        return report.to_csv(), EXIT_OK
    out = report.to_dict()
    out["cap_dim"] = cap
    if schedule is not None:
        out["epsilon_schedule"] = schedule
    return qio.dumps(out), EXIT_OK


def cmd_proptest(args):
    if args.trials < 1:
        raise InputError(f"--trials must be positive, got {args.trials}")
    names = "all" if args.suite == "all" else args.suite.split(",")
    try:
        results = run_suites(names, args.seed, args.trials)
    except ValueError as exc:
        raise InputError(f"{exc}; known: {', '.join(SUITE_NAMES)}") from None
    failed = [r for r in results if not r.passed]
    out = {"seed": args.seed, "trials": args.trials,
           "suites": len(results), "passed": len(results) - len(failed), "failed": len(failed),
           "results": [r.to_dict() for r in results]}
    for r in failed:
        for v in r.violations:
            print(f"VIOLATION [{v.suite}] {v.property}: trial {v.trial}: {v.detail}", file=sys.stderr)
    return qio.dumps(out), EXIT_VIOLATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qfid", description="Fidelity, measurement and channel computations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text, pair=True):
        p = sub.add_parser(name, help=help_text)
        if pair:
            p.add_argument("--rho", required=True, help="density-matrix JSON file")
            p.add_argument("--sigma", required=True, help="density-matrix JSON file")
        p.add_argument("-o", "--output", help="write the artifact here instead of stdout")
        p.set_defaults(func=func)
        return p

    add("fidelity", cmd_fidelity, "fidelity, Bures angle and trace distance")
    add("bounds", cmd_bounds, "check 1 - F <= D <= sqrt(1 - F^2)")
    p = add("povm", cmd_povm, "outcome distributions and classical fidelity of a POVM")
    p.add_argument("--povm", required=True, help="POVM JSON file")
    p = add("optimal-povm", cmd_optimal_povm, "fidelity-optimal or Helstrom POVM, or a truncation sweep")
    p.add_argument("--helstrom", action="store_true", help="emit the Helstrom measurement instead")
    p.add_argument("--trunc-dims", type=_int_list, help="comma-separated truncation sizes")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p = add("entfid", cmd_entfid, "entanglement fidelity of a state through a channel", pair=False)
    p.add_argument("--rho", required=True, help="density-matrix JSON file")
    p.add_argument("--channel", required=True,
                   help="channel JSON file or a name such as 'dephasing(0.1)'")
    p = add("converge", cmd_converge, "truncation convergence sweep", pair=False)
    p.add_argument("--g1", required=True, help="spectrum of rho, e.g. geometric:0.5")
    p.add_argument("--g2", required=True, help="spectrum of sigma, e.g. geometric:0.333")
    p.add_argument("--dims", type=_int_list, default=[4, 8, 16, 32, 64])
    p.add_argument("--rotate", type=float, default=None, help="pairwise rotation angle for sigma's basis")
    p.add_argument("--eps", type=float, action="append", help="report the eps schedule (repeatable)")
    p.add_argument("--cap-dim", type=int, default=None, help="overrides QFID_CAP_DIM")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p = add("proptest", cmd_proptest, "run randomised property suites", pair=False)
    p.add_argument("--suite", default="all", help=f"'all' or comma-separated names: {', '.join(SUITE_NAMES)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, status = args.func(args)
    except (QfidError, InputError, ValueError) as exc:
        print(f"qfid {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            print(f"qfid: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
