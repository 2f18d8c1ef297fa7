"""Command line front end: per-prime computations and the scaling scan.

Exit codes: 0 success, 1 usage error, 2 invalid modulus, 3 not mixed
within the step budget, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import bounds as bounds_mod
from . import circles as circles_mod
from . import walk as walk_mod
from .modular import NotPrime, WrongResidueClass, make_modulus, primes_3_mod_4

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BAD_MODULUS = 2
EXIT_NOT_MIXED = 3
EXIT_INVARIANT = 4

CONSTANTS_GATE = 512
MIXING_GATE = 499


def _default_jobs() -> int:
    # the only environment variable consulted anywhere
    env = os.environ.get("CIRCLEWALK_JOBS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    """Serialize a number; floats carry 17 significant digits."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    return "" if x is None else str(x)


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _json_float(x):
    return None if x is None else float(fmt(x))


def cmd_constants(args) -> int:
    modulus = make_modulus(args.p)
    p = modulus.p
    if p > CONSTANTS_GATE and not args.force:
        print(
            f"p={p} exceeds the export gate {CONSTANTS_GATE}; use --force",
            file=sys.stderr,
        )
        return EXIT_USAGE
    tensor = circles_mod.StructureTensor(modulus)

    def rows():
        for i in range(p):
            for j in range(p):
                for k in range(p):
                    scaled = tensor.scaled(i, j, k)
                    if i == 0 or j == 0:
                        yield i, j, k, scaled // (p + 1), 1
                    else:
                        yield i, j, k, scaled, p + 1

    if args.format == "json":
        data = [list(r) for r in rows()]
        _emit(_json_text({"p": p, "rows": data}), args.output)
    else:
        _emit(_csv_text(["i", "j", "k", "numerator", "denominator"], rows()),
              args.output)
    return EXIT_OK


def cmd_axioms(args) -> int:
    modulus = make_modulus(args.p)
    if modulus.p > CONSTANTS_GATE:
        # the check runs on the dense table, which is hard-capped
        print(
            f"p={modulus.p} exceeds the dense-table limit {CONSTANTS_GATE}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    report = circles_mod.validate_axioms(circles_mod.StructureTensor(modulus))
    checks = report.checks()
    if args.format == "json":
        obj = {
            "p": modulus.p,
            "all_passed": report.all_passed,
            "axioms": {
                c.name: {"passed": c.passed, "witness": c.witness}
                for c in checks
            },
        }
        _emit(_json_text(obj), args.output)
    else:
        rows = [
            (c.name, c.passed, "" if c.witness is None else ";".join(map(str, c.witness)))
            for c in checks
        ]
        _emit(_csv_text(["axiom", "passed", "witness"], rows), args.output)
    return EXIT_OK if report.all_passed else EXIT_INVARIANT


def cmd_stationary(args) -> int:
    modulus = make_modulus(args.p)
    dist = walk_mod.stationary(modulus)
    if args.format == "json":
        obj = {
            "p": modulus.p,
            "denominator": modulus.p**2,
            "numerators": [int(w * modulus.p**2) for w in dist.weights],
        }
        _emit(_json_text(obj), args.output)
    else:
        rows = [(k, w.numerator, w.denominator) for k, w in enumerate(dist.weights)]
        _emit(_csv_text(["k", "numerator", "denominator"], rows), args.output)
    return EXIT_OK


def _measured_mixing(modulus, eps, force):
    tensor = circles_mod.StructureTensor(modulus)
    kernel = walk_mod.build_kernel(tensor)
    starts = range(modulus.p) if (modulus.p > MIXING_GATE and force) else None
    return walk_mod.mixing_time(kernel, eps, starts=starts)


def cmd_mix(args) -> int:
    modulus = make_modulus(args.p)
    if modulus.p > MIXING_GATE and not args.force:
        print(
            f"p={modulus.p} exceeds the all-starts mixing gate {MIXING_GATE}; "
            "use --force",
            file=sys.stderr,
        )
        return EXIT_USAGE
    report = _measured_mixing(modulus, args.eps, args.force)
    if args.format == "json":
        obj = {
            "p": modulus.p,
            "epsilon": _json_float(report.epsilon),
            "tau": report.tau,
            "worst_start": report.worst_start,
            "tv_curve": [_json_float(v) for v in report.tv_curve],
        }
        _emit(_json_text(obj), args.output)
    else:
        rows = [
            (t, report.tv_curve[t], report.curve_starts[t])
            for t in range(report.tau + 1)
        ]
        _emit(_csv_text(["t", "worst_tv", "worst_start"], rows), args.output)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    modulus = make_modulus(args.p)
    tensor = circles_mod.StructureTensor(modulus)
    kernel = walk_mod.build_kernel(tensor)
    spectral = bounds_mod.spectrum(kernel, walk_mod.stationary(modulus))
    if args.format == "json":
        obj = {
            "p": modulus.p,
            "eigenvalues": [_json_float(v) for v in spectral.eigenvalues],
            "lambda1": _json_float(spectral.lambda1),
            "lambda_min": _json_float(spectral.lambda_min),
            "alpha_star": _json_float(spectral.alpha_star),
            "gap": _json_float(spectral.gap),
        }
        _emit(_json_text(obj), args.output)
    else:
        rows = [(i, float(v)) for i, v in enumerate(spectral.eigenvalues)]
        _emit(_csv_text(["index", "eigenvalue"], rows), args.output)
    return EXIT_OK


def cmd_bounds(args) -> int:
    modulus = make_modulus(args.p)
    measure = modulus.p <= MIXING_GATE or args.force
    report = bounds_mod.bound_report(modulus, args.eps, measure_mixing=measure)
    obj = {k: (_json_float(v) if isinstance(v, float) else v)
           for k, v in report.to_json_dict().items()}
    if args.format == "json":
        _emit(_json_text(obj), args.output)
    else:
        _emit(_csv_text(list(obj.keys()), [list(obj.values())]), args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    modulus = make_modulus(args.p)
    result = walk_mod.simulate(modulus, args.steps, args.trials, args.seed)
    if args.format == "json":
        obj = {
            "p": modulus.p,
            "steps": args.steps,
            "trials": args.trials,
            "seed": args.seed,
            "counts": [int(c) for c in result.quadrance_counts],
            "frequencies": [_json_float(float(w)) for w in result.empirical.weights],
        }
        _emit(_json_text(obj), args.output)
    else:
        rows = [
            (k, int(result.quadrance_counts[k]), float(result.empirical.weights[k]))
            for k in range(modulus.p)
        ]
        _emit(_csv_text(["k", "count", "frequency"], rows), args.output)
    return EXIT_OK


SCAN_HEADER = [
    "p", "tau_measured", "coupling_tau", "gap", "alpha_star",
    "tau_over_p", "tau_over_log_p",
]


def _scan_row(task: tuple[int, float]) -> list:
    p, eps = task
    modulus = make_modulus(p)
    report = bounds_mod.bound_report(modulus, eps, measure_mixing=p <= MIXING_GATE)
    tau = report.tau_measured
    return [
        p,
        tau,
        report.coupling_tau,
        1.0 - report.lambda1,
        report.alpha_star,
        None if tau is None else tau / p,
        None if tau is None else tau / math.log(p),
    ]


def cmd_scan(args) -> int:
    if args.p_min > args.p_max:
        print("empty range: p-min exceeds p-max", file=sys.stderr)
        return EXIT_USAGE
    primes = primes_3_mod_4(args.p_min, args.p_max)
    if not primes:
        print(
            f"empty range: no prime = 3 (mod 4) in [{args.p_min}, {args.p_max}]",
            file=sys.stderr,
        )
        return EXIT_USAGE
    tasks = [(p, args.eps) for p in primes]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_scan_row, tasks))
    else:
        rows = [_scan_row(t) for t in tasks]
    rows.sort(key=lambda r: r[0])
    _emit(_csv_text(SCAN_HEADER, rows), args.output)
    measured = [r[5] for r in rows if r[5] is not None]
    if measured:
        print(f"max tau_over_p = {fmt(max(measured))}", file=sys.stderr)
    return EXIT_OK


def _add_common(sub, *, p=True, eps=False, seed=False):
    sub.add_argument("--format", choices=["csv", "json"], default="csv")
    sub.add_argument("--output", default=None, help="file path, default stdout")
    sub.add_argument("--force", action="store_true",
                     help="override size gates")
    if p:
        sub.add_argument("--p", type=int, required=True,
                         help="prime modulus, must be 3 (mod 4)")
    if eps:
        sub.add_argument("--eps", type=float, default=walk_mod.DEFAULT_EPSILON,
                         help="TV threshold, default 1/(2e)")
    if seed:
        sub.add_argument("--seed", type=int, default=42)
        sub.add_argument("--trials", type=int, default=100000)
        sub.add_argument("--steps", type=int, default=20)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="circlewalk",
                     description="Circle hypergroup walks over F_p")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("constants", help="export exact product tensor"))
    _add_common(sub.add_parser("axioms", help="check hypergroup axioms"))
    _add_common(sub.add_parser("stationary", help="exact invariant law"))
    _add_common(sub.add_parser("mix", help="measure worst-start mixing"), eps=True)
    _add_common(sub.add_parser("spectrum", help="eigenvalues of the walk"))
    _add_common(sub.add_parser("bounds", help="all bounds for one prime"),
                eps=True)
    _add_common(sub.add_parser("simulate", help="seeded plane walks"),
                seed=True)
    scan = sub.add_parser("scan", help="bound pipeline over a prime range")
    _add_common(scan, p=False, eps=True)
    scan.add_argument("--p-min", type=int, required=True)
    scan.add_argument("--p-max", type=int, required=True)
    scan.add_argument("--jobs", type=int, default=_default_jobs())
    return parser


_COMMANDS = {
    "constants": cmd_constants,
    "axioms": cmd_axioms,
    "stationary": cmd_stationary,
    "mix": cmd_mix,
    "spectrum": cmd_spectrum,
    "bounds": cmd_bounds,
    "simulate": cmd_simulate,
    "scan": cmd_scan,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (NotPrime, WrongResidueClass) as exc:
        print(f"invalid modulus: {exc}", file=sys.stderr)
        return EXIT_BAD_MODULUS
    except walk_mod.NotMixed as exc:
        print(f"not mixed: {exc}", file=sys.stderr)
        return EXIT_NOT_MIXED
    except walk_mod.BadEpsilon as exc:
        print(f"bad epsilon: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # invariant violations and unexpected failures
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
