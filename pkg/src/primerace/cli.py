"""Command-line interface.

Subcommands cover zero finding and ingestion, race statistics and densities,
Gaussian orthant probabilities, the limiting-distribution sampler, the prime
constructions, and family moderacy reports (CSV plus figures). Every number
is printed with 12 significant digits; randomized commands echo their seed.
Exit codes: 0 success, 1 computation error, 2 validation error.

The reported density is the logarithmic density of the set where all the
normalized race functions are negative at once, i.e. where the classes
appear in the given order: pi(C_1) < pi(C_2) < ... < pi(C_r+1).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from pathlib import Path

import numpy as np

from .construct import (
    Caps,
    build_b_dense_family,
    build_theorem_c_prefix,
    build_u_dense_family,
    moderacy_report,
    prime_density_step,
)
from .density import delta_r_way, delta_three_way, delta_two_way
from .fields import parse_field_spec
from .gaussian import DEFAULT_POINTS, DEFAULT_SHIFTS, mvn_cdf
from .groups import parse_element
from .race import RaceSpec, covariance_matrix, structured_matrices
from .simulate import SimConfig, empirical_delta, sample_mu
from .zeros import (
    ASYMPTOTIC,
    ZERO_DATA,
    ZeroArchive,
    build_field_archive,
    find_zeros_real_character,
    ingest_zeros,
    write_archive,
)
from .figures import render_family_figures


def _sig(x) -> float:
    """Round to 12 significant digits so every format reprints identically."""
    return float(f"{float(x):.12g}")


def _emit(payload: list[tuple[str, object]], fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json-text":
        print(json.dumps(dict(payload)), file=out)
    elif fmt == "csv":
        writer = csv.writer(out)
        writer.writerow(["key", "value"])
        for key, value in payload:
            writer.writerow([key, value])
    else:
        width = max(len(k) for k, _ in payload)
        for key, value in payload:
            print(f"{key:<{width}}  {value}", file=out)


def _emit_rows(header: list[str], rows: list[list], fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json-text":
        print(json.dumps([dict(zip(header, row)) for row in rows]), file=out)
    elif fmt == "csv":
        writer = csv.writer(out)
        writer.writerow(header)
        writer.writerows(rows)
    else:
        widths = [
            max(len(h), max((len(str(r[i])) for r in rows), default=0))
            for i, h in enumerate(header)
        ]
        print("  ".join(h.ljust(w) for h, w in zip(header, widths)), file=out)
        for row in rows:
            print("  ".join(str(v).ljust(w) for v, w in zip(row, widths)), file=out)


def _parse_classes(text: str, G):
    tokens = re.findall(r"e:\([^)]*\)", text)
    leftover = re.sub(r"e:\([^)]*\)", "", text).replace(",", "").strip()
    if not tokens or leftover:
        raise ValueError(f"classes must be comma-separated 'e:(...)' tokens, got {text!r}")
    return tuple(parse_element(tok, G) for tok in tokens)


def _parse_central_orders(text: str | None) -> dict:
    if not text:
        return {}
    orders = {}
    for item in text.split(","):
        label, _, value = item.partition(":")
        if not value:
            raise ValueError(f"central orders use 'label:order', got {item!r}")
        orders[label.strip()] = int(value)
    return orders


def _race_spec(args) -> RaceSpec:
    field = parse_field_spec(args.field)
    classes = _parse_classes(args.classes, field.group)
    central = _parse_central_orders(getattr(args, "central_orders", None))
    if args.mode == "zeros":
        if not args.archive:
            raise ValueError("--mode zeros requires --archive")
        archive = ingest_zeros(args.archive, field)
        return RaceSpec(
            field=field, classes=classes, mode=ZERO_DATA, central_orders=central, archive=archive
        )
    return RaceSpec(field=field, classes=classes, mode=ASYMPTOTIC, central_orders=central)


def _matrix_payload(name: str, matrix: np.ndarray) -> list[tuple[str, float]]:
    r = matrix.shape[0]
    return [
        (f"{name}_{i}_{j}", _sig(matrix[i, j])) for i in range(r) for j in range(r)
    ]


def _caps(args) -> Caps:
    return Caps(
        max_bits=args.max_bits, max_block=args.max_block, max_doublings=args.max_doublings
    )


def _add_caps_flags(parser) -> None:
    parser.add_argument("--max-bits", type=int, default=256)
    parser.add_argument("--max-block", type=int, default=8)
    parser.add_argument("--max-doublings", type=int, default=8)


# ---------------------------------------------------------------------------
# commands


def _cmd_zeros_find(args, fmt: str) -> int:
    if (args.q is None) == (args.field is None):
        raise ValueError("exactly one of --q or --field is required")
    if args.q is not None:
        gammas = find_zeros_real_character(args.q, args.height, args.tol, args.parity)
        archive = ZeroArchive({str(args.q): gammas}, float(args.height), "computed", "")
    else:
        field = parse_field_spec(args.field)
        archive = build_field_archive(field, args.height, args.tol)
    counts = [(label, len(archive.entries[label])) for label in sorted(archive.entries)]
    if args.out:
        write_archive(archive, args.out)
    payload: list[tuple[str, object]] = [("height", _sig(args.height))]
    for label, count in counts:
        payload.append((f"count_{label}", count))
    if args.out:
        payload.append(("out", args.out))
    _emit(payload, fmt)
    return 0


def _cmd_zeros_ingest(args, fmt: str) -> int:
    field = parse_field_spec(args.field)
    archive = ingest_zeros(args.file, field)
    payload: list[tuple[str, object]] = [
        ("height", _sig(archive.height)),
        ("provenance", archive.provenance),
        ("fingerprint", archive.fingerprint),
    ]
    for label in sorted(archive.entries):
        payload.append((f"count_{label}", len(archive.entries[label])))
    _emit(payload, fmt)
    return 0


def _cmd_race_stats(args, fmt: str) -> int:
    spec = _race_spec(args)
    report = covariance_matrix(spec)
    payload: list[tuple[str, object]] = [
        ("classes", len(spec.classes)),
        ("mode", spec.mode.kind),
        ("lambda_min", _sig(report.lambda_min)),
        ("t_hat_inf", _sig(report.t_hat_inf)),
    ]
    payload += [(f"b_{i}", _sig(v)) for i, v in enumerate(report.B)]
    payload += [(f"v_{i}", _sig(v)) for i, v in enumerate(report.V)]
    payload += _matrix_payload("delta", report.Delta)
    _emit(payload, fmt)
    return 0


def _cmd_race_density(args, fmt: str) -> int:
    spec = _race_spec(args)
    r = len(spec.classes)
    if r == 2:
        estimate = delta_two_way(spec)
    else:
        estimate = delta_r_way(spec, samples=args.samples, seed=args.seed, shifts=args.shifts)
    report = estimate.report
    payload: list[tuple[str, object]] = [
        ("value", _sig(estimate.value)),
        ("stderr", _sig(estimate.stderr)),
        ("formula", estimate.formula),
        ("lambda_min", _sig(report.lambda_min)),
        ("diagnostic", _sig(estimate.error_diagnostic)),
        ("seed", args.seed),
        ("samples", args.samples),
        ("shifts", args.shifts),
    ]
    payload += [(f"b_{i}", _sig(v)) for i, v in enumerate(report.B)]
    payload += _matrix_payload("delta", report.Delta)
    if r == 3:
        lin = delta_three_way(spec)
        payload.append(("linearized_value", _sig(lin.value)))
        payload.append(("linearized_diagnostic", _sig(lin.error_diagnostic)))
    _emit(payload, fmt)
    return 0


def _parse_sigma(text: str) -> np.ndarray:
    if text.startswith("gamma:"):
        return structured_matrices(int(text.split(":")[1]), 0.0)[0]
    if text.startswith("sigma:"):
        _, r, rho = text.split(":")
        return structured_matrices(int(r), float(rho))[1]
    raw = Path(text).read_text()
    delimiter = "," if "," in raw.splitlines()[0] else None
    matrix = np.loadtxt(io.StringIO(raw), delimiter=delimiter)
    return np.atleast_2d(matrix)


def _cmd_orthant(args, fmt: str) -> int:
    sigma = _parse_sigma(args.sigma)
    x = np.array([float(v) for v in args.x.split(",")])
    estimate = mvn_cdf(x, sigma, samples=args.samples, seed=args.seed, shifts=args.shifts)
    _emit(
        [
            ("value", _sig(estimate.value)),
            ("stderr", _sig(estimate.stderr)),
            ("dimension", sigma.shape[0]),
            ("method", estimate.method),
            ("samples", estimate.sample_count),
            ("seed", args.seed),
        ],
        fmt,
    )
    return 0


def _cmd_simulate(args, fmt: str) -> int:
    field = parse_field_spec(args.field)
    classes = _parse_classes(args.classes, field.group)
    archive = ingest_zeros(args.archive, field)
    spec = RaceSpec(field=field, classes=classes, mode=ZERO_DATA, archive=archive)
    rows = sample_mu(spec, SimConfig(height=args.height, samples=args.samples, seed=args.seed))
    value, stderr = empirical_delta(rows)
    formula = delta_r_way(spec, seed=args.seed)
    _emit(
        [
            ("empirical", _sig(value)),
            ("stderr", _sig(stderr)),
            ("formula_value", _sig(formula.value)),
            ("formula_stderr", _sig(formula.stderr)),
            ("discrepancy", _sig(abs(value - formula.value))),
            ("height", _sig(args.height)),
            ("samples", args.samples),
            ("seed", args.seed),
        ],
        fmt,
    )
    return 0


def _step_payload(prefix: str, cert) -> list[tuple[str, object]]:
    return [
        (f"{prefix}ell", str(cert.ell)),
        (f"{prefix}alpha", _sig(cert.alpha)),
        (f"{prefix}primes", " ".join(str(p) for p in cert.primes)),
        (f"{prefix}ratio", _sig(cert.ratio)),
        (f"{prefix}bound", _sig(cert.bound)),
        (f"{prefix}doublings", cert.doublings),
        (f"{prefix}holds", cert.holds),
    ]


def _cmd_construct(args, fmt: str) -> int:
    caps = _caps(args)
    if args.kind == "prime-step":
        cert = prime_density_step(args.ell, args.alpha, caps)
        _emit(_step_payload("", cert), fmt)
        return 0
    if args.kind == "u-dense":
        targets = [float(v) for v in args.targets.split(",")] if args.targets else []
        fam = build_u_dense_family(targets, caps)
        payload = [("primes", " ".join(str(p) for p in fam.primes))]
        for k, cert in enumerate(fam.certificates):
            payload += _step_payload(f"block{k}_", cert)
        _emit(payload, fmt)
        return 0
    if args.kind == "b-dense":
        targets = [float(v) for v in args.targets.split(",")] if args.targets else []
        epsilons = [float(v) for v in args.epsilons.split(",")] if args.epsilons else None
        fam = build_b_dense_family(targets, epsilons, caps)
        payload = [("primes", " ".join(str(p) for p in fam.primes))]
        for k, cert in enumerate(fam.certificates):
            payload += [
                (f"block{k}_target", _sig(cert.target)),
                (f"block{k}_epsilon", _sig(cert.epsilon)),
                (f"block{k}_primes", " ".join(str(p) for p in cert.primes)),
                (f"block{k}_value", _sig(cert.value)),
                (f"block{k}_lower", _sig(cert.lower)),
                (f"block{k}_log_last", _sig(cert.log_last)),
                (f"block{k}_upper", _sig(cert.upper)),
                (f"block{k}_doublings", cert.doublings),
                (f"block{k}_holds", cert.holds),
            ]
        _emit(payload, fmt)
        return 0
    cert = build_theorem_c_prefix(args.depth, caps)
    payload = [("primes", " ".join(str(p) for p in cert.primes))]
    for k, lhs, rhs in cert.rows:
        payload.append((f"depth{k}_lhs", _sig(lhs)))
        payload.append((f"depth{k}_rhs", _sig(rhs)))
    payload.append(("holds", cert.holds))
    _emit(payload, fmt)
    return 0


def _cmd_family_report(args, fmt: str) -> int:
    spec_dir = Path(args.specs)
    if not spec_dir.is_dir():
        raise ValueError(f"--specs must name a directory, got {args.specs!r}")
    spec_files = sorted(p for p in spec_dir.iterdir() if p.is_file() and p.suffix == ".json")
    if not spec_files:
        raise ValueError(f"no .json field specs in {spec_dir}")
    fields = [parse_field_spec(str(p)) for p in spec_files]
    reports = moderacy_report(fields)
    header = [
        "depth",
        "log_disc",
        "r_g",
        "two_moderacy_index",
        "uniform_criterion",
        "u_range",
    ]
    rows = [
        [
            r.depth,
            _sig(r.log_disc),
            r.r_g,
            _sig(r.two_moderacy_index),
            _sig(r.uniform_criterion),
            ";".join(f"{u:.12g}" for u in r.u_range),
        ]
        for r in reports
    ]
    out_dir = Path(args.out_dir) if args.out_dir else spec_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "family_report.csv"
    with open(csv_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    figure_paths = render_family_figures(reports, out_dir)
    _emit_rows(header, rows, fmt)
    for path in [csv_path, *figure_paths]:
        print(f"wrote {path}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="primerace")
    parser.add_argument(
        "--format", choices=["table", "csv", "json-text"], default="table"
    )
    parser.add_argument("--cache-dir", help="override the on-disk cache location")
    sub = parser.add_subparsers(dest="command", required=True)

    zeros = sub.add_parser("zeros").add_subparsers(dest="action", required=True)
    find = zeros.add_parser("find")
    find.add_argument("--q", type=int)
    find.add_argument("--field")
    find.add_argument("--height", type=float, required=True)
    find.add_argument("--tol", type=float, default=1e-9)
    find.add_argument("--parity", choices=["auto", "even", "odd"], default="auto")
    find.add_argument("--out")
    find.set_defaults(func=_cmd_zeros_find, origin="zeros")
    ingest = zeros.add_parser("ingest")
    ingest.add_argument("--field", required=True)
    ingest.add_argument("--file", required=True)
    ingest.set_defaults(func=_cmd_zeros_ingest, origin="zeros")

    race = sub.add_parser("race").add_subparsers(dest="action", required=True)
    for name, func in (("stats", _cmd_race_stats), ("density", _cmd_race_density)):
        cmd = race.add_parser(name)
        cmd.add_argument("--field", required=True)
        cmd.add_argument("--classes", required=True)
        cmd.add_argument("--mode", choices=["asymptotic", "zeros"], default="asymptotic")
        cmd.add_argument("--archive")
        cmd.add_argument("--central-orders", dest="central_orders")
        if name == "density":
            cmd.add_argument("--samples", type=int, default=DEFAULT_POINTS)
            cmd.add_argument("--seed", type=int, default=0)
            cmd.add_argument("--shifts", type=int, default=DEFAULT_SHIFTS)
        cmd.set_defaults(func=func, origin="race_core" if name == "stats" else "density")

    orthant = sub.add_parser("orthant")
    orthant.add_argument("--sigma", required=True)
    orthant.add_argument("--x", required=True)
    orthant.add_argument("--samples", type=int, default=DEFAULT_POINTS)
    orthant.add_argument("--seed", type=int, default=0)
    orthant.add_argument("--shifts", type=int, default=DEFAULT_SHIFTS)
    orthant.set_defaults(func=_cmd_orthant, origin="gaussian")

    simulate = sub.add_parser("simulate")
    simulate.add_argument("--field", required=True)
    simulate.add_argument("--classes", required=True)
    simulate.add_argument("--archive", required=True)
    simulate.add_argument("--height", type=float, required=True)
    simulate.add_argument("--samples", type=int, default=100_000)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.set_defaults(func=_cmd_simulate, origin="simulator")

    construct = sub.add_parser("construct").add_subparsers(dest="kind", required=True)
    step = construct.add_parser("prime-step")
    step.add_argument("--ell", type=int, required=True)
    step.add_argument("--alpha", type=float, required=True)
    u_dense = construct.add_parser("u-dense")
    u_dense.add_argument("--targets", default="")
    b_dense = construct.add_parser("b-dense")
    b_dense.add_argument("--targets", default="")
    b_dense.add_argument("--epsilons", default="")
    theorem_c = construct.add_parser("theorem-c")
    theorem_c.add_argument("--depth", type=int, required=True)
    for cmd in (step, u_dense, b_dense, theorem_c):
        _add_caps_flags(cmd)
        cmd.set_defaults(func=_cmd_construct, origin="constructions")

    family = sub.add_parser("family").add_subparsers(dest="action", required=True)
    report = family.add_parser("report")
    report.add_argument("--specs", required=True)
    report.add_argument("--out-dir", dest="out_dir")
    report.set_defaults(func=_cmd_family_report, origin="constructions")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.cache_dir:
        os.environ["PRIMERACE_CACHE_DIR"] = args.cache_dir
    try:
        return args.func(args, args.format)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error[{args.origin}]: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error[{args.origin}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
