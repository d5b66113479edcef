"""Command-line front end.

Subcommands: ``build-povm``, ``simulate``, ``estimate``, ``reconstruct``,
``verify``. Exit codes: 0 success, 1 usage error (bad flags, malformed or
missing inputs), 2 domain error (positivity violation, singular inversion),
3 verification failure. Progress and diagnostics go to stderr; result
summaries go to stdout; artifacts are written as files, each referencing a
manifest written next to it.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .analysis import (
    classicality_statistic,
    collapse_pair_counts,
    correct_for_source_noise,
    csquared_from_patterns,
    estimate_vx,
    estimate_vy,
    vsquared_from_patterns,
)
from .checks import run_all_checks
from .fileio import (
    SCHEMA_COUNTS,
    SCHEMA_PROBS,
    SCHEMA_REPORT,
    CountsArtifact,
    Document,
    expect_schema,
    fmt_bool,
    fmt_float,
    fmt_sign,
    named_state_density,
    read_counts_file,
    read_document,
    read_probs_file,
    write_document,
    write_eigenstate_counts,
    write_manifest,
    write_pair_counts,
    write_povm_file,
)
from .kirkwood import SingularInversionError, kd_from_state, reconstruct_kd
from .povm import OUTCOMES4, PATTERNS, PositivityError, VisibilityTriple, build_povm
from .simulate import ExperimentConfig, run_eigenstate_experiment, run_pair_experiment

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_VERIFY = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); remap to the contract
        raise UsageError(message)


def _parse_value(token: str) -> int:
    if token in ("+1", "1"):
        return +1
    if token == "-1":
        return -1
    raise UsageError(f"--value must be +1 or -1, got {token!r}")


def _manifest_name(out: Path) -> str:
    return out.name + ".manifest"


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


def build_parser() -> _Parser:
    parser = _Parser(prog="xymeas", description=__doc__)
    parser.add_argument("--version", action="version", version=f"xymeas {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-povm", help="construct a joint measurement and dump its elements")
    p.add_argument("--vx", type=float, required=True)
    p.add_argument("--vy", type=float, required=True)
    p.add_argument("--vz", type=float, required=True)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("simulate", help="run a seeded eigenstate or pair experiment")
    p.add_argument("--mode", choices=("eigenstate", "pair"), required=True)
    p.add_argument("--axis", choices=("X", "Y"), help="eigenstate mode only")
    p.add_argument("--value", help="eigenstate mode only: +1 or -1")
    p.add_argument("--vx", type=float, required=True)
    p.add_argument("--vy", type=float, required=True)
    p.add_argument("--vz", type=float, required=True)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--randomize-flips", action="store_true", help="eigenstate mode only")
    p.add_argument("--werner-p", type=float, help="pair mode only; default 1 (perfect singlet)")
    p.add_argument("--workers", type=int, default=1, help="parallel sampling threads")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("estimate", help="estimate visibilities and the error correlation")
    p.add_argument("counts", nargs="+", type=Path, help="counts files from simulate")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument(
        "--allow-partial",
        action="store_true",
        help="report whatever the provided files support instead of requiring all three runs",
    )
    p.add_argument(
        "--correct-source-noise",
        action="store_true",
        help="divide pattern contrasts by the recorded werner_p (isotropic-noise model)",
    )

    p = sub.add_parser("reconstruct", help="invert an outcome table into a quasi-probability")
    p.add_argument("--input", type=Path, required=True, help="eigenstate counts or probs file")
    p.add_argument("--vx", type=float)
    p.add_argument("--vy", type=float)
    p.add_argument("--vz", type=float)
    p.add_argument("--from-report", type=Path, help="take vx, vy, |vz| from an estimate report")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("verify", help="run the self-verification sweeps")
    p.add_argument("--grid", type=int, default=9, help="visibility grid density per axis")
    p.add_argument("--samples", type=int, default=10_000, help="random models per sweep")
    p.add_argument("--seed", type=int, default=20240901)

    return parser


def cmd_build_povm(args) -> int:
    v = VisibilityTriple(args.vx, args.vy, args.vz)
    povm = build_povm(v)
    out: Path = args.out
    manifest = _manifest_name(out)
    write_povm_file(out, povm, manifest)
    write_manifest(
        out.parent / manifest,
        "build-povm",
        {"vx": fmt_float(v.vx), "vy": fmt_float(v.vy), "vz": fmt_float(v.vz)},
        [out.name],
    )
    _diag(f"wrote {out} and {manifest}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.mode == "eigenstate":
        if args.axis is None or args.value is None:
            raise UsageError("eigenstate mode requires --axis and --value")
        if args.werner_p is not None:
            raise UsageError("--werner-p applies to pair mode only")
        value = _parse_value(args.value)
    else:
        if args.axis is not None or args.value is not None:
            raise UsageError("--axis/--value apply to eigenstate mode only")
        if args.randomize_flips:
            raise UsageError("--randomize-flips applies to eigenstate mode only")

    config = ExperimentConfig(
        visibilities=VisibilityTriple(args.vx, args.vy, args.vz),
        shots=args.shots,
        seed=args.seed,
        randomize_flips=args.randomize_flips,
        werner_p=args.werner_p if args.werner_p is not None else 1.0,
    )
    out: Path = args.out
    manifest = _manifest_name(out)
    parameters = {
        "mode": args.mode,
        "vx": fmt_float(config.visibilities.vx),
        "vy": fmt_float(config.visibilities.vy),
        "vz": fmt_float(config.visibilities.vz),
        "shots": str(config.shots),
        "seed": str(config.seed),
        "randomize_flips": fmt_bool(config.randomize_flips),
    }
    if args.mode == "eigenstate":
        counts = run_eigenstate_experiment(config, args.axis, value, workers=args.workers)
        write_eigenstate_counts(out, counts, config, manifest)
        parameters["axis"] = args.axis
        parameters["value"] = fmt_sign(value)
    else:
        counts = run_pair_experiment(config, workers=args.workers)
        write_pair_counts(out, counts, config, manifest)
        parameters["werner_p"] = fmt_float(config.werner_p)
    write_manifest(out.parent / manifest, "simulate", parameters, [out.name])
    _diag(f"simulated {config.shots} shots; wrote {out} and {manifest}")
    return EXIT_OK


def _classify_counts(paths) -> dict[str, CountsArtifact]:
    roles: dict[str, CountsArtifact] = {}
    for path in paths:
        if not Path(path).exists():
            raise UsageError(f"counts file not found: {path}")
        artifact = read_counts_file(path)
        if artifact.mode == "pair":
            role = "pair"
        else:
            role = f"eigenstate-{artifact.eigenstate_counts.input_axis}"
        if role in roles:
            raise UsageError(f"duplicate {role} counts file: {path}")
        roles[role] = artifact
    return roles


def cmd_estimate(args) -> int:
    roles = _classify_counts(args.counts)
    required = ("eigenstate-X", "eigenstate-Y", "pair")
    missing = [r for r in required if r not in roles]
    if missing and not args.allow_partial:
        raise UsageError(
            "missing measurements: " + ", ".join(missing) + " (use --allow-partial to proceed)"
        )

    doc = Document(header={"schema": SCHEMA_REPORT, "command": "estimate"})
    out: Path = args.out
    manifest = _manifest_name(out)
    doc.header["manifest"] = manifest
    doc.sections["inputs"] = [
        (role, str(artifact.path)) for role, artifact in sorted(roles.items())
    ]
    summary = []

    if "eigenstate-X" in roles:
        vx_est = estimate_vx(roles["eigenstate-X"].eigenstate_counts)
        doc.sections["visibility_x"] = [
            ("value", fmt_float(vx_est.value)),
            ("stderr", fmt_float(vx_est.stderr)),
            ("source", vx_est.source),
        ]
        summary.append(f"vx = {vx_est.value:.6f} +- {vx_est.stderr:.2g}")
    if "eigenstate-Y" in roles:
        vy_est = estimate_vy(roles["eigenstate-Y"].eigenstate_counts)
        doc.sections["visibility_y"] = [
            ("value", fmt_float(vy_est.value)),
            ("stderr", fmt_float(vy_est.stderr)),
            ("source", vy_est.source),
        ]
        summary.append(f"vy = {vy_est.value:.6f} +- {vy_est.stderr:.2g}")

    if "pair" in roles:
        pair = roles["pair"]
        stats = collapse_pair_counts(pair.pair_counts)
        corrected = False
        if args.correct_source_noise:
            if pair.werner_p is None:
                raise UsageError("pair counts file does not record werner_p")
            stats = correct_for_source_noise(stats, pair.werner_p)
            corrected = True
        doc.sections["pair_run"] = [
            ("total_shots", str(pair.pair_counts.total)),
            ("werner_p", fmt_float(pair.werner_p) if pair.werner_p is not None else "unknown"),
            ("source_noise_corrected", fmt_bool(corrected)),
        ]
        doc.sections["patterns"] = [
            (str(rx), str(ry), fmt_float(stats.e[(rx, ry)]), fmt_float(stats.stderr[(rx, ry)]))
            for rx, ry in PATTERNS
        ]
        vx2, vy2 = vsquared_from_patterns(stats)
        doc.sections["vx_squared_pair"] = [
            ("value", fmt_float(vx2.value)),
            ("stderr", fmt_float(vx2.stderr)),
        ]
        doc.sections["vy_squared_pair"] = [
            ("value", fmt_float(vy2.value)),
            ("stderr", fmt_float(vy2.stderr)),
        ]
        corr = csquared_from_patterns(stats)
        doc.sections["csquared"] = [
            ("value", fmt_float(corr.c_squared)),
            ("stderr", fmt_float(corr.stderr)),
            ("vz_magnitude", fmt_float(corr.vz_magnitude)),
            ("classical", fmt_bool(corr.classical)),
        ]
        statistic = classicality_statistic(stats)
        doc.sections["classicality"] = [("statistic", fmt_float(statistic))]
        verdict = "consistent with classical errors" if corr.classical else "non-classical"
        summary.append(f"c^2 = {corr.c_squared:.6f} +- {corr.stderr:.2g} ({verdict})")
        summary.append(f"|vz| = {corr.vz_magnitude:.6f}, S = {statistic:.6f}")

    configured = {a.visibilities for a in roles.values()}
    if len(configured) == 1 and None not in configured:
        v = configured.pop()
        doc.sections["exact_reference"] = [
            ("vx", fmt_float(v.vx)),
            ("vy", fmt_float(v.vy)),
            ("vz", fmt_float(v.vz)),
            ("vx_squared", fmt_float(v.vx ** 2)),
            ("vy_squared", fmt_float(v.vy ** 2)),
            ("csquared", fmt_float(-(v.vz ** 2))),
            ("classicality_statistic", fmt_float(v.vz ** 2 / 4.0)),
        ]

    write_document(out, doc)
    write_manifest(
        out.parent / manifest,
        "estimate",
        {
            "allow_partial": fmt_bool(args.allow_partial),
            "correct_source_noise": fmt_bool(args.correct_source_noise),
        },
        [out.name],
    )
    for line in summary:
        print(line)
    _diag(f"wrote {out} and {manifest}")
    return EXIT_OK


def _reconstruction_visibilities(args) -> tuple[float, float, float]:
    flags = (args.vx, args.vy, args.vz)
    if args.from_report is not None:
        if any(f is not None for f in flags):
            raise UsageError("give either --vx/--vy/--vz or --from-report, not both")
        report = read_document(args.from_report)
        expect_schema(report, SCHEMA_REPORT, args.from_report)
        vx = float(report.section_value("visibility_x", "value"))
        vy = float(report.section_value("visibility_y", "value"))
        vz = float(report.section_value("csquared", "vz_magnitude"))
        _diag(
            "note: pair statistics determine only |vz|; using the positive sign, "
            "which conjugates the result if the device's vz is negative"
        )
        return vx, vy, vz
    if any(f is None for f in flags):
        raise UsageError("reconstruct requires --vx, --vy and --vz (or --from-report)")
    return args.vx, args.vy, args.vz


def cmd_reconstruct(args) -> int:
    if not Path(args.input).exists():
        raise UsageError(f"input file not found: {args.input}")
    doc = read_document(args.input)
    schema = doc.require("schema")
    reference = None
    reference_label = None
    if schema == SCHEMA_COUNTS:
        artifact = read_counts_file(args.input)
        if artifact.mode != "eigenstate":
            raise UsageError("reconstruct needs a single-qubit table; pair counts cannot be used")
        counts = artifact.eigenstate_counts
        probs = {o: counts.counts[o] / counts.total for o in OUTCOMES4}
        reference_label = f"{counts.input_axis}{'+' if counts.input_value == +1 else '-'}"
        reference = named_state_density(reference_label)
    elif schema == SCHEMA_PROBS:
        probs, state = read_probs_file(args.input)
        if state is not None:
            reference_label = state
            reference = named_state_density(state)
    else:
        raise UsageError(f"{args.input}: unsupported input schema {schema}")

    vx, vy, vz = _reconstruction_visibilities(args)
    kd = reconstruct_kd(probs, vx, vy, 1j * vz)

    out: Path = args.out
    manifest = _manifest_name(out)
    report = Document(
        header={"schema": SCHEMA_REPORT, "command": "reconstruct", "manifest": manifest}
    )
    report.sections["parameters"] = [
        ("vx", fmt_float(vx)),
        ("vy", fmt_float(vy)),
        ("vz", fmt_float(vz)),
        ("input", str(args.input)),
    ]
    report.sections["kd"] = [
        (
            fmt_sign(x),
            fmt_sign(y),
            fmt_float(complex(kd.entries[(x, y)]).real),
            fmt_float(complex(kd.entries[(x, y)]).imag),
        )
        for x, y in OUTCOMES4
    ]
    report.sections["kd_x_marginals"] = [
        (fmt_sign(x), fmt_float(kd.x_marginal(x))) for x in (+1, -1)
    ]
    report.sections["kd_y_marginals"] = [
        (fmt_sign(y), fmt_float(kd.y_marginal(y))) for y in (+1, -1)
    ]
    if reference is not None:
        expected = kd_from_state(reference)
        rows = [("state", reference_label)]
        worst = 0.0
        for x, y in OUTCOMES4:
            deviation = abs(complex(kd.entries[(x, y)]) - complex(expected.entries[(x, y)]))
            worst = max(worst, deviation)
            rows.append((fmt_sign(x), fmt_sign(y), fmt_float(deviation)))
        rows.append(("max_abs", fmt_float(worst)))
        report.sections["kd_reference_deviation"] = rows

    write_document(out, report)
    write_manifest(
        out.parent / manifest,
        "reconstruct",
        {"vx": fmt_float(vx), "vy": fmt_float(vy), "vz": fmt_float(vz), "input": str(args.input)},
        [out.name],
    )
    for x, y in OUTCOMES4:
        entry = complex(kd.entries[(x, y)])
        print(f"kd({fmt_sign(x)}, {fmt_sign(y)}) = {entry.real:+.6f} {entry.imag:+.6f}i")
    _diag(f"wrote {out} and {manifest}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    results = run_all_checks(grid=args.grid, samples=args.samples, seed=args.seed)
    for result in results:
        print(f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


_COMMANDS = {
    "build-povm": cmd_build_povm,
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "reconstruct": cmd_reconstruct,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        _diag(f"usage error: {exc}")
        return EXIT_USAGE
    except (PositivityError, SingularInversionError) as exc:
        _diag(f"domain error: {exc}")
        return EXIT_DOMAIN
    except (OSError, ValueError) as exc:
        _diag(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
