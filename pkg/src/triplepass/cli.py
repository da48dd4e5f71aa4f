"""Command-line entry point wiring instances, sessions, and analyses
into reproducible experiments.

Subcommands: demo | run | analyze | check | search. Every artifact embeds
the schema version, tool version, effective config, and seed; a fixed
seed reproduces outputs byte for byte, independent of worker count.
Exit codes: 0 success/pass, 1 checked-property fail, 2 usage error,
3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from .actions import (
    ActionInstance,
    ConditionReport,
    DEFAULT_WORK_CAP,
    INSTANCE_KINDS,
    build_instance,
    check_masking_coverage,
    check_transcript_equivalence,
    format_point,
    instance_from_descriptor,
    instance_to_descriptor,
    is_commutator_fixed_set,
    load_instance_file,
    rational_demo_instance,
    secret_square_points,
    trivial_instance,
)
from .analysis import (
    LeakageReport,
    PosteriorReport,
    SearchReport,
    exact_mutual_information,
    posterior_from_transcript,
)
from .errors import (
    InconsistentTranscriptError,
    TriplePassError,
    WorkCapExceeded,
)
from .fields import parse_scalar
from .matrices import Mat2, format_matrix
from .protocol import (
    SecretEncoding,
    run_session,
    run_session_with,
    sample_rational_scalar,
    transcript_from_dict,
    transcript_to_dict,
)
from .actions import Point

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_CAP = 3

_CLI_KINDS = tuple(k for k in INSTANCE_KINDS if k != "custom") + ("trivial", "rational")


class UsageError(Exception):
    pass


def _default_cap() -> int:
    env = os.environ.get("TRIPLEPASS_CAP")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"TRIPLEPASS_CAP must be an integer, got {env!r}") from None
    return DEFAULT_WORK_CAP


def _resolve_instance(args: argparse.Namespace) -> ActionInstance:
    selector = args.instance
    if selector is None:
        raise UsageError("an instance is required (--instance KIND or a descriptor file)")
    if selector.endswith(".json") or "/" in selector:
        return load_instance_file(selector)
    if selector == "trivial":
        return trivial_instance(args.p or 5)
    if selector == "rational":
        return rational_demo_instance()
    if selector == "custom" or getattr(args, "generators", None):
        if not getattr(args, "generators", None):
            raise UsageError("custom instances need --generators")
        return build_instance(
            "custom",
            args.p or 5,
            generators=args.generators,
            secret_domain=_csv_ints(getattr(args, "secret_domain", None)),
            t_domain=_csv_ints(getattr(args, "t_domain", None)),
            name=getattr(args, "name", None),
        )
    if selector in INSTANCE_KINDS:
        return build_instance(selector, args.p or 5)
    raise UsageError(f"unknown instance kind {selector!r} (expected one of {', '.join(_CLI_KINDS)})")


def _csv_ints(text: Optional[str]) -> Optional[list[int]]:
    if text is None:
        return None
    return [int(part) for part in text.split(",") if part.strip() != ""]


@dataclass(frozen=True)
class ExperimentConfig:
    """Effective invocation settings, echoed into every artifact.

    The worker count and output path are deliberately excluded: neither
    may influence the artifact bytes.
    """

    command: str
    seed: int
    cap: int
    format: str
    extras: dict

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "cap": self.cap,
            "format": self.format,
            **self.extras,
        }


def _config(args: argparse.Namespace, command: str, **extras) -> ExperimentConfig:
    return ExperimentConfig(
        command=command,
        seed=getattr(args, "seed", 0),
        cap=args.cap,
        format=args.format,
        extras=extras,
    )


def _artifact(schema: str, args: argparse.Namespace, config: ExperimentConfig) -> dict:
    return {
        "schema": schema,
        "tool": {"name": "triplepass", "version": __version__},
        "seed": getattr(args, "seed", 0),
        "config": config.to_dict(),
    }


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _prior_json(prior: dict) -> dict:
    return {str(s.value): str(mass) for s, mass in sorted(prior.items(), key=lambda kv: kv[0].value)}


def _load_prior(path: Optional[str], instance: ActionInstance):
    if path is None:
        return None
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    field = instance.field
    return {field.scalar(int(res)): Fraction(mass) for res, mass in raw.items()}


def _leakage_dict(report: LeakageReport) -> dict:
    return {
        "instance": report.instance,
        "mutual_information_bits": report.mutual_information_bits,
        "zero_leakage": report.zero_leakage,
        "transcripts_examined": report.transcripts_examined,
        "prior": _prior_json(report.prior),
    }


def _posterior_dict(report: PosteriorReport) -> dict:
    posterior = sorted(report.posterior.items(), key=lambda kv: kv[0].value)
    return {
        "transcript": transcript_to_dict(report.transcript),
        "prior": _prior_json(report.prior),
        "posterior": {str(s.value): str(mass) for s, mass in posterior},
        "posterior_float": {str(s.value): float(mass) for s, mass in posterior},
        "support": [s.value for s in report.support],
        "uniform": report.uniform,
        "witness_count": report.witness_count,
    }


def _search_dict(report: SearchReport) -> dict:
    entries = []
    for entry in report.entries:
        entries.append(
            {
                "descriptor": entry.descriptor,
                "group_order": entry.group_order,
                "abelian": entry.abelian,
                "reports": [r.to_json_dict() for r in entry.reports],
                "leakage": _leakage_dict(entry.leakage) if entry.leakage else None,
                "skipped": entry.skipped,
                "candidate": entry.candidate,
            }
        )
    return {
        "p": report.p,
        "max_generators": report.max_generators,
        "complete": report.complete,
        "subgroups_examined": report.subgroups_examined,
        "entries": entries,
        "candidates": list(report.candidates),
    }


def _print_session(outcome, file=None) -> None:
    file = file if file is not None else sys.stdout
    truth = outcome.transcript.ground_truth
    print(f"  v  = {format_point_of(truth)}", file=file)
    print(f"  A  = {format_matrix(truth.mask_a)}", file=file)
    print(f"  B  = {format_matrix(truth.mask_b)}", file=file)
    print(f"  pass 1  alice -> bob    v1 = {format_point(outcome.transcript.v1)}", file=file)
    print(f"  pass 2  bob   -> alice  v2 = {format_point(outcome.transcript.v2)}", file=file)
    print(f"  pass 3  alice -> bob    v3 = {format_point(outcome.transcript.v3)}", file=file)
    print(f"  pass 4  bob unmasks     v4 = {format_point(outcome.v4)}", file=file)
    if outcome.success:
        print("  round trip: OK (v4 = v)", file=file)
    else:
        print("  round trip: FAILED (v4 != v; the masks do not commute on v)", file=file)


def format_point_of(truth) -> str:
    return f"(s={truth.s}, t={truth.t})"


def cmd_demo(args: argparse.Namespace) -> int:
    rng = random.Random(args.seed)

    if args.rational:
        instance = rational_demo_instance()
        consistent = True
        for i in range(args.sessions):
            s = sample_rational_scalar(rng, nonzero=True)
            outcome = run_session(instance, s, rng, session_id=i)
            truth = outcome.transcript.ground_truth
            commute = truth.mask_a.commutes_with(truth.mask_b)
            print(f"rational demo session {i}: secret s = {s}")
            _print_session(outcome)
            print(f"  masks commute: {'yes' if commute else 'no'}")
            if commute and not outcome.success:
                consistent = False
        return EXIT_OK if consistent else EXIT_FAIL

    if args.instance is not None:
        instance = _resolve_instance(args)
        if not instance.is_finite:
            raise UsageError("use --rational for the rational demo")
        s = instance.secret_domain[rng.randrange(len(instance.secret_domain))]
        outcome = run_session(instance, s, rng)
        print(f"three-pass demo: {instance.name}")
        _print_session(outcome)
        return EXIT_OK if outcome.success else EXIT_FAIL

    # Scripted default: the general-linear failure, then a commuting success.
    gl2 = build_instance("general-linear", 2)
    f2 = gl2.field
    enc = SecretEncoding(f2.one, f2.zero, Point(f2.one, f2.zero))
    mask_a = Mat2.from_values(f2, 1, 1, 0, 1)
    mask_b = Mat2.from_values(f2, 1, 0, 1, 1)
    failure = run_session_with(gl2, enc, mask_a, mask_b)
    print("three-pass demo: general-linear masks over F2 (round trip breaks)")
    _print_session(failure)

    diag = build_instance("diagonal", 5)
    f5 = diag.field
    enc5 = SecretEncoding(f5.scalar(2), f5.scalar(3), Point(f5.scalar(2), f5.scalar(3)))
    success = run_session_with(
        diag,
        enc5,
        Mat2.from_values(f5, 2, 0, 0, 1),
        Mat2.from_values(f5, 3, 0, 0, 4),
    )
    print("three-pass demo: diagonal masks over F5 (round trip holds)")
    _print_session(success)

    return EXIT_OK if (not failure.success and success.success) else EXIT_FAIL


def cmd_run(args: argparse.Namespace) -> int:
    instance = _resolve_instance(args)
    rng = random.Random(args.seed)
    fixed_secret = None
    if args.secret is not None:
        if instance.is_finite:
            fixed_secret = parse_scalar(args.secret, instance.field)
        else:
            fixed_secret = parse_scalar(args.secret, instance.field)

    outcomes = []
    for i in range(args.sessions):
        if fixed_secret is not None:
            s = fixed_secret
        elif instance.is_finite:
            s = instance.secret_domain[rng.randrange(len(instance.secret_domain))]
        else:
            s = sample_rational_scalar(rng, nonzero=True)
        outcomes.append(run_session(instance, s, rng, session_id=i))

    config = _config(
        args,
        "run",
        instance=instance.name,
        descriptor=instance_to_descriptor(instance),
        sessions=args.sessions,
        lab_view=bool(args.lab_view),
    )

    if args.format == "csv":
        lines = [
            "# schema: triplepass/run-success/v1",
            f"# tool: triplepass {__version__}",
            f"# seed: {args.seed}",
            f"# instance: {instance.name}",
            "session,success",
        ]
        lines += [f"{o.transcript.session_id},{str(o.success).lower()}" for o in outcomes]
        _emit("\n".join(lines) + "\n", args.out)
        return EXIT_OK

    if args.format == "human":
        import io

        buf = io.StringIO()
        print(f"instance {instance.name}, seed {args.seed}", file=buf)
        for o in outcomes:
            print(f"session {o.transcript.session_id}:", file=buf)
            _print_session(o, file=buf)
        _emit(buf.getvalue(), args.out)
        return EXIT_OK

    artifact = _artifact("triplepass/run/v1", args, config)
    artifact["transcripts"] = [
        transcript_to_dict(o.transcript, lab_view=bool(args.lab_view)) for o in outcomes
    ]
    artifact["successes"] = [o.success for o in outcomes]
    _emit(_json_text(artifact), args.out)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    cap = args.cap

    if args.transcripts:
        with open(args.transcripts, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if isinstance(data, dict) and "transcripts" in data:
            transcript_dicts = data["transcripts"]
            descriptor = data.get("config", {}).get("descriptor")
        elif isinstance(data, list):
            transcript_dicts, descriptor = data, None
        else:
            transcript_dicts, descriptor = [data], None
        if args.instance is not None:
            instance = _resolve_instance(args)
        elif descriptor is not None:
            instance = instance_from_descriptor(descriptor)
        else:
            raise UsageError("transcript file carries no instance descriptor; pass --instance")
        prior = _load_prior(args.prior, instance)

        reports = []
        for i, d in enumerate(transcript_dicts):
            transcript = transcript_from_dict(d, session_id=i)
            reports.append(posterior_from_transcript(transcript, instance, prior, cap=cap))

        config = _config(
            args,
            "analyze",
            instance=instance.name,
            descriptor=instance_to_descriptor(instance),
            transcripts=args.transcripts,
        )
        artifact = _artifact("triplepass/posterior/v1", args, config)
        artifact["reports"] = [_posterior_dict(r) for r in reports]
        if args.format == "human":
            lines = []
            for r in reports:
                support = ",".join(str(s.value) for s in r.support)
                lines.append(
                    f"transcript {transcript_to_dict(r.transcript)}: support {{{support}}},"
                    f" uniform={r.uniform}, witnesses={r.witness_count}"
                )
            _emit("\n".join(lines) + "\n", args.out)
        else:
            _emit(_json_text(artifact), args.out)
        return EXIT_OK

    instance = _resolve_instance(args)
    prior = _load_prior(args.prior, instance)
    report = exact_mutual_information(instance, prior, cap=cap, workers=args.workers)
    config = _config(
        args,
        "analyze",
        instance=instance.name,
        descriptor=instance_to_descriptor(instance),
    )
    artifact = _artifact("triplepass/leakage/v1", args, config)
    artifact["report"] = _leakage_dict(report)
    if args.format == "human":
        _emit(
            f"instance {report.instance}: MI = {report.mutual_information_bits} bits,"
            f" zero_leakage={report.zero_leakage},"
            f" transcripts={report.transcripts_examined}\n",
            args.out,
        )
    else:
        _emit(_json_text(artifact), args.out)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    instance = _resolve_instance(args)
    if not instance.is_finite:
        raise UsageError("condition checks require a finite instance")
    group = instance.group
    reports: list[ConditionReport] = [
        is_commutator_fixed_set(secret_square_points(instance), group, instance.name),
        check_masking_coverage(instance, cap=args.cap),
        check_transcript_equivalence(instance, cap=args.cap),
    ]
    config = _config(
        args,
        "check",
        instance=instance.name,
        descriptor=instance_to_descriptor(instance),
    )
    artifact = _artifact("triplepass/check/v1", args, config)
    artifact["reports"] = [r.to_json_dict() for r in reports]
    if args.format == "human":
        lines = [f"{r.condition}: {r.verdict} (work {r.work})" for r in reports]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(_json_text(artifact), args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_search(args: argparse.Namespace) -> int:
    from .analysis import search_instances

    report = search_instances(
        args.p, args.max_generators, cap=args.cap, with_leakage=not args.no_leakage
    )
    config = _config(args, "search", p=args.p, max_generators=args.max_generators)
    artifact = _artifact("triplepass/search/v1", args, config)
    artifact["report"] = _search_dict(report)
    if args.format == "human":
        lines = [
            f"p={report.p}: {report.subgroups_examined} subgroups,"
            f" {len(report.entries)} instances, complete={report.complete}"
        ]
        for entry in report.entries:
            verdicts = ", ".join(f"{r.condition}={r.verdict}" for r in entry.reports)
            mi = entry.leakage.mutual_information_bits if entry.leakage else None
            lines.append(
                f"  {entry.descriptor['name']} (order {entry.group_order}): {verdicts}, MI={mi}"
            )
        lines.append(f"candidates: {list(report.candidates)}")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(_json_text(artifact), args.out)
    return EXIT_OK if report.complete else EXIT_CAP


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    parser.add_argument("--cap", type=int, default=None, help="work cap (inner evaluations)")
    parser.add_argument("--out", type=str, default=None, help="output path (default stdout)")
    parser.add_argument(
        "--format", choices=("json", "csv", "human"), default="json", help="output format"
    )
    parser.add_argument("--workers", type=int, default=1, help="analysis shard count")


def _add_instance_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--instance",
        type=str,
        default=None,
        help=f"instance kind ({', '.join(_CLI_KINDS)}) or a descriptor .json path",
    )
    parser.add_argument("--p", type=int, default=None, help="prime modulus")
    parser.add_argument(
        "--generators", action="append", default=None, help="matrix literal (repeatable, custom kind)"
    )
    parser.add_argument("--secret-domain", dest="secret_domain", type=str, default=None)
    parser.add_argument("--t-domain", dest="t_domain", type=str, default=None)
    parser.add_argument("--name", type=str, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triplepass",
        description="Three-pass masking protocol lab: run it, break it, measure the leak.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", help="scripted failure and success demonstrations")
    _add_common(demo)
    _add_instance_flags(demo)
    demo.add_argument("--rational", action="store_true", help="bounded rational matrix demo")
    demo.add_argument("--sessions", type=int, default=3, help="rational demo session count")
    demo.set_defaults(func=cmd_demo)

    run = sub.add_parser("run", help="run seeded sessions and write transcripts")
    _add_common(run)
    _add_instance_flags(run)
    run.add_argument("--sessions", type=int, default=1)
    run.add_argument("--secret", type=str, default=None, help="fixed secret literal")
    run.add_argument("--lab-view", dest="lab_view", action="store_true",
                     help="include ground truth in transcripts")
    run.set_defaults(func=cmd_run)

    analyze = sub.add_parser("analyze", help="posterior or whole-instance leakage")
    _add_common(analyze)
    _add_instance_flags(analyze)
    analyze.add_argument("--transcripts", type=str, default=None, help="transcript file to analyze")
    analyze.add_argument("--prior", type=str, default=None, help="prior JSON path")
    analyze.set_defaults(func=cmd_analyze)

    check = sub.add_parser("check", help="run the action condition checkers")
    _add_common(check)
    _add_instance_flags(check)
    check.set_defaults(func=cmd_check)

    search = sub.add_parser("search", help="census of instances from small generating sets")
    _add_common(search)
    search.add_argument("--p", type=int, required=True)
    search.add_argument("--max-generators", dest="max_generators", type=int, default=2)
    search.add_argument("--no-leakage", dest="no_leakage", action="store_true")
    search.set_defaults(func=cmd_search)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.cap is None:
            args.cap = _default_cap()
        if args.cap <= 0:
            raise UsageError("work cap must be positive")
        if args.format == "csv" and args.command != "run":
            raise UsageError("csv output is only available for per-session run tables")
        return args.func(args)
    except WorkCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InconsistentTranscriptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, json.JSONDecodeError, TriplePassError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
