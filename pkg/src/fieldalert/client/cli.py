"""Command-line field client.

Verbs: report (build and submit, interactive or from an answers file),
watch (stream alerts for topics), verify, export. A --profile flag
simulates a weak link; --seed makes its behavior reproducible.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import uuid
from pathlib import Path

from ..errors import FieldAlertError
from .api import LinkProfile, LossyLink, ServerClient, submit_with_retry, watch
from .builder import build_report


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fieldalert-client",
        description="Report disasters and watch nearby alerts.")
    parser.add_argument("--server", default="http://127.0.0.1:8464",
                        help="server base URL")
    parser.add_argument("--profile", default="",
                        help="simulated link as drop:latency_ms:jitter_ms")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for the simulated link")

    verbs = parser.add_subparsers(dest="verb", required=True)

    report = verbs.add_parser("report", help="build and submit a report")
    report.add_argument("--answers", help="JSON answers file (non-interactive)")
    report.add_argument("--key", default="",
                        help="idempotency key (default: random)")
    report.add_argument("--max-attempts", type=int, default=8)
    report.add_argument("--reporter", help="reporter actor id")
    report.add_argument("--phone", help="reporter phone")

    watch_p = verbs.add_parser("watch", help="stream alerts for topics")
    watch_p.add_argument("--subscriber", required=True)
    watch_p.add_argument("--topics", default="",
                         help="comma-separated topic ids")
    watch_p.add_argument("--cursor-file", default="",
                         help="cursor state path (default: ~/.fieldalert-cursors-<subscriber>.json)")
    watch_p.add_argument("--rounds", type=int, default=None,
                         help="stop after N poll rounds (default: run forever)")
    watch_p.add_argument("--timeout-ms", type=int, default=10_000)

    verify = verbs.add_parser("verify", help="vouch for a report")
    verify.add_argument("--report", required=True)
    verify.add_argument("--actor", required=True)
    verify.add_argument("--note", default="")

    export = verbs.add_parser("export", help="export a report as CAP XML")
    export.add_argument("--report", required=True)
    export.add_argument("--out", help="output file (default: stdout)")

    return parser


def _make_link(args: argparse.Namespace) -> LossyLink | None:
    if not args.profile:
        return None
    profile = LinkProfile.parse(args.profile)
    return LossyLink(profile, random.Random(args.seed))


def _run_report(client: ServerClient, link: LossyLink | None,
                args: argparse.Namespace) -> int:
    answers = None
    if args.answers:
        answers = json.loads(Path(args.answers).read_text(encoding="utf-8"))
        if args.reporter:
            answers["reporter"] = args.reporter
        if args.phone:
            answers["reporter_phone"] = args.phone
    report = build_report(
        answers, resolver=lambda lat, lon: client.locate(lat, lon))
    key = args.key or uuid.uuid4().hex
    report_id = submit_with_retry(client, report, key, link=link,
                                  max_attempts=args.max_attempts)
    print(report_id)
    return 0


def _run_watch(client: ServerClient, link: LossyLink | None,
               args: argparse.Namespace) -> int:
    topics = [t for t in args.topics.split(",") if t]
    cursor_path = args.cursor_file or str(
        Path.home() / f".fieldalert-cursors-{args.subscriber}.json")
    stream = watch(client, args.subscriber, topics, cursor_path,
                   poll_timeout_ms=args.timeout_ms, link=link,
                   max_rounds=args.rounds)
    for message in stream:
        print(json.dumps(message.to_dict(), sort_keys=True), flush=True)
    return 0


def _run_verify(client: ServerClient, args: argparse.Namespace) -> int:
    view = client.verify(args.report, args.actor, note=args.note)
    print(json.dumps(view["reliability"], sort_keys=True))
    return 0


def _run_export(client: ServerClient, args: argparse.Namespace) -> int:
    xml = client.export_cap(args.report)
    if args.out:
        Path(args.out).write_bytes(xml)
    else:
        sys.stdout.buffer.write(xml + b"\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    client = ServerClient(args.server)
    try:
        link = _make_link(args)
        if args.verb == "report":
            return _run_report(client, link, args)
        if args.verb == "watch":
            return _run_watch(client, link, args)
        if args.verb == "verify":
            return _run_verify(client, args)
        return _run_export(client, args)
    except (FieldAlertError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    raise SystemExit(main())
