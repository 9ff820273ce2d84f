"""Command line server for the masking protocol.

Two modes. Default: serve stdin/stdout, where a blank line closes each
request batch and the reply is one response line per request followed
by a blank line. Split mode: ``--task-file``/``--result-file`` reads a
whole task file and writes one result file, for runs on machines that
only share a filesystem.

Exit codes: 0 success, 2 bad invocation or unreadable input,
4 model load failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .protocol import (
    RequestError,
    iter_batches,
    parse_request,
    read_request_lines,
    recovered_id,
    response_line,
    write_result_file,
)
from .scoring import MaskedWordScorer, ModelLoadError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlm-scorer",
        description="Score masked-word probabilities with a pretrained masked LM.",
    )
    parser.add_argument(
        "--model",
        required=True,
        help="model directory or hub identifier for AutoModelForMaskedLM",
    )
    parser.add_argument(
        "--batch-size", type=int, default=16, help="requests per forward pass"
    )
    parser.add_argument(
        "--max-len",
        type=int,
        default=128,
        help="token budget per input; longer contexts are clipped around the mask",
    )
    parser.add_argument("--device", default="cpu", help="torch device spec")
    parser.add_argument(
        "--task-file", type=Path, help="read requests from this file instead of stdin"
    )
    parser.add_argument(
        "--result-file", type=Path, help="write responses here instead of stdout"
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    return parser


def _score_lines(scorer: MaskedWordScorer, lines: list[str]) -> list[dict]:
    """Parse and score a batch; malformed lines get refusals when possible."""
    slots: list[dict | None] = []
    requests = []
    for line in lines:
        try:
            requests.append(parse_request(line))
            slots.append(None)
        except RequestError as exc:
            rid = recovered_id(line)
            if rid is None:
                # No id to answer under; logged and dropped.
                print(
                    f"mlm-scorer: dropping unanswerable request: {exc}",
                    file=sys.stderr,
                )
            else:
                slots.append({"id": rid, "refused": "bad-request"})
    scored = iter(scorer.score_requests(requests))
    return [slot if slot is not None else next(scored) for slot in slots]


def _serve_stream(scorer: MaskedWordScorer, stdin, stdout) -> int:
    try:
        for batch in iter_batches(stdin):
            for response in _score_lines(scorer, batch):
                stdout.write(response_line(response) + "\n")
            stdout.write("\n")
            stdout.flush()
    except BrokenPipeError:
        # The consumer went away between batches; nothing left to serve.
        return 0
    return 0


def _run_split_mode(scorer: MaskedWordScorer, task_file: Path, result_file: Path) -> int:
    try:
        lines = read_request_lines(task_file)
    except OSError as exc:
        print(f"mlm-scorer: cannot read task file: {exc}", file=sys.stderr)
        return 2
    responses = _score_lines(scorer, lines)
    header = [
        f"mlm-scorer v{__version__} model={scorer.model_id}",
        f"requests={len(lines)} responses={len(responses)}",
    ]
    write_result_file(result_file, header, (response_line(r) for r in responses))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if (args.task_file is None) != (args.result_file is None):
        parser.error("--task-file and --result-file must be given together")
    if args.batch_size < 1:
        parser.error("--batch-size must be >= 1")
    if args.max_len < 8:
        parser.error("--max-len must be >= 8")
    try:
        scorer = MaskedWordScorer(
            args.model,
            device=args.device,
            batch_size=args.batch_size,
            max_len=args.max_len,
        )
    except ModelLoadError as exc:
        print(f"mlm-scorer: {exc}", file=sys.stderr)
        return 4
    if args.task_file is not None:
        return _run_split_mode(scorer, args.task_file, args.result_file)
    return _serve_stream(scorer, sys.stdin, sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
