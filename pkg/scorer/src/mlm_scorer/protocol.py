"""JSON-lines request/response wire format.

One request per line: ``{"id", "text", "offset", "length", "target"}``.
One response per line, carrying the request id plus either ``prob`` (a
finite float) or ``refused`` (a reason string); responses may add
metadata flags such as ``truncated``. Lines starting with ``#`` are
comments. On a stream, a blank line terminates a batch in each
direction; in files, comments and blank lines are simply skipped.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterable, Iterator


class RequestError(ValueError):
    """A request line that does not follow the wire format."""


_STRING_FIELDS = ("id", "text", "target")
_INT_FIELDS = ("offset", "length")


def parse_request(line: str) -> dict:
    """Decode and validate one request line."""
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RequestError(f"request is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise RequestError("request must be a JSON object")
    for key in _STRING_FIELDS:
        if not isinstance(data.get(key), str):
            raise RequestError(f"request field {key!r} must be a string")
    for key in _INT_FIELDS:
        value = data.get(key)
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise RequestError(f"request field {key!r} must be a non-negative integer")
    return data


def recovered_id(line: str) -> str | None:
    """Best-effort id extraction from a malformed request line.

    Lets the server refuse a bad request by id instead of dropping it,
    keeping the one-response-per-request accounting intact.
    """
    try:
        data = json.loads(line)
    except json.JSONDecodeError:
        return None
    if isinstance(data, dict) and isinstance(data.get("id"), str):
        return data["id"]
    return None


def response_line(response: dict) -> str:
    """Canonical one-line encoding of a response object."""
    return json.dumps(response, sort_keys=True, separators=(",", ":"))


def iter_batches(stream: IO[str]) -> Iterator[list[str]]:
    """Yield blank-line-delimited batches of request lines.

    Comment lines are dropped; a final unterminated batch is yielded at
    EOF so file-shaped input works on a stream too.
    """
    batch: list[str] = []
    for raw in stream:
        line = raw.rstrip("\n")
        if not line.strip():
            if batch:
                yield batch
                batch = []
            continue
        if line.lstrip().startswith("#"):
            continue
        batch.append(line)
    if batch:
        yield batch


def read_request_lines(path: str | Path) -> list[str]:
    """All request lines of a task file, comments and blanks skipped."""
    lines = []
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            lines.append(line)
    return lines


def write_result_file(
    path: str | Path, header: Iterable[str], lines: Iterable[str]
) -> None:
    """Write a result file: '# ' header lines, then one response per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for note in header:
            handle.write(f"# {note}\n")
        for line in lines:
            handle.write(line + "\n")
