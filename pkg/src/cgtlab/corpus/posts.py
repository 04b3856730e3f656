"""Raw post records and JSONL ingestion."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import IO, Iterable

from ..errors import IngestError

KINDS = ("post", "comment")


@dataclass(frozen=True)
class RawPost:
    id: str
    subreddit: str
    author_ref: str
    created_utc: int
    kind: str
    parent_id: str | None
    text: str


@dataclass(frozen=True)
class Reject:
    line_no: int
    reason: str


@dataclass
class IngestResult:
    posts: list[RawPost]
    rejects: list[Reject]


def hash_author(author: str, salt: str) -> str:
    return hashlib.sha256(f"{salt}:{author}".encode("utf-8")).hexdigest()[:16]


def _parse_record(obj: dict, salt: str) -> RawPost:
    for key in ("id", "kind", "text"):
        if key not in obj:
            raise ValueError(f"missing field {key!r}")
    post_id = str(obj["id"])
    if not post_id:
        raise ValueError("empty id")
    kind = obj["kind"]
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    parent_id = obj.get("parent_id") or None
    if kind == "comment" and parent_id is None:
        raise ValueError("comment without parent_id")
    if "author_hash" in obj:
        author_ref = str(obj["author_hash"])
    elif "author" in obj:
        author_ref = hash_author(str(obj["author"]), salt)
    else:
        author_ref = ""
    return RawPost(
        id=post_id,
        subreddit=str(obj.get("subreddit", "")),
        author_ref=author_ref,
        created_utc=int(obj.get("created_utc", 0)),
        kind=kind,
        parent_id=parent_id,
        text=str(obj["text"]),
    )


def ingest_jsonl(stream: IO[str] | Iterable[str], *, salt: str = "") -> IngestResult:
    """Parse line-delimited post records.

    Malformed lines land in the rejects report (1-based line numbers) and
    ingestion continues; duplicate ids keep the first occurrence. Raises
    IngestError only when every line was rejected.
    """
    posts: list[RawPost] = []
    rejects: list[Reject] = []
    seen: set[str] = set()
    n_lines = 0
    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        n_lines += 1
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("record is not an object")
            post = _parse_record(obj, salt)
        except (ValueError, TypeError) as exc:
            rejects.append(Reject(line_no=line_no, reason=str(exc)))
            continue
        if post.id in seen:
            continue
        seen.add(post.id)
        posts.append(post)
    if n_lines > 0 and not posts:
        raise IngestError(f"all {n_lines} lines rejected; first: {rejects[0].reason}")
    return IngestResult(posts=posts, rejects=rejects)


def write_jsonl(posts: Iterable[RawPost], fh: IO[str]) -> None:
    for p in posts:
        fh.write(
            json.dumps(
                {
                    "id": p.id,
                    "subreddit": p.subreddit,
                    "author_hash": p.author_ref,
                    "created_utc": p.created_utc,
                    "kind": p.kind,
                    "parent_id": p.parent_id,
                    "text": p.text,
                },
                ensure_ascii=False,
                sort_keys=True,
            )
            + "\n"
        )
