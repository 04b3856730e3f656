from __future__ import annotations

import io
import json

import pytest

from cgtlab.corpus import fetch_public_listing, hash_author, ingest_jsonl
from cgtlab.errors import IngestError, NetworkError


def _line(**kw):
    rec = {"id": "a", "subreddit": "r", "author": "alice", "created_utc": 1,
           "kind": "post", "parent_id": None, "text": "hello"}
    rec.update(kw)
    return json.dumps(rec)


def test_empty_stream():
    result = ingest_jsonl(io.StringIO(""))
    assert result.posts == [] and result.rejects == []


def test_malformed_line_recorded_and_ingest_continues():
    lines = [_line(id="1"), "{broken", _line(id="2"), _line(id="3")]
    result = ingest_jsonl(iter(l + "\n" for l in lines))
    assert [p.id for p in result.posts] == ["1", "2", "3"]
    assert [r.line_no for r in result.rejects] == [2]


def test_duplicate_ids_keep_first():
    lines = [_line(id="x", text="first"), _line(id="x", text="second")]
    result = ingest_jsonl(iter(l + "\n" for l in lines))
    assert len(result.posts) == 1
    assert result.posts[0].text == "first"


def test_all_rejected_raises():
    with pytest.raises(IngestError):
        ingest_jsonl(io.StringIO("nope\nalso nope\n"))


def test_comment_requires_parent():
    lines = [_line(id="1", kind="comment", parent_id=None), _line(id="2")]
    result = ingest_jsonl(iter(l + "\n" for l in lines))
    assert [p.id for p in result.posts] == ["2"]
    assert result.rejects[0].line_no == 1


def test_authors_salted_hashed():
    result = ingest_jsonl(io.StringIO(_line(id="1") + "\n"), salt="pepper")
    assert result.posts[0].author_ref == hash_author("alice", "pepper")
    assert "alice" not in result.posts[0].author_ref


def _page(children, after):
    return json.dumps({"data": {"children": children, "after": after}}).encode()


def _t3(name, title):
    return {"kind": "t3", "data": {"name": name, "title": title, "selftext": "",
                                   "subreddit": "tutors", "author": "a", "created_utc": 5}}


def test_listing_zero_pages_makes_no_request():
    def opener(url, headers):  # pragma: no cover - must not be called
        raise AssertionError("no request expected")

    assert fetch_public_listing("tutors", 0, opener=opener, sleep=lambda s: None) == []


def test_listing_two_pages_in_order():
    pages = [
        _page([_t3(f"t3_{i}", f"post {i}") for i in range(5)], "cur1"),
        _page([_t3(f"t3_{i+5}", f"post {i+5}") for i in range(3)], None),
    ]
    calls = []

    def opener(url, headers):
        calls.append(url)
        assert "User-Agent" in headers
        return pages[len(calls) - 1]

    posts = fetch_public_listing("tutors", 5, opener=opener, sleep=lambda s: None)
    assert [p.id for p in posts] == [f"t3_{i}" for i in range(8)]
    assert len(calls) == 2  # stopped at exhausted cursor
    assert "after=cur1" in calls[1]


def test_listing_http_error_names_endpoint():
    import urllib.error

    def opener(url, headers):
        raise urllib.error.HTTPError(url, 404, "not found", None, None)

    with pytest.raises(NetworkError) as exc:
        fetch_public_listing("missing", 1, opener=opener, sleep=lambda s: None)
    assert "missing" in str(exc.value.endpoint)
