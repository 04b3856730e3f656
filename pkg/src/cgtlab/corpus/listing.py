"""Fetcher for a subreddit's public JSON listing (no credentials).

One GET per page, cursor pagination, a fixed politeness delay between
requests, and a couple of retries on transient failures. The HTTP opener
and the sleep function are injectable so tests replay recorded pages.
"""

from __future__ import annotations

import json
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Callable

from ..errors import NetworkError
from .posts import RawPost, hash_author

DEFAULT_USER_AGENT = "cgtlab/0.1 (research corpus builder)"
PAGE_SIZE = 100
POLITENESS_DELAY_S = 1.0
MAX_RETRIES = 3


@dataclass(frozen=True)
class ListingConfig:
    user_agent: str = DEFAULT_USER_AGENT
    delay_s: float = POLITENESS_DELAY_S
    retries: int = MAX_RETRIES
    salt: str = ""


def _default_opener(url: str, headers: dict[str, str]) -> bytes:
    req = urllib.request.Request(url, headers=headers)
    with urllib.request.urlopen(req, timeout=30) as resp:
        return resp.read()


def _item_to_post(item: dict, salt: str) -> RawPost | None:
    kind = item.get("kind")
    data = item.get("data", {})
    if kind == "t3":
        text = "\n\n".join(s for s in (data.get("title", ""), data.get("selftext", "")) if s)
        post_kind, parent = "post", None
    elif kind == "t1":
        text = data.get("body", "")
        post_kind, parent = "comment", data.get("parent_id")
    else:
        return None
    post_id = data.get("name") or data.get("id")
    if not post_id:
        return None
    return RawPost(
        id=str(post_id),
        subreddit=str(data.get("subreddit", "")),
        author_ref=hash_author(str(data.get("author", "")), salt),
        created_utc=int(data.get("created_utc", 0) or 0),
        kind=post_kind,
        parent_id=str(parent) if parent else None,
        text=text,
    )


def fetch_public_listing(
    subreddit: str,
    page_limit: int,
    *,
    config: ListingConfig = ListingConfig(),
    opener: Callable[[str, dict[str, str]], bytes] = _default_opener,
    sleep: Callable[[float], None] = time.sleep,
) -> list[RawPost]:
    """Fetch up to page_limit pages of /r/<subreddit>/new.json."""
    if not subreddit:
        raise NetworkError("subreddit name must be non-empty")
    posts: list[RawPost] = []
    after: str | None = None
    headers = {"User-Agent": config.user_agent}
    for page in range(page_limit):
        url = f"https://www.reddit.com/r/{subreddit}/new.json?limit={PAGE_SIZE}"
        if after:
            url += f"&after={after}"
        if page > 0:
            sleep(config.delay_s)
        payload = _fetch_with_retries(url, headers, config, opener, sleep)
        try:
            data = json.loads(payload)["data"]
        except (ValueError, KeyError) as exc:
            raise NetworkError(f"malformed listing payload: {exc}", endpoint=url) from exc
        for item in data.get("children", []):
            post = _item_to_post(item, config.salt)
            if post is not None:
                posts.append(post)
        after = data.get("after")
        if not after:
            break
    return posts


def _fetch_with_retries(url, headers, config: ListingConfig, opener, sleep) -> bytes:
    last: Exception | None = None
    for attempt in range(config.retries):
        try:
            return opener(url, headers)
        except urllib.error.HTTPError as exc:
            last = exc
            if exc.code == 429:
                sleep(config.delay_s * (attempt + 1))
                continue
            raise NetworkError(
                f"HTTP {exc.code} fetching {url}", endpoint=url, retries=attempt
            ) from exc
        except (urllib.error.URLError, OSError) as exc:
            last = exc
            sleep(config.delay_s)
    raise NetworkError(
        f"giving up on {url} after {config.retries} attempts: {last}",
        endpoint=url,
        retries=config.retries,
    )
