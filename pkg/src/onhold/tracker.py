"""Issue-tracker gateway: fetch issue state and decide ready-to-remove.

Network access sits behind a transport seam so the whole pipeline runs
against recorded fixture files ({tracker}_{KEY}.json) with zero network
traffic.  Auth tokens come only from the environment (ITS_GITHUB_TOKEN,
ITS_JIRA_TOKEN, ITS_BUGZILLA_TOKEN), never from configuration files.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Mapping, Protocol, Sequence

from .errors import (
    ConfigError,
    IssueNotFoundError,
    TrackerAuthError,
    TrackerError,
    TrackerTemporaryError,
)
from .issues import IssueReference, TrackerKind
from .miner import CommentLifecycle
from .timestamps import format_timestamp, parse_timestamp

log = logging.getLogger("onhold.tracker")

READY_STATUSES = frozenset({"resolved", "closed", "verified"})
READY_RESOLUTION = "fixed"

_TOKEN_ENV = {
    TrackerKind.GITHUB: "ITS_GITHUB_TOKEN",
    TrackerKind.JIRA: "ITS_JIRA_TOKEN",
    TrackerKind.BUGZILLA: "ITS_BUGZILLA_TOKEN",
}


@dataclass(frozen=True)
class IssueRecord:
    tracker: TrackerKind
    key: str
    raw_status: str
    raw_resolution: str | None
    resolved_date: datetime | None
    fetched_at: datetime

    def __post_init__(self) -> None:
        if not self.key:
            raise ValueError("issue record without a key")


@dataclass(frozen=True)
class TrackerConfig:
    tracker: TrackerKind
    base_url: str = ""       # Bugzilla/Jira server root; GitHub API root override
    repo: str = ""           # GitHub owner/name
    fixture_dir: str | Path | None = None
    cache_dir: str | Path | None = None
    cache_ttl_seconds: int = 24 * 3600
    max_retries: int = 3
    timeout_seconds: float = 10.0
    concurrency: int = 4

    def __post_init__(self) -> None:
        if self.tracker is TrackerKind.GITHUB:
            if not self.repo and self.fixture_dir is None:
                raise ConfigError("GitHub tracker needs repo='owner/name'")
        elif not self.base_url and self.fixture_dir is None:
            raise ConfigError(f"{self.tracker.value} tracker needs base_url")


class Transport(Protocol):
    def fetch(self, config: TrackerConfig, key: str) -> tuple[int, dict]:
        """Return (HTTP-style status code, decoded JSON payload)."""


def _issue_url(config: TrackerConfig, key: str) -> str:
    if config.tracker is TrackerKind.BUGZILLA:
        return f"{config.base_url.rstrip('/')}/rest/bug/{key}"
    if config.tracker is TrackerKind.GITHUB:
        root = config.base_url.rstrip("/") or "https://api.github.com"
        return f"{root}/repos/{config.repo}/issues/{key}"
    return f"{config.base_url.rstrip('/')}/rest/api/2/issue/{key}"


class HttpTransport:
    """requests-based transport with per-tracker auth headers."""

    def fetch(self, config: TrackerConfig, key: str) -> tuple[int, dict]:
        import requests

        headers = {"Accept": "application/json"}
        token = os.environ.get(_TOKEN_ENV[config.tracker], "")
        if token:
            if config.tracker is TrackerKind.BUGZILLA:
                headers["X-BUGZILLA-API-KEY"] = token
            else:
                headers["Authorization"] = f"Bearer {token}"
        response = requests.get(
            _issue_url(config, key), headers=headers, timeout=config.timeout_seconds
        )
        try:
            payload = response.json()
        except ValueError:
            payload = {}
        return response.status_code, payload


class FixtureTransport:
    """Reads recorded responses named {tracker}_{KEY}.json; no network."""

    def __init__(self, fixture_dir: str | Path):
        self.fixture_dir = Path(fixture_dir)

    def fetch(self, config: TrackerConfig, key: str) -> tuple[int, dict]:
        path = self.fixture_dir / f"{config.tracker.value}_{key}.json"
        if not path.exists():
            return 404, {}
        payload = json.loads(path.read_text(encoding="utf-8"))
        status = int(payload.pop("_http_status", 200)) if isinstance(payload, dict) else 200
        return status, payload


def _parse_payload(
    tracker: TrackerKind, key: str, payload: Mapping, fetched_at: datetime
) -> IssueRecord:
    resolved_date: datetime | None = None
    resolution: str | None = None
    if tracker is TrackerKind.BUGZILLA:
        bugs = payload.get("bugs") or [payload]
        bug = bugs[0] if bugs else {}
        status = str(bug.get("status", ""))
        resolution = bug.get("resolution") or None
        stamp = bug.get("cf_last_resolved") or (
            bug.get("last_change_time") if resolution else None
        )
        resolved_date = parse_timestamp(stamp) if stamp else None
    elif tracker is TrackerKind.GITHUB:
        status = str(payload.get("state", ""))
        stamp = payload.get("closed_at")
        resolved_date = parse_timestamp(stamp) if stamp else None
    else:
        fields = payload.get("fields", {})
        status = str((fields.get("status") or {}).get("name", ""))
        resolution_obj = fields.get("resolution")
        resolution = resolution_obj.get("name") if resolution_obj else None
        stamp = fields.get("resolutiondate")
        resolved_date = parse_timestamp(stamp) if stamp else None
    if not status:
        raise TrackerError(f"{tracker.value} issue {key}: no status in response")
    return IssueRecord(
        tracker=tracker,
        key=key,
        raw_status=status,
        raw_resolution=resolution,
        resolved_date=resolved_date,
        fetched_at=fetched_at,
    )


def is_ready_to_remove(record: IssueRecord) -> bool:
    """Whether the referenced issue is settled enough to drop the comment.

    The issue must have reached status resolved, closed, or verified
    with resolution "fixed".  GitHub has no resolution field, so a
    qualifying status alone suffices there; for Bugzilla and Jira a
    missing or non-"fixed" resolution blocks readiness.
    """
    status = record.raw_status.strip().lower()
    if status not in READY_STATUSES:
        return False
    if record.tracker is TrackerKind.GITHUB:
        return True
    resolution = (record.raw_resolution or "").strip().lower()
    return resolution == READY_RESOLUTION


class IssueGateway:
    """Fetches issue records with in-memory + on-disk caching.

    Within one gateway instance each key hits the transport at most
    once; the optional disk cache (TTL-bounded) carries records across
    runs.  Retries with exponential backoff cover rate limits and
    transient server errors.
    """

    def __init__(
        self,
        config: TrackerConfig,
        transport: Transport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], datetime] | None = None,
    ):
        self.config = config
        if transport is not None:
            self.transport = transport
        elif config.fixture_dir is not None:
            self.transport = FixtureTransport(config.fixture_dir)
        else:
            self.transport = HttpTransport()
        self._sleep = sleep
        self._clock = clock or (lambda: datetime.now(timezone.utc))
        self._memory: dict[str, IssueRecord] = {}
        self._lock = threading.Lock()

    # -- disk cache -------------------------------------------------

    def _cache_path(self, key: str) -> Path | None:
        if self.config.cache_dir is None:
            return None
        return Path(self.config.cache_dir) / f"{self.config.tracker.value}_{key}.json"

    def _read_disk(self, key: str) -> IssueRecord | None:
        path = self._cache_path(key)
        if path is None or not path.exists():
            return None
        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
            fetched_at = parse_timestamp(entry["fetched_at"])
        except (ValueError, KeyError):
            return None
        age = (self._clock() - fetched_at).total_seconds()
        if age > self.config.cache_ttl_seconds:
            return None
        return IssueRecord(
            tracker=TrackerKind.parse(entry["tracker"]),
            key=entry["key"],
            raw_status=entry["status"],
            raw_resolution=entry.get("resolution"),
            resolved_date=(
                parse_timestamp(entry["resolved_date"])
                if entry.get("resolved_date") else None
            ),
            fetched_at=fetched_at,
        )

    def _write_disk(self, record: IssueRecord) -> None:
        path = self._cache_path(record.key)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {
            "tracker": record.tracker.value,
            "key": record.key,
            "status": record.raw_status,
            "resolution": record.raw_resolution,
            "resolved_date": (
                format_timestamp(record.resolved_date)
                if record.resolved_date else None
            ),
            "fetched_at": format_timestamp(record.fetched_at),
        }
        path.write_text(json.dumps(entry, sort_keys=True), encoding="utf-8")

    # -- fetching ---------------------------------------------------

    def _fetch_uncached(self, key: str) -> IssueRecord:
        env_var = _TOKEN_ENV[self.config.tracker]
        delay = 1.0
        attempts = 0
        while True:
            status_code, payload = self.transport.fetch(self.config, key)
            if status_code == 404:
                raise IssueNotFoundError(
                    f"{self.config.tracker.value} issue {key} not found"
                )
            if status_code in (401, 403):
                raise TrackerAuthError(
                    f"{self.config.tracker.value} rejected the request for {key} "
                    f"(HTTP {status_code}); set {env_var}"
                )
            if status_code == 429 or status_code >= 500:
                attempts += 1
                if attempts > self.config.max_retries:
                    raise TrackerTemporaryError(
                        f"{self.config.tracker.value} issue {key}: "
                        f"HTTP {status_code} after {attempts} attempts"
                    )
                self._sleep(delay)
                delay *= 2
                continue
            if status_code != 200:
                raise TrackerError(
                    f"{self.config.tracker.value} issue {key}: HTTP {status_code}"
                )
            return _parse_payload(self.config.tracker, key, payload, self._clock())

    def fetch(self, key: str) -> IssueRecord:
        with self._lock:
            cached = self._memory.get(key)
        if cached is not None:
            return cached
        record = self._read_disk(key)
        if record is None:
            record = self._fetch_uncached(key)
            self._write_disk(record)
        with self._lock:
            self._memory[key] = record
        return record

    def fetch_many(self, keys: Iterable[str]) -> dict[str, IssueRecord | None]:
        """Fetch concurrently; failed keys map to None (warning logged).

        Auth rejections are not per-issue conditions and propagate
        instead of being recorded as missing issues.
        """
        unique = list(dict.fromkeys(keys))
        results: dict[str, IssueRecord | None] = {}

        def one(key: str) -> tuple[str, IssueRecord | None]:
            try:
                return key, self.fetch(key)
            except TrackerAuthError:
                raise
            except TrackerError as exc:
                log.warning("skipping issue %s: %s", key, exc)
                return key, None

        if not unique:
            return results
        workers = max(1, min(self.config.concurrency, len(unique)))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for key, record in pool.map(one, unique):
                results[key] = record
        return results


def fetch_issue(
    reference: IssueReference | str,
    config: TrackerConfig,
    transport: Transport | None = None,
) -> IssueRecord:
    """One-shot fetch of the issue behind a reference (or a bare key)."""
    key = reference.key if isinstance(reference, IssueReference) else str(reference)
    return IssueGateway(config, transport).fetch(key)


@dataclass(frozen=True)
class Recommendation:
    lifecycle: CommentLifecycle
    record: IssueRecord
    ready: bool
    evidence: str
    draft_report: str


def _evidence(record: IssueRecord) -> str:
    parts = [f"status={record.raw_status}"]
    if record.tracker is not TrackerKind.GITHUB:
        parts.append(f"resolution={record.raw_resolution or 'none'}")
    if record.resolved_date is not None:
        parts.append(f"resolved_on={format_timestamp(record.resolved_date)}")
    return ", ".join(parts)


def _draft_report(lifecycle: CommentLifecycle, record: IssueRecord) -> str:
    block = lifecycle.block
    where = f"{block.file_path}, lines {block.start_line}-{block.end_line}"
    resolved = (
        f" on {format_timestamp(record.resolved_date)}"
        if record.resolved_date else ""
    )
    return (
        f"Remove obsolete on-hold comment referencing {record.key}\n"
        f"\n"
        f"The comment says:\n"
        f"    {block.normalized_text}\n"
        f"\n"
        f"Location: {where} (introduced in {lifecycle.introduced_commit[:12]}).\n"
        f"Referenced issue {record.key} is now {record.raw_status}"
        f"{'/' + record.raw_resolution if record.raw_resolution else ''}{resolved}.\n"
        f"The condition this comment was waiting on has been met, so the\n"
        f"comment and any workaround it guards can likely be removed.\n"
    )


def recommend(
    lifecycles: Sequence[CommentLifecycle],
    records: Mapping[str, IssueRecord | None],
    patterns,
) -> list[Recommendation]:
    """Pair remaining on-hold comments with issue state and verdicts.

    Each comment is paired through its first detected issue reference;
    comments whose issue could not be fetched are skipped with a
    warning.  `patterns` is the same pattern set used for detection.
    """
    from .issues import find_issue_references

    out: list[Recommendation] = []
    for lifecycle in lifecycles:
        if lifecycle.removed:
            continue
        references = find_issue_references(lifecycle.block.normalized_text, patterns)
        if not references:
            log.warning(
                "no issue reference found in %s:%d",
                lifecycle.block.file_path, lifecycle.block.start_line,
            )
            continue
        key = references[0].key
        record = records.get(key)
        if record is None:
            log.warning("issue %s unavailable; comment at %s:%d skipped",
                        key, lifecycle.block.file_path, lifecycle.block.start_line)
            continue
        ready = is_ready_to_remove(record)
        out.append(
            Recommendation(
                lifecycle=lifecycle,
                record=record,
                ready=ready,
                evidence=_evidence(record),
                draft_report=_draft_report(lifecycle, record) if ready else "",
            )
        )
    return out
