"""Git history mining: walk commits, extract comments, trace lifecycles.

A comment's identity across commits is its whitespace-normalized text
within one file path; renames therefore end one lifecycle and start
another (history is walked with rename detection off, so a rename shows
up as a delete plus an add).  Only the first-parent chain is traversed,
which keeps merged side-branch duplicates out of the counts.
"""

from __future__ import annotations

import subprocess
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path, PurePosixPath
from typing import Callable, Sequence

from .errors import ConfigError
from .javalex import CommentBlock, extract_comments, normalize_whitespace
from .issues import Patterns, find_issue_references

__all__ = [
    "ChangedFile",
    "CommentLifecycle",
    "GitCatFile",
    "HistoryEntry",
    "extract_comments",
    "is_test_file",
    "mine_repository",
    "trace_lifecycles",
    "walk_history",
]

_NAME_SUFFIXES = ("testcase", "tests", "test")


def is_test_file(path: str) -> bool:
    """True for paths the mining pipeline must ignore as test code.

    Fires when any directory segment is "test"/"tests", or the file name
    looks like Test*.java / *Test.java / *Tests.java / *TestCase.java.
    The suffix rules respect word boundaries so that "Contest.java"
    stays a production file: the suffix must begin the name, start a
    CamelCase word, or follow a non-alphanumeric separator.
    """
    pure = PurePosixPath(path.replace("\\", "/"))
    for segment in pure.parts[:-1]:
        if segment.lower() in ("test", "tests"):
            return True
    name = pure.name
    if not name.lower().endswith(".java"):
        return False
    stem = name[: -len(".java")]
    low = stem.lower()
    if low.startswith("test"):
        return True
    for suffix in _NAME_SUFFIXES:
        if low.endswith(suffix):
            cut = len(stem) - len(suffix)
            if stem[cut] == "T":
                return True
            if cut > 0 and not stem[cut - 1].isalnum():
                return True
    return False


@dataclass(frozen=True)
class ChangedFile:
    path: str
    status: str  # "A" added, "M" modified, "D" deleted

    def __post_init__(self) -> None:
        if self.status not in ("A", "M", "D"):
            raise ValueError(f"unexpected change status {self.status!r}")


@dataclass(frozen=True)
class HistoryEntry:
    commit_id: str
    timestamp: datetime
    changes: tuple[ChangedFile, ...]


@dataclass(frozen=True)
class CommentLifecycle:
    """One episode of an issue-referencing comment living in one file."""

    block: CommentBlock
    introduced_commit: str
    introduced_date: datetime
    removed_commit: str | None = None
    removed_date: datetime | None = None
    ambiguous: bool = False

    def __post_init__(self) -> None:
        if (self.removed_commit is None) != (self.removed_date is None):
            raise ValueError("removed_commit and removed_date must come together")
        if self.removed_date is not None and self.removed_date < self.introduced_date:
            raise ValueError("removal precedes introduction")

    @property
    def removed(self) -> bool:
        return self.removed_commit is not None

    @property
    def remaining(self) -> bool:
        return self.removed_commit is None

    @property
    def text_key(self) -> str:
        return normalize_whitespace(self.block.normalized_text)


def _run_git(repo_path: str | Path, *args: str) -> str:
    result = subprocess.run(
        ["git", "-C", str(repo_path), *args],
        capture_output=True,
        text=True,
    )
    if result.returncode != 0:
        raise ConfigError(
            f"git {' '.join(args[:2])} failed in {repo_path}: {result.stderr.strip()}"
        )
    return result.stdout


def _git_succeeds(repo_path: str | Path, *args: str) -> bool:
    result = subprocess.run(
        ["git", "-C", str(repo_path), *args],
        capture_output=True,
        text=True,
    )
    return result.returncode == 0


_RECORD_MARK = "\x01"


def walk_history(repo_path: str | Path, branch: str = "HEAD") -> list[HistoryEntry]:
    """Commits of the branch's first-parent chain, oldest first.

    Each entry lists the changed .java files with their status; merge
    commits are diffed against their first parent only and renames are
    reported as delete + add.
    """
    if not _git_succeeds(repo_path, "rev-parse", "--git-dir"):
        raise ConfigError(f"{repo_path} is not a git repository")
    if not _git_succeeds(repo_path, "rev-parse", "--verify", "--quiet",
                         f"{branch}^{{commit}}"):
        if branch == "HEAD":
            return []  # repository without commits
        raise ConfigError(f"branch {branch!r} not found in {repo_path}")

    out = _run_git(
        repo_path,
        "log",
        "--first-parent",
        "--reverse",
        "--no-renames",
        "--diff-merges=first-parent",
        "--name-status",
        f"--format={_RECORD_MARK}%H%x09%cI",
        branch,
    )
    entries: list[HistoryEntry] = []
    commit_id = ""
    timestamp: datetime | None = None
    changes: list[ChangedFile] = []

    def flush() -> None:
        if timestamp is not None:
            entries.append(HistoryEntry(commit_id, timestamp, tuple(changes)))

    for line in out.splitlines():
        if line.startswith(_RECORD_MARK):
            flush()
            commit_id, _, stamp = line[1:].partition("\t")
            timestamp = datetime.fromisoformat(stamp)
            changes = []
            continue
        if not line.strip():
            continue
        status_field, _, path = line.partition("\t")
        if not path:
            continue
        status = status_field[0]
        if status == "T":
            status = "M"  # type change: content is what matters here
        if status not in ("A", "M", "D"):
            continue
        if not path.lower().endswith(".java"):
            continue
        changes.append(ChangedFile(path, status))
    flush()
    return entries


class GitCatFile:
    """Persistent `git cat-file --batch` channel for reading blobs."""

    def __init__(self, repo_path: str | Path):
        self._proc = subprocess.Popen(
            ["git", "-C", str(repo_path), "cat-file", "--batch"],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
        )

    def read_text(self, commit_id: str, path: str) -> str | None:
        """Blob content at commit:path, or None when absent."""
        assert self._proc.stdin is not None and self._proc.stdout is not None
        request = f"{commit_id}:{path}\n".encode("utf-8")
        self._proc.stdin.write(request)
        self._proc.stdin.flush()
        header = self._proc.stdout.readline().decode("utf-8", "replace").strip()
        if header.endswith(("missing", "ambiguous")) or not header:
            return None
        parts = header.split()
        size = int(parts[-1])
        body = self._proc.stdout.read(size)
        self._proc.stdout.read(1)  # trailing newline
        return body.decode("utf-8", errors="replace")

    def close(self) -> None:
        if self._proc.stdin:
            self._proc.stdin.close()
        self._proc.wait(timeout=10)

    def __enter__(self) -> "GitCatFile":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()


@dataclass
class _OpenEpisode:
    block: CommentBlock
    introduced_commit: str
    introduced_date: datetime
    introduced_index: int
    ambiguous: bool


def _issue_matcher(patterns: Patterns | Callable[[str], bool]) -> Callable[[str], bool]:
    if callable(patterns):
        return patterns
    return lambda text: bool(find_issue_references(text, patterns))


def trace_lifecycles(
    repo_path: str | Path,
    history: Sequence[HistoryEntry],
    issue_matcher: Patterns | Callable[[str], bool],
    include_tests: bool = False,
) -> list[CommentLifecycle]:
    """Trace every issue-referencing comment's introduction and removal.

    A lifecycle opens at the first commit where the whitespace-normalized
    block text appears in a file and closes at the first later commit
    where it is gone (file deletion included); a comment re-added later
    starts a fresh lifecycle.  Equal texts occurring several times in
    one file at once are traced as a single lifecycle with the ambiguous
    flag set.  If commit clocks run backwards, a removal timestamp is
    clamped to the introduction timestamp.
    """
    matches = _issue_matcher(issue_matcher)
    active: dict[tuple[str, str], _OpenEpisode] = {}
    finished: list[CommentLifecycle] = []

    def close(episode: _OpenEpisode, entry: HistoryEntry) -> None:
        removed_date = max(entry.timestamp, episode.introduced_date)
        finished.append(
            CommentLifecycle(
                block=episode.block,
                introduced_commit=episode.introduced_commit,
                introduced_date=episode.introduced_date,
                removed_commit=entry.commit_id,
                removed_date=removed_date,
                ambiguous=episode.ambiguous,
            )
        )

    with GitCatFile(repo_path) as blobs:
        for entry_index, entry in enumerate(history):
            for change in entry.changes:
                if not include_tests and is_test_file(change.path):
                    continue
                if change.status == "D":
                    present: dict[str, CommentBlock] = {}
                    counts: dict[str, int] = {}
                else:
                    source = blobs.read_text(entry.commit_id, change.path)
                    if source is None:
                        present, counts = {}, {}
                    else:
                        present, counts = {}, {}
                        for block in extract_comments(source, change.path):
                            if not matches(block.normalized_text):
                                continue
                            key = normalize_whitespace(block.normalized_text)
                            counts[key] = counts.get(key, 0) + 1
                            if key not in present:
                                present[key] = block
                # Close episodes whose text vanished from this file.
                for (path, key), episode in list(active.items()):
                    if path == change.path and key not in present:
                        close(episode, entry)
                        del active[(path, key)]
                # Open episodes for newly appeared texts; refresh flags.
                for key, block in present.items():
                    slot = (change.path, key)
                    episode = active.get(slot)
                    if episode is None:
                        active[slot] = _OpenEpisode(
                            block=block,
                            introduced_commit=entry.commit_id,
                            introduced_date=entry.timestamp,
                            introduced_index=entry_index,
                            ambiguous=counts[key] > 1,
                        )
                    elif counts[key] > 1:
                        episode.ambiguous = True

    for episode in active.values():
        finished.append(
            CommentLifecycle(
                block=episode.block,
                introduced_commit=episode.introduced_commit,
                introduced_date=episode.introduced_date,
                ambiguous=episode.ambiguous,
            )
        )
    finished.sort(
        key=lambda lc: (lc.introduced_date, lc.introduced_commit,
                        lc.block.file_path, lc.block.start_line, lc.text_key)
    )
    return finished


def mine_repository(
    repo_path: str | Path,
    patterns: Patterns | Callable[[str], bool],
    branch: str = "HEAD",
    include_tests: bool = False,
) -> list[CommentLifecycle]:
    """walk_history + trace_lifecycles in one call."""
    history = walk_history(repo_path, branch)
    return trace_lifecycles(repo_path, history, patterns, include_tests)
