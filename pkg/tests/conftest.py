"""Shared fixtures: tracker pattern sets and a scripted git sandbox."""

from __future__ import annotations

import os
import subprocess
from pathlib import Path

import pytest

from onhold.issues import PatternCollection, TrackerKind, build_patterns

FIXTURE_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def jira_patterns():
    return build_patterns(TrackerKind.JIRA, "HADOOP")


@pytest.fixture(scope="session")
def bugzilla_patterns():
    return build_patterns(TrackerKind.BUGZILLA, "ant")


@pytest.fixture(scope="session")
def github_patterns():
    return build_patterns(TrackerKind.GITHUB, "apache/dubbo")


@pytest.fixture(scope="session")
def all_patterns(jira_patterns, bugzilla_patterns, github_patterns):
    return PatternCollection((jira_patterns, bugzilla_patterns, github_patterns))


class GitSandbox:
    """Builds a throwaway git repository with controlled commit dates."""

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self._tick = 0
        self._run("init", "-q")
        self._run("config", "user.email", "dev@example.com")
        self._run("config", "user.name", "Dev")
        self._run("config", "commit.gpgsign", "false")

    def _run(self, *args: str, date: str | None = None) -> str:
        env = dict(os.environ)
        if date is not None:
            env["GIT_AUTHOR_DATE"] = date
            env["GIT_COMMITTER_DATE"] = date
        result = subprocess.run(
            ["git", "-C", str(self.root), *args],
            capture_output=True,
            text=True,
            env=env,
        )
        assert result.returncode == 0, f"git {args}: {result.stderr}"
        return result.stdout

    def next_date(self) -> str:
        self._tick += 1
        return f"2021-01-{self._tick:02d}T12:00:00+00:00"

    def write(self, path: str, text: str) -> None:
        target = self.root / path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")

    def delete(self, path: str) -> None:
        (self.root / path).unlink()

    def move(self, src: str, dst: str) -> None:
        target = self.root / dst
        target.parent.mkdir(parents=True, exist_ok=True)
        (self.root / src).rename(target)

    def commit(self, message: str, date: str | None = None) -> str:
        stamp = date or self.next_date()
        self._run("add", "-A")
        self._run("commit", "-q", "--allow-empty", "-m", message, date=stamp)
        return self.head()

    def head(self) -> str:
        return self._run("rev-parse", "HEAD").strip()

    def current_branch(self) -> str:
        return self._run("rev-parse", "--abbrev-ref", "HEAD").strip()

    def new_branch(self, name: str) -> None:
        self._run("checkout", "-q", "-b", name)

    def checkout(self, name: str) -> None:
        self._run("checkout", "-q", name)

    def merge(self, name: str) -> str:
        stamp = self.next_date()
        self._run("merge", "-q", "--no-ff", "-m", f"merge {name}", name, date=stamp)
        return self.head()


@pytest.fixture
def git_sandbox(tmp_path: Path) -> GitSandbox:
    return GitSandbox(tmp_path / "repo")
