"""Timestamp parsing/formatting shared by the TSV schema and trackers.

Tracker APIs disagree on ISO-8601 dialects ("Z" suffix, "+0000" without
a colon, fractional seconds); everything is normalized to aware UTC
datetimes on the way in and serialized as "YYYY-MM-DDTHH:MM:SSZ" on the
way out.
"""

from __future__ import annotations

import re
from datetime import datetime, timezone

_COMPACT_OFFSET = re.compile(r"([+-]\d{2})(\d{2})$")


def parse_timestamp(text: str) -> datetime:
    value = text.strip()
    if value.endswith(("Z", "z")):
        value = value[:-1] + "+00:00"
    match = _COMPACT_OFFSET.search(value)
    if match and value[match.start() - 1] != ":":
        value = f"{value[:match.start()]}{match.group(1)}:{match.group(2)}"
    moment = datetime.fromisoformat(value)
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return moment


def format_timestamp(moment: datetime) -> str:
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return moment.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
