"""Activation rules: immediate, periodic, and explicit date-time triggers.

All scheduling happens in UTC. Periodic triggers anchor on their creation
time; month- and year-based intervals add calendar months and clamp the
day-of-month (Jan 31 + 1 month = Feb 29 in a leap year).
"""

from __future__ import annotations

import calendar
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

INTERVALS = ("hourly", "daily", "weekly", "biweekly", "monthly", "yearly")
KINDS = ("immediate", "periodic", "datetimes")

_FIXED_DELTAS = {
    "hourly": timedelta(hours=1),
    "daily": timedelta(days=1),
    "weekly": timedelta(weeks=1),
    "biweekly": timedelta(days=14),
}

# scan guard for month-based intervals so a huge `after` cannot spin forever
_MAX_CALENDAR_STEPS = 24000


def parse_timestamp(value: str) -> datetime:
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


@dataclass
class Trigger:
    triggerId: str
    kind: str
    interval: str | None = None
    times: list[str] = field(default_factory=list)
    maxExecutions: int | None = None
    configOverlay: dict = field(default_factory=dict)
    createdAt: str = ""

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"trigger {self.triggerId!r}: unknown kind {self.kind!r}")
        if self.kind == "periodic":
            if self.interval not in INTERVALS:
                raise ValueError(f"trigger {self.triggerId!r}: periodic requires an interval")
        if self.kind == "datetimes" and not self.times:
            raise ValueError(f"trigger {self.triggerId!r}: datetimes requires a non-empty times list")
        if self.maxExecutions is not None and self.maxExecutions <= 0:
            raise ValueError(f"trigger {self.triggerId!r}: maxExecutions must be positive")
        if not self.createdAt:
            self.createdAt = format_timestamp(datetime.now(timezone.utc))

    @property
    def anchor(self) -> datetime:
        return parse_timestamp(self.createdAt)

    def to_json(self) -> dict:
        out = {"triggerId": self.triggerId, "kind": self.kind, "createdAt": self.createdAt}
        if self.interval:
            out["interval"] = self.interval
        if self.times:
            out["times"] = list(self.times)
        if self.maxExecutions is not None:
            out["maxExecutions"] = self.maxExecutions
        if self.configOverlay:
            out["configOverlay"] = self.configOverlay
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Trigger":
        return cls(
            triggerId=str(obj["triggerId"]),
            kind=str(obj["kind"]),
            interval=obj.get("interval"),
            times=list(obj.get("times", [])),
            maxExecutions=obj.get("maxExecutions"),
            configOverlay=dict(obj.get("configOverlay", {})),
            createdAt=str(obj.get("createdAt", "")),
        )


def add_months(dt: datetime, months: int) -> datetime:
    month_index = dt.year * 12 + (dt.month - 1) + months
    year, month = divmod(month_index, 12)
    month += 1
    day = min(dt.day, calendar.monthrange(year, month)[1])
    return dt.replace(year=year, month=month, day=day)


def _fire_times(trigger: Trigger):
    """Fire times in ascending order (periodic ones start one interval in)."""
    anchor = trigger.anchor
    if trigger.kind == "immediate":
        yield anchor
        return
    if trigger.kind == "datetimes":
        for ts in sorted(parse_timestamp(t) for t in trigger.times):
            yield ts
        return
    if trigger.interval in _FIXED_DELTAS:
        delta = _FIXED_DELTAS[trigger.interval]
        k = 1
        while True:
            yield anchor + delta * k
            k += 1
    else:
        step = 1 if trigger.interval == "monthly" else 12
        for k in range(1, _MAX_CALENDAR_STEPS):
            yield add_months(anchor, step * k)


def next_fire_time(trigger: Trigger, after: datetime) -> datetime | None:
    """Earliest activation strictly after `after`, or None when exhausted."""
    if after.tzinfo is None:
        after = after.replace(tzinfo=timezone.utc)
    limit = trigger.maxExecutions

    if trigger.kind == "periodic" and trigger.interval in _FIXED_DELTAS:
        # closed form: fires at anchor + k*delta for k >= 1
        anchor, delta = trigger.anchor, _FIXED_DELTAS[trigger.interval]
        if after < anchor + delta:
            k = 1
        else:
            k = int((after - anchor) / delta) + 1
            while anchor + delta * k <= after:
                k += 1
        if limit is not None and k > limit:
            return None
        return anchor + delta * k

    for index, fire in enumerate(_fire_times(trigger)):
        if limit is not None and index >= limit:
            return None
        if fire > after:
            return fire
    return None
