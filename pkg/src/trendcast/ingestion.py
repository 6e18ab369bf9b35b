"""Loaders for the canonical dataset files.

Two CSV schemas are supported (comma-separated, UTF-8, LF endings):

* ratings: header ``user,item,rating,timestamp`` - a record becomes an
  event iff its rating clears the threshold (default 3.0);
* votes: header ``user,item,timestamp`` - every record is an event.

Raw distribution formats (per-movie rating files, ``::``-separated rating
logs, vote dumps) are converted to these schemas up front; see the README
for recipes. Converters themselves are out of scope here.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .events import Event

log = logging.getLogger(__name__)

RATING_MIN = 0.5
RATING_MAX = 5.0

RATINGS_HEADER = ["user", "item", "rating", "timestamp"]
VOTES_HEADER = ["user", "item", "timestamp"]


@dataclass
class RatingRecord:
    user_id: int
    item_id: int
    rating: float
    timestamp: int


@dataclass
class DatasetSpec:
    """How to read a dataset file into events.

    ``subset_users`` (with ``min_user_degree`` and ``rng_seed``) mirrors the
    user-sampling construction for large ratings datasets: pick that many
    users with at least ``min_user_degree`` collected items, keep all their
    events. Eligibility is normally measured after threshold filtering;
    ``eligibility_pre_threshold`` switches it to counting raw ratings.
    """

    format: str = "ratings"  # "ratings" or "votes"
    threshold: float = 3.0
    subset_users: int | None = None
    min_user_degree: int = 20
    rng_seed: int = 0
    eligibility_pre_threshold: bool = False

    def __post_init__(self):
        if self.format not in ("ratings", "votes"):
            raise ValueError(f"unknown dataset format {self.format!r}")
        if not RATING_MIN <= self.threshold <= RATING_MAX:
            raise ValueError(
                f"threshold must lie in [{RATING_MIN}, {RATING_MAX}], got {self.threshold}"
            )
        if self.format == "votes" and self.subset_users is not None:
            raise ValueError("user subsetting applies to ratings datasets only")


def _open_csv(path, expected_header):
    fh = open(path, "r", encoding="utf-8", newline="")
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        fh.close()
        raise ValueError(f"{path}: missing header row") from None
    if [h.strip() for h in header] != expected_header:
        fh.close()
        raise ValueError(
            f"{path}: expected header {','.join(expected_header)!r}, got {','.join(header)!r}"
        )
    return fh, reader


def load_rating_records(path) -> list[RatingRecord]:
    """Parse a ratings CSV without applying any threshold."""
    fh, reader = _open_csv(path, RATINGS_HEADER)
    records = []
    with fh:
        for lineno, row in enumerate(reader, start=2):
            try:
                user, item = int(row[0]), int(row[1])
                rating, ts = float(row[2]), int(row[3])
            except (ValueError, IndexError):
                raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from None
            if not RATING_MIN <= rating <= RATING_MAX:
                raise ValueError(
                    f"{path}:{lineno}: rating {rating} outside [{RATING_MIN}, {RATING_MAX}]"
                )
            records.append(RatingRecord(user, item, rating, ts))
    return records


def load_ratings(path, spec: DatasetSpec | None = None) -> list[Event]:
    """Load a ratings CSV as events, thresholding and optionally subsetting users."""
    spec = spec or DatasetSpec()
    records = load_rating_records(path)

    chosen = None
    if spec.subset_users is not None:
        if spec.eligibility_pre_threshold:
            counts = {}
            for r in records:
                counts[r.user_id] = counts.get(r.user_id, 0) + 1
        else:
            counts = {}
            for r in records:
                if r.rating >= spec.threshold:
                    counts[r.user_id] = counts.get(r.user_id, 0) + 1
        eligible = sorted(u for u, c in counts.items() if c >= spec.min_user_degree)
        chosen = set(_sample_users(eligible, spec.subset_users, spec.rng_seed))

    events, dropped = [], 0
    for r in records:
        if r.rating < spec.threshold:
            dropped += 1
            continue
        if chosen is not None and r.user_id not in chosen:
            continue
        events.append(Event(r.user_id, r.item_id, r.timestamp))
    log.info(
        "%s: %d events kept, %d below threshold %.1f%s",
        path, len(events), dropped, spec.threshold,
        f", subset to {spec.subset_users} users" if chosen is not None else "",
    )
    return events


def load_votes(path) -> list[Event]:
    """Load a votes CSV: every row is an event."""
    fh, reader = _open_csv(path, VOTES_HEADER)
    events = []
    with fh:
        for lineno, row in enumerate(reader, start=2):
            try:
                events.append(Event(int(row[0]), int(row[1]), int(row[2])))
            except (ValueError, IndexError):
                raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from None
    return events


def load_dataset(path, spec: DatasetSpec) -> list[Event]:
    if spec.format == "votes":
        return load_votes(path)
    return load_ratings(path, spec)


def _sample_users(eligible: list, count: int, seed: int) -> list:
    if count <= 0:
        raise ValueError(f"cannot subset to {count} users")
    if len(eligible) < count:
        raise ValueError(
            f"requested {count} users but only {len(eligible)} meet the degree criterion"
        )
    # PCG64 via default_rng: stable across platforms for a fixed seed.
    rng = np.random.default_rng(seed)
    picked = rng.choice(np.asarray(eligible, dtype=np.int64), size=count, replace=False)
    return [int(u) for u in picked]


def subset_users(events: Sequence[Event], num_users: int, min_degree: int = 20, seed: int = 0) -> list[Event]:
    """Keep all events of ``num_users`` randomly chosen users with >= ``min_degree`` events.

    Selection is independent of the input event order and reproducible for a
    fixed seed.
    """
    counts = {}
    for e in events:
        counts[e.user_id] = counts.get(e.user_id, 0) + 1
    eligible = sorted(u for u, c in counts.items() if c >= min_degree)
    chosen = set(_sample_users(eligible, num_users, seed))
    return [e for e in events if e.user_id in chosen]


def write_votes_csv(events: Sequence[Event], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(VOTES_HEADER)
        for e in events:
            writer.writerow([e.user_id, e.item_id, e.timestamp])


def write_ratings_csv(records: Sequence[RatingRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RATINGS_HEADER)
        for r in records:
            writer.writerow([r.user_id, r.item_id, r.rating, r.timestamp])
