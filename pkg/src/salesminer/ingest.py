"""Parse and validate CSV chatlogs into ordered dialogs.

Input contract: RFC 4180 CSV, UTF-8, one header row. Required columns
``dialog_id``, ``speaker``, ``text``; optional ``turn_index``, ``timestamp``,
``staff_id``, ``team_id``. Rows are grouped by dialog, ordered by the given
turn_index when the column is present (file order otherwise), and turn
indices are renumbered to 0..n-1.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable, Optional, Sequence

from .errors import (
    BadSpeaker,
    BadTimestamp,
    BadTurnIndex,
    DuplicateTurnIndex,
    EmptyText,
    MissingColumn,
    NonUtf8,
)
from .textnorm import normalize_text

REQUIRED_COLUMNS = ("dialog_id", "speaker", "text")
OPTIONAL_COLUMNS = ("turn_index", "timestamp", "staff_id", "team_id")

_SPEAKER_ALIASES = {
    "customer": "customer",
    "c": "customer",
    "sales": "sales",
    "s": "sales",
}


class Speaker(str, Enum):
    CUSTOMER = "customer"
    SALES = "sales"


@dataclass(frozen=True, slots=True)
class Utterance:
    """One chat message, attributed to a speaker and (optionally) staff/team."""

    dialog_id: str
    turn_index: int
    speaker: Speaker
    text: str
    staff_id: str = ""
    team_id: str = ""
    timestamp: Optional[str] = None


@dataclass(frozen=True, slots=True)
class Dialog:
    """Utterances of one conversation, ascending by turn_index."""

    dialog_id: str
    utterances: tuple[Utterance, ...]

    def __len__(self) -> int:
        return len(self.utterances)


@dataclass(frozen=True, slots=True)
class Chatlog:
    dialogs: tuple[Dialog, ...]
    source_file: str = ""
    ingested_at: str = ""

    def __len__(self) -> int:
        return len(self.dialogs)


@dataclass(frozen=True, slots=True)
class ChatlogStats:
    dialog_count: int
    utterance_count: int
    customer_utterances: int
    sales_utterances: int
    distinct_staff: int
    distinct_teams: int

    def to_doc(self) -> dict:
        return {
            "dialogs": self.dialog_count,
            "utterances": self.utterance_count,
            "speakers": {
                "customer": self.customer_utterances,
                "sales": self.sales_utterances,
            },
            "distinct_staff": self.distinct_staff,
            "distinct_teams": self.distinct_teams,
        }


def parse_chatlog(
    csv_bytes: bytes,
    source_file: str = "",
    now: Optional[datetime] = None,
) -> Chatlog:
    """Parse CSV bytes into a Chatlog; raises IngestError subclasses.

    Row numbers in errors are 1-based CSV record numbers (header = 1).
    Parsing is fail-fast: the first invalid record aborts the parse.
    """
    try:
        text = csv_bytes.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise NonUtf8(str(exc)) from exc
    if text.startswith("﻿"):
        text = text[1:]

    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumn("dialog_id") from None

    columns = {name.strip().lower(): i for i, name in enumerate(header)}
    for name in REQUIRED_COLUMNS:
        if name not in columns:
            raise MissingColumn(name)
    has_turn_index = "turn_index" in columns

    def cell(record: list[str], name: str) -> str:
        idx = columns.get(name)
        if idx is None or idx >= len(record):
            return ""
        return record[idx]

    # (given_index or file_position, utterance) per dialog, in file order.
    pending: dict[str, list[tuple[int, Utterance]]] = {}
    for row_no, record in enumerate(reader, start=2):
        if not record:
            continue
        dialog_id = cell(record, "dialog_id").strip()

        raw_speaker = cell(record, "speaker").strip()
        speaker_key = _SPEAKER_ALIASES.get(raw_speaker.lower())
        if speaker_key is None:
            raise BadSpeaker(raw_speaker, row_no)
        speaker = Speaker(speaker_key)

        utter_text = normalize_text(cell(record, "text"))
        if not utter_text:
            raise EmptyText(row_no)

        rows = pending.setdefault(dialog_id, [])
        if has_turn_index:
            raw_index = cell(record, "turn_index").strip()
            try:
                given = int(raw_index)
            except ValueError:
                raise BadTurnIndex(raw_index, row_no) from None
            if given < 0:
                raise BadTurnIndex(raw_index, row_no)
            if any(existing == given for existing, _ in rows):
                raise DuplicateTurnIndex(dialog_id, given, row_no)
        else:
            given = len(rows)

        timestamp = cell(record, "timestamp").strip() or None
        if timestamp is not None:
            _validate_timestamp(timestamp, row_no)

        rows.append(
            (
                given,
                Utterance(
                    dialog_id=dialog_id,
                    turn_index=given,
                    speaker=speaker,
                    text=utter_text,
                    staff_id=cell(record, "staff_id").strip(),
                    team_id=cell(record, "team_id").strip(),
                    timestamp=timestamp,
                ),
            )
        )

    dialogs = []
    for dialog_id, rows in pending.items():
        ordered = sorted(rows, key=lambda item: item[0])
        utterances = tuple(
            replace(utt, turn_index=i) for i, (_, utt) in enumerate(ordered)
        )
        dialogs.append(Dialog(dialog_id=dialog_id, utterances=utterances))

    stamp = (now or datetime.now(timezone.utc)).isoformat()
    return Chatlog(dialogs=tuple(dialogs), source_file=source_file, ingested_at=stamp)


def _validate_timestamp(value: str, row_no: int) -> None:
    candidate = value[:-1] + "+00:00" if value.endswith("Z") else value
    try:
        datetime.fromisoformat(candidate)
    except ValueError:
        raise BadTimestamp(value, row_no) from None


def dialog_stats(chatlog: Chatlog) -> ChatlogStats:
    customer = sales = 0
    staff: set[str] = set()
    teams: set[str] = set()
    total = 0
    for dialog in chatlog.dialogs:
        for utt in dialog.utterances:
            total += 1
            if utt.speaker is Speaker.CUSTOMER:
                customer += 1
            else:
                sales += 1
            if utt.staff_id:
                staff.add(utt.staff_id)
            if utt.team_id:
                teams.add(utt.team_id)
    return ChatlogStats(
        dialog_count=len(chatlog.dialogs),
        utterance_count=total,
        customer_utterances=customer,
        sales_utterances=sales,
        distinct_staff=len(staff),
        distinct_teams=len(teams),
    )


def chatlog_to_csv(chatlog: Chatlog) -> bytes:
    """Serialize back to the canonical CSV column set (RFC 4180)."""
    buf = io.StringIO(newline="")
    writer = csv.writer(buf)
    writer.writerow(
        ["dialog_id", "turn_index", "speaker", "staff_id", "team_id", "timestamp", "text"]
    )
    for dialog in chatlog.dialogs:
        for utt in dialog.utterances:
            writer.writerow(
                [
                    utt.dialog_id,
                    utt.turn_index,
                    utt.speaker.value,
                    utt.staff_id,
                    utt.team_id,
                    utt.timestamp or "",
                    utt.text,
                ]
            )
    return buf.getvalue().encode("utf-8")


def chatlog_to_doc(chatlog: Chatlog) -> dict:
    """Canonical JSON document for persisted chatlogs."""
    return {
        "source_file": chatlog.source_file,
        "ingested_at": chatlog.ingested_at,
        "dialogs": [
            {
                "dialog_id": d.dialog_id,
                "utterances": [
                    {
                        "turn_index": u.turn_index,
                        "speaker": u.speaker.value,
                        "text": u.text,
                        "staff_id": u.staff_id,
                        "team_id": u.team_id,
                        "timestamp": u.timestamp,
                    }
                    for u in d.utterances
                ],
            }
            for d in chatlog.dialogs
        ],
    }


def chatlog_from_doc(doc: dict) -> Chatlog:
    dialogs = []
    for d in doc["dialogs"]:
        utterances = tuple(
            Utterance(
                dialog_id=d["dialog_id"],
                turn_index=u["turn_index"],
                speaker=Speaker(u["speaker"]),
                text=u["text"],
                staff_id=u.get("staff_id", ""),
                team_id=u.get("team_id", ""),
                timestamp=u.get("timestamp"),
            )
            for u in d["utterances"]
        )
        dialogs.append(Dialog(dialog_id=d["dialog_id"], utterances=utterances))
    return Chatlog(
        dialogs=tuple(dialogs),
        source_file=doc.get("source_file", ""),
        ingested_at=doc.get("ingested_at", ""),
    )


def iter_utterances(chatlog: Chatlog) -> Iterable[Utterance]:
    for dialog in chatlog.dialogs:
        yield from dialog.utterances
