"""Trigger/spotlight compliance engine and dashboard aggregation.

A rule pairs a customer-query trigger (intent label, keyword list, or
dialog start) with a required sales response spotlight. For every detected
trigger the engine scans the next W sales utterances for the spotlight and
records whether the procedure was executed; records aggregate into
per-trigger, per-team and per-staff execution ratios.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import RemoteUnavailable, RuleConfigError
from .ingest import Dialog, Speaker, Utterance
from .textnorm import normalize_for_match

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_WINDOW = 10
UNASSIGNED = "(unassigned)"

TRIGGER_KINDS = ("intent", "keyword_any", "dialog_start")
SPOTLIGHT_KINDS = ("intent", "keyword_any")
VIEWS = ("trigger", "team", "staff")


@dataclass(frozen=True, slots=True)
class TriggerSpec:
    kind: str  # "intent" | "keyword_any" | "dialog_start"
    intent: Optional[str] = None
    keywords: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class SpotlightSpec:
    kind: str  # "intent" | "keyword_any"
    intent: Optional[str] = None
    keywords: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class SopRule:
    rule_id: str
    name: str
    trigger: TriggerSpec
    spotlight: SpotlightSpec
    window: int = DEFAULT_WINDOW


@dataclass(frozen=True)
class IntentModel:
    """Multi-label intent classifier over a fixed vocabulary.

    The lexicon baseline labels a text with every intent whose lexicon has a
    keyword occurring as a substring of the normalized text. The remote
    backend defers to the model service and intersects with the vocabulary.
    """

    vocabulary: frozenset[str]
    lexicons: dict[str, tuple[str, ...]] = field(default_factory=dict)
    backend: str = "lexicon"  # "lexicon" | "remote"
    remote_url: Optional[str] = None

    def __post_init__(self):
        if self.backend not in ("lexicon", "remote"):
            raise ValueError(f"unknown intent backend {self.backend!r}")
        if self.backend == "remote" and not self.remote_url:
            raise ValueError("remote intent backend requires remote_url")


@dataclass(frozen=True, slots=True)
class SopExecution:
    rule_id: str
    dialog_id: str
    trigger_index: int  # -1 for dialog-start triggers
    executed: bool
    spotlight_index: Optional[int]
    staff_id: str
    team_id: str

    def to_doc(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "dialog_id": self.dialog_id,
            "trigger_index": self.trigger_index,
            "executed": self.executed,
            "spotlight_index": self.spotlight_index,
            "staff_id": self.staff_id,
            "team_id": self.team_id,
        }


@dataclass(frozen=True, slots=True)
class DashboardRow:
    key: str
    triggered: int
    executed: int
    ratio: float

    def to_doc(self) -> dict:
        return {
            "key": self.key,
            "triggered": self.triggered,
            "executed": self.executed,
            "ratio": self.ratio,
        }


@dataclass(frozen=True, slots=True)
class DashboardStats:
    view: str
    rows: tuple[DashboardRow, ...]


def classify_intent(text: str, model: IntentModel) -> set[str]:
    if model.backend == "remote":
        return _classify_remote(text, model)
    normalized = normalize_for_match(text)
    labels = set()
    for intent, keywords in model.lexicons.items():
        if intent not in model.vocabulary:
            continue
        if any(normalize_for_match(kw) in normalized for kw in keywords if kw):
            labels.add(intent)
    return labels


def _classify_remote(text: str, model: IntentModel) -> set[str]:
    import httpx

    url = f"{model.remote_url.rstrip('/')}/v1/intent_labels"
    try:
        response = httpx.post(
            url,
            json={"text": text, "vocabulary": sorted(model.vocabulary)},
            timeout=2.0,
        )
        response.raise_for_status()
        labels = response.json().get("labels", [])
    except httpx.HTTPError as exc:
        raise RemoteUnavailable(url, str(exc)) from exc
    return {label for label in labels if label in model.vocabulary}


def _matches(utt_text: str, kind: str, intent: Optional[str], keywords, model: IntentModel) -> bool:
    if kind == "intent":
        return intent in classify_intent(utt_text, model)
    normalized = normalize_for_match(utt_text)
    return any(normalize_for_match(kw) in normalized for kw in keywords if kw)


def detect_triggers(dialog: Dialog, rule: SopRule, model: IntentModel) -> list[int]:
    """Turn indices of triggering customer utterances; [-1] for dialog start."""
    spec = rule.trigger
    if spec.kind == "dialog_start":
        return [-1]
    return [
        utt.turn_index
        for utt in dialog.utterances
        if utt.speaker is Speaker.CUSTOMER
        and _matches(utt.text, spec.kind, spec.intent, spec.keywords, model)
    ]


def check_spotlight(
    dialog: Dialog, trigger_index: int, rule: SopRule, model: IntentModel
) -> SopExecution:
    """Scan the next `window` sales utterances for the required spotlight.

    Staff/team attribution: the matching sales utterance when executed,
    otherwise the dialog's first sales utterance (empty when none exist).
    """
    spec = rule.spotlight
    scanned = 0
    hit: Optional[Utterance] = None
    for utt in dialog.utterances:
        if utt.turn_index <= trigger_index or utt.speaker is not Speaker.SALES:
            continue
        scanned += 1
        if scanned > rule.window:
            break
        if _matches(utt.text, spec.kind, spec.intent, spec.keywords, model):
            hit = utt
            break

    if hit is not None:
        staff, team = hit.staff_id, hit.team_id
    else:
        first_sales = next(
            (u for u in dialog.utterances if u.speaker is Speaker.SALES), None
        )
        staff = first_sales.staff_id if first_sales else ""
        team = first_sales.team_id if first_sales else ""

    return SopExecution(
        rule_id=rule.rule_id,
        dialog_id=dialog.dialog_id,
        trigger_index=trigger_index,
        executed=hit is not None,
        spotlight_index=hit.turn_index if hit is not None else None,
        staff_id=staff,
        team_id=team,
    )


def evaluate_rules(
    dialogs: Sequence[Dialog], rules: Sequence[SopRule], model: IntentModel
) -> list[SopExecution]:
    """All execution records, ordered by dialog, then rule, then trigger."""
    records = []
    for dialog in dialogs:
        for rule in rules:
            for trigger_index in detect_triggers(dialog, rule, model):
                records.append(check_spotlight(dialog, trigger_index, rule, model))
    return records


def aggregate(executions: Sequence[SopExecution], view: str) -> DashboardStats:
    """Execution ratios grouped by rule, team or staff; worst ratio first."""
    if view not in VIEWS:
        raise ValueError(f"view must be one of {VIEWS}, got {view!r}")
    triggered: dict[str, int] = {}
    executed: dict[str, int] = {}
    for record in executions:
        if view == "trigger":
            key = record.rule_id
        elif view == "team":
            key = record.team_id or UNASSIGNED
        else:
            key = record.staff_id or UNASSIGNED
        triggered[key] = triggered.get(key, 0) + 1
        if record.executed:
            executed[key] = executed.get(key, 0) + 1
    rows = [
        DashboardRow(
            key=key,
            triggered=count,
            executed=executed.get(key, 0),
            ratio=executed.get(key, 0) / count,
        )
        for key, count in triggered.items()
    ]
    rows.sort(key=lambda r: (r.ratio, r.key))
    return DashboardStats(view=view, rows=tuple(rows))


def parse_rules(doc: dict) -> tuple[list[SopRule], IntentModel]:
    """Validate a rules document (see docs/file-formats.md for the grammar)."""
    intents_doc = doc.get("intents", {})
    if not isinstance(intents_doc, dict):
        raise RuleConfigError("[intents] must be a table of intent -> keywords")
    lexicons: dict[str, tuple[str, ...]] = {}
    for intent, body in intents_doc.items():
        if isinstance(body, dict):
            keywords = body.get("keywords", [])
        else:
            keywords = body
        if not isinstance(keywords, list) or not all(isinstance(k, str) for k in keywords):
            raise RuleConfigError(f"intent {intent!r} needs a list of keyword strings")
        lexicons[intent] = tuple(keywords)

    backend = doc.get("intent_backend", "lexicon")
    remote_url = doc.get("intent_remote_url")
    model = IntentModel(
        vocabulary=frozenset(lexicons),
        lexicons=lexicons,
        backend=backend,
        remote_url=remote_url,
    )

    rules_doc = doc.get("rules", [])
    if not isinstance(rules_doc, list) or not rules_doc:
        raise RuleConfigError("rule file must define at least one [[rules]] entry")

    rules = []
    seen_ids = set()
    for i, body in enumerate(rules_doc):
        rule_id = body.get("id")
        if not rule_id or not isinstance(rule_id, str):
            raise RuleConfigError(f"rules[{i}] is missing a string 'id'")
        if rule_id in seen_ids:
            raise RuleConfigError(f"duplicate rule id {rule_id!r}")
        seen_ids.add(rule_id)
        window = body.get("window", DEFAULT_WINDOW)
        if not isinstance(window, int) or window < 1:
            raise RuleConfigError(f"rule {rule_id!r}: window must be a positive integer")
        rules.append(
            SopRule(
                rule_id=rule_id,
                name=str(body.get("name", rule_id)),
                trigger=_parse_spec(rule_id, "trigger", body.get("trigger"), model, TRIGGER_KINDS),
                spotlight=_parse_spec(rule_id, "spotlight", body.get("spotlight"), model, SPOTLIGHT_KINDS),
                window=window,
            )
        )
    return rules, model


def _parse_spec(rule_id, role, body, model: IntentModel, allowed_kinds):
    if not isinstance(body, dict):
        raise RuleConfigError(f"rule {rule_id!r} is missing its [{role}] table")
    kind = body.get("kind")
    if kind not in allowed_kinds:
        raise RuleConfigError(
            f"rule {rule_id!r} {role}: kind must be one of {allowed_kinds}, got {kind!r}"
        )
    intent = body.get("intent")
    keywords = tuple(body.get("keywords", []))
    if kind == "intent":
        if not intent:
            raise RuleConfigError(f"rule {rule_id!r} {role}: intent kind requires 'intent'")
        if intent not in model.vocabulary:
            raise RuleConfigError(
                f"rule {rule_id!r} {role}: intent {intent!r} not in the intent vocabulary"
            )
    if kind == "keyword_any" and not keywords:
        raise RuleConfigError(
            f"rule {rule_id!r} {role}: keyword_any requires a non-empty 'keywords' list"
        )
    cls = TriggerSpec if role == "trigger" else SpotlightSpec
    return cls(kind=kind, intent=intent, keywords=keywords)


def load_rules(path: str) -> tuple[list[SopRule], IntentModel]:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise RuleConfigError(f"rule file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise RuleConfigError(f"rule file {path} is not valid TOML: {exc}") from exc
    return parse_rules(doc)
