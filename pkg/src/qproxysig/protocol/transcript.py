"""Transcript events, JSON round-tripping, and per-party views."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Optional

import jsonschema

SCHEMA_RESOURCE = "transcript.schema.json"


class MalformedTranscript(ValueError):
    pass


@dataclass(frozen=True)
class KeyIssued:
    pair: tuple[str, str]
    name: str
    length: int
    bits: str  # hex


@dataclass(frozen=True)
class ChannelDistributed:
    block: int
    holders: dict  # party -> particles


@dataclass(frozen=True)
class EavesdropCheck:
    passed: bool
    decoys: int
    mismatches: int


@dataclass(frozen=True)
class ClassicalSend:
    sender: str
    recipient: str
    label: str
    key: Optional[str]
    offset: Optional[int]
    fields: tuple  # ((name, length), ...)
    ciphertext: str


@dataclass(frozen=True)
class QuantumSend:
    sender: str
    recipient: str
    block: int
    particles: tuple


@dataclass(frozen=True)
class Measurement:
    party: str
    block: int
    kind: str  # "bell", "z", "hz" (Hadamard then z), "x"
    particles: tuple
    outcome: str


@dataclass(frozen=True)
class Correction:
    party: str
    block: int
    particle: int
    pauli: str


@dataclass(frozen=True)
class Verification:
    party: str
    check: str
    passed: bool


EVENT_TYPES = {cls.__name__: cls for cls in (
    KeyIssued, ChannelDistributed, EavesdropCheck, ClassicalSend,
    QuantumSend, Measurement, Correction, Verification,
)}


def event_to_dict(event) -> dict:
    d = {"type": type(event).__name__}
    d.update(asdict(event))
    for k, v in d.items():
        if isinstance(v, tuple):
            d[k] = [list(x) if isinstance(x, tuple) else x for x in v]
    return d


def event_from_dict(data: dict):
    data = dict(data)
    cls = EVENT_TYPES.get(data.pop("type", None))
    if cls is None:
        raise MalformedTranscript(f"unknown event {data!r}")
    for k, v in data.items():
        if isinstance(v, list):
            data[k] = tuple(tuple(x) if isinstance(x, list) else x for x in v)
    if cls is ChannelDistributed:
        data["holders"] = {p: list(q) for p, q in data["holders"].items()}
    return cls(**data)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: Optional[str] = None
    # one entry per confirmed (m, proxy-record) tuple
    records: tuple = ()

    def to_dict(self) -> dict:
        return {"accepted": self.accepted, "reason": self.reason, "records": [dict(r) for r in self.records]}

    @classmethod
    def from_dict(cls, data: dict) -> "Verdict":
        return cls(data["accepted"], data.get("reason"), tuple(data.get("records", ())))

    def __str__(self):
        if self.accepted:
            return "Accepted " + "; ".join(
                "(" + ", ".join(f"{k}={v}" for k, v in r.items()) + ")" for r in self.records)
        return f"Rejected: {self.reason}"


@dataclass
class Transcript:
    scheme: int
    config: dict
    events: list = field(default_factory=list)
    verdict: Optional[Verdict] = None

    def log(self, event):
        if self.verdict is not None:
            raise RuntimeError("transcript already closed")
        self.events.append(event)

    def close(self, verdict: Verdict):
        if self.verdict is not None:
            raise RuntimeError("verdict already recorded")
        self.verdict = verdict

    def of_type(self, cls) -> list:
        return [e for e in self.events if isinstance(e, cls)]

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "config": self.config,
            "events": [event_to_dict(e) for e in self.events],
            "verdict": None if self.verdict is None else self.verdict.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Transcript":
        try:
            jsonschema.validate(data, transcript_schema())
        except jsonschema.ValidationError as exc:
            raise MalformedTranscript(exc.message) from None
        verdict = data.get("verdict")
        return cls(
            data["scheme"],
            data["config"],
            [event_from_dict(e) for e in data["events"]],
            None if verdict is None else Verdict.from_dict(verdict),
        )

    @classmethod
    def from_json(cls, text: str) -> "Transcript":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedTranscript(f"not JSON: {exc}") from None
        return cls.from_dict(data)


def transcript_schema() -> dict:
    return json.loads(resources.files("qproxysig.data").joinpath(SCHEMA_RESOURCE).read_text())


def party_view(transcript: Transcript, party: str) -> list[dict]:
    """Everything ``party`` observes during a run, in order."""
    view = []
    for e in transcript.events:
        if isinstance(e, KeyIssued) and party in e.pair:
            seen = e
        elif isinstance(e, ChannelDistributed) and party in e.holders:
            seen = (e.block, e.holders[party])
        elif isinstance(e, EavesdropCheck):
            seen = e
        elif isinstance(e, ClassicalSend) and party in (e.sender, e.recipient):
            seen = e
        elif isinstance(e, QuantumSend) and party in (e.sender, e.recipient):
            seen = e
        elif isinstance(e, (Measurement, Correction, Verification)) and e.party == party:
            seen = e
        else:
            continue
        view.append({"type": type(e).__name__, "event": seen})
    return view
