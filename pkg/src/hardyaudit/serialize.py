"""JSON documents for configurations, supports and reports.

Complex numbers are written as ``[re, im]`` pairs. Floats go through
``repr``, the shortest decimal that parses back to the same double, so
every document round-trips losslessly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .auditor import (
    Atom,
    AuditReport,
    Condition,
    DerivationStep,
    Kind,
    Proposition,
    StepStatus,
    Verdict,
)
from .hardy import LABELS, ConditionEntry, ConditionReport, HardyConfiguration
from .kernel import KernelError, Region, StateVector, validate_observable
from .support import AxiomEntry, AxiomReport, Context, Mark, Specimen, Status, Support

SCHEMA_VERSION = 1
REPORT_KINDS = ("condition", "axiom", "audit", "sample-stats")


class FormatError(ValueError):
    """A document is not valid JSON or does not match the expected shape."""


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _loads(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{source}: line {e.lineno}, column {e.colno}: {e.msg}") from None


def _field(doc, key, where):
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"{where}: missing field {key!r}")
    return doc[key]


def _check_schema(doc, where):
    version = _field(doc, "schema_version", where)
    if version != SCHEMA_VERSION:
        raise FormatError(f"{where}.schema_version: expected {SCHEMA_VERSION}, got {version!r}")


def _complex_list(values) -> list:
    return [[float(v.real), float(v.imag)] for v in values]


def _parse_complex(pair, where) -> complex:
    if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(v, (int, float)) for v in pair)):
        raise FormatError(f"{where}: expected [re, im], got {pair!r}")
    return complex(pair[0], pair[1])


# --- configurations -------------------------------------------------------


def config_to_dict(config: HardyConfiguration, provenance: str = "") -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "state": _complex_list(config.psi.amplitudes),
        "observables": [
            {"label": label, "region": obs.region.value, "matrix": [_complex_list(row) for row in obs.matrix]}
            for label, obs in config.observables.items()
        ],
        "tol": config.tol,
        "provenance": provenance,
    }


def config_from_dict(doc: dict, where: str = "config") -> HardyConfiguration:
    """Parse and validate a configuration document."""
    _check_schema(doc, where)
    state = _field(doc, "state", where)
    if not isinstance(state, list):
        raise FormatError(f"{where}.state: expected a list")
    amps = [_parse_complex(v, f"{where}.state[{i}]") for i, v in enumerate(state)]
    try:
        psi = StateVector(np.array(amps))
    except KernelError as e:
        raise FormatError(f"{where}.state: {e}") from None

    entries = _field(doc, "observables", where)
    if not isinstance(entries, list) or len(entries) != 4:
        raise FormatError(f"{where}.observables: expected 4 entries")
    obs = {}
    for i, entry in enumerate(entries):
        loc = f"{where}.observables[{i}]"
        label = _field(entry, "label", loc)
        if label not in LABELS or label in obs:
            raise FormatError(f"{loc}.label: unexpected or repeated label {label!r}")
        try:
            region = Region(_field(entry, "region", loc))
        except ValueError:
            raise FormatError(f"{loc}.region: expected 'alpha' or 'beta'") from None
        rows = _field(entry, "matrix", loc)
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise FormatError(f"{loc}.matrix: expected nested lists")
        matrix = [[_parse_complex(v, f"{loc}.matrix[{r}][{c}]") for c, v in enumerate(row)] for r, row in enumerate(rows)]
        if len({len(r) for r in matrix}) > 1:
            raise FormatError(f"{loc}.matrix: ragged rows")
        try:
            obs[label] = validate_observable(np.array(matrix), region, label)
        except KernelError as e:
            raise FormatError(f"{loc}.matrix: {type(e).__name__}: {e}") from None
    tol = doc.get("tol", 1e-9)
    if not isinstance(tol, (int, float)) or not tol > 0:
        raise FormatError(f"{where}.tol: expected a positive number")
    return HardyConfiguration(psi, obs["D1"], obs["D2"], obs["B1"], obs["B2"], tol=float(tol))


def load_config(path) -> HardyConfiguration:
    path = Path(path)
    return config_from_dict(_loads(path.read_text(encoding="utf-8"), str(path)), str(path))


# --- supports -------------------------------------------------------------


def _specimen_to_dict(s: Specimen) -> dict:
    return {
        "id": s.id,
        "context": s.context.name,
        "outcomes": dict(s.outcomes),
        "predictions": {k: sorted(m.value for m in v) for k, v in s.predictions.items()},
    }


def _specimen_from_dict(d: dict, where: str) -> Specimen:
    try:
        context = Context.parse(_field(d, "context", where))
        preds = {k: frozenset(Mark(m) for m in v) for k, v in d.get("predictions", {}).items()}
        return Specimen(int(_field(d, "id", where)), context, dict(d.get("outcomes", {})), preds)
    except (ValueError, TypeError, AttributeError) as e:
        raise FormatError(f"{where}: {e}") from None


def support_to_dict(support: Support, provenance: str = "") -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "support",
        "seed": support.seed,
        "config": config_to_dict(support.config, provenance),
        "specimens": [_specimen_to_dict(s) for s in support.specimens],
    }


def support_from_dict(doc: dict, where: str = "support") -> Support:
    _check_schema(doc, where)
    config = config_from_dict(_field(doc, "config", where), f"{where}.config")
    specimens = [_specimen_from_dict(d, f"{where}.specimens[{i}]") for i, d in enumerate(_field(doc, "specimens", where))]
    try:
        return Support(config, tuple(specimens), doc.get("seed"))
    except ValueError as e:
        raise FormatError(f"{where}.specimens: {e}") from None


def load_support(path) -> Support:
    path = Path(path)
    return support_from_dict(_loads(path.read_text(encoding="utf-8"), str(path)), str(path))


# --- reports --------------------------------------------------------------


def condition_report_to_dict(report: ConditionReport) -> dict:
    return {
        "passed": report.passed,
        "entries": [
            {"name": e.name, "passed": e.passed, "measured_value": e.measured_value, "threshold": e.threshold, "detail": e.detail}
            for e in report.entries
        ],
    }


def condition_report_from_dict(d: dict) -> ConditionReport:
    return ConditionReport(tuple(
        ConditionEntry(e["name"], bool(e["passed"]), float(e["measured_value"]), float(e["threshold"]), e.get("detail", ""))
        for e in d["entries"]
    ))


def axiom_report_to_dict(report: AxiomReport) -> dict:
    return {
        "passed": report.passed,
        "entries": [
            {"name": e.name, "status": e.status.value, "detail": e.detail, "offenders": list(e.offenders)}
            for e in report.entries
        ],
    }


def axiom_report_from_dict(d: dict) -> AxiomReport:
    return AxiomReport(tuple(
        AxiomEntry(e["name"], Status(e["status"]), e.get("detail", ""), tuple(e.get("offenders", ())))
        for e in d["entries"]
    ))


def _atom_to_dict(a: Atom) -> dict:
    return {"specimen": a.specimen, "label": a.label, "kind": a.kind.value}


def _atom_from_dict(d: dict) -> Atom:
    return Atom(d["specimen"], d["label"], Kind(d["kind"]))


def _premise_to_dict(p) -> dict:
    if isinstance(p, Atom):
        return {"atom": _atom_to_dict(p), "text": str(p)}
    return {"condition": {"predicate": p.predicate, "args": list(p.args)}, "text": str(p)}


def _premise_from_dict(d: dict):
    if "atom" in d:
        return _atom_from_dict(d["atom"])
    c = d["condition"]
    return Condition(c["predicate"], tuple(c["args"]))


def audit_report_to_dict(report: AuditReport) -> dict:
    return {
        "proposition": report.proposition.value,
        "verdict": report.verdict.value,
        "witness": None if report.witness is None else {"specimen": report.witness[0], "probability": report.witness[1]},
        "steps": [
            {
                "step_id": s.step_id,
                "claimed_atoms": [_atom_to_dict(a) for a in s.claimed_atoms],
                "claims": [str(a) for a in s.claimed_atoms],
                "cited_rule": s.cited_rule,
                "cited_facts": list(s.cited_facts),
                "status": s.status.value,
                "missing_premises": [_premise_to_dict(p) for p in s.missing_premises],
                "depends_on": list(s.depends_on),
                "by_dependency": s.by_dependency,
                "conflict_notes": list(s.conflict_notes),
                "witness": s.witness,
            }
            for s in report.steps
        ],
    }


def audit_report_from_dict(d: dict) -> AuditReport:
    steps = tuple(
        DerivationStep(
            s["step_id"],
            tuple(_atom_from_dict(a) for a in s["claimed_atoms"]),
            s["cited_rule"],
            StepStatus(s["status"]),
            tuple(_premise_from_dict(p) for p in s["missing_premises"]),
            tuple(s["cited_facts"]),
            tuple(s["depends_on"]),
            bool(s["by_dependency"]),
            tuple(s["conflict_notes"]),
            s["witness"],
        )
        for s in d["steps"]
    )
    w = d.get("witness")
    witness = None if w is None else (w["specimen"], float(w["probability"]))
    return AuditReport(Proposition(d["proposition"]), steps, Verdict(d["verdict"]), witness)


@dataclass(frozen=True)
class ReportFile:
    kind: str
    payload: object
    settings: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in REPORT_KINDS:
            raise ValueError(f"unknown report kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "kind": self.kind, "settings": self.settings, "payload": self.payload}

    def dumps(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict, where: str = "report") -> ReportFile:
        _check_schema(doc, where)
        kind = _field(doc, "kind", where)
        if kind not in REPORT_KINDS:
            raise FormatError(f"{where}.kind: unknown report kind {kind!r}")
        return cls(kind, _field(doc, "payload", where), doc.get("settings", {}))

    @classmethod
    def loads(cls, text: str, source: str = "report") -> ReportFile:
        return cls.from_dict(_loads(text, source), source)

    def decode(self):
        """Typed payload: ConditionReport, AxiomReport, list of AuditReport, or the stats dict."""
        if self.kind == "condition":
            return condition_report_from_dict(self.payload)
        if self.kind == "axiom":
            return axiom_report_from_dict(self.payload)
        if self.kind == "audit":
            return [audit_report_from_dict(r) for r in self.payload]
        return self.payload

