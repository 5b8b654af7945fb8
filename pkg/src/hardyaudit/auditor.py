"""Forward-chaining checker for the locality derivations (prop1, prop2, remark32).

Derivations run over membership atoms about symbolic specimens (``x``,
``x0``). Rules are schematic in the specimen and in observable labels;
their side conditions are decided against a :class:`FactTable` computed
once from the configuration, so after that single numeric pass the
engine is purely symbolic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from itertools import product

from .hardy import (
    CHAIN,
    CHAIN_CONDITIONS,
    LABELS,
    NONCOMMUTING_MIN,
    ConfigRejected,
    HardyConfiguration,
    verify_config,
)
from .kernel import Sign, commutator_norm, joint_probability, outcome_probability
from .support import Mark, Specimen

WITNESS_MIN = 1e-9


class Kind(enum.Enum):
    MEASURED = "measured"
    PLUS = "plus"
    MINUS = "minus"
    PRED_PLUS = "pred_plus"
    PRED_MINUS = "pred_minus"
    NOT_MEASURED = "not_measured"
    NOT_PLUS = "not_plus"
    NOT_MINUS = "not_minus"
    NOT_PRED_PLUS = "not_pred_plus"
    NOT_PRED_MINUS = "not_pred_minus"

    @property
    def negation(self) -> Kind:
        name = self.name
        return Kind[name[4:]] if name.startswith("NOT_") else Kind["NOT_" + name]

    @property
    def negative(self) -> bool:
        return self.name.startswith("NOT_")


_SET_SUFFIX = {
    Kind.MEASURED: "{}",
    Kind.PLUS: "{}+",
    Kind.MINUS: "{}-",
    Kind.PRED_PLUS: "pred({})+",
    Kind.PRED_MINUS: "pred({})-",
}


def _is_var(term: str) -> bool:
    return term.startswith("?")


@dataclass(frozen=True)
class Atom:
    """``specimen ∈ set`` or ``specimen ∉ set`` for one observable's extension."""

    specimen: str
    label: str
    kind: Kind

    def __post_init__(self):
        if not isinstance(self.kind, Kind):
            raise TypeError("kind must be a Kind")
        if not (_is_var(self.label) or self.label in LABELS):
            raise ValueError(f"ill-formed atom: unknown label {self.label!r}")

    def negate(self) -> Atom:
        return Atom(self.specimen, self.label, self.kind.negation)

    def substitute(self, bindings: dict[str, str]) -> Atom:
        return Atom(bindings.get(self.specimen, self.specimen), bindings.get(self.label, self.label), self.kind)

    @property
    def ground(self) -> bool:
        return not (_is_var(self.specimen) or _is_var(self.label))

    def __str__(self):
        positive = self.kind.negation if self.kind.negative else self.kind
        rel = "∉" if self.kind.negative else "∈"
        return f"{self.specimen} {rel} {_SET_SUFFIX[positive].format(self.label)}"


@dataclass(frozen=True)
class Condition:
    """Side condition decided by the fact table, e.g. ``correlated(D1, B1)``."""

    predicate: str
    args: tuple[str, ...]

    def substitute(self, bindings: dict[str, str]) -> Condition:
        return Condition(self.predicate, tuple(bindings.get(a, a) for a in self.args))

    def __str__(self):
        p, a = self.predicate, self.args
        if p == "correlated":
            return f"correlation {a[0]}→{a[1]} holds"
        if p == "earlier":
            return f"{a[0]} confined in a region earlier than {a[1]}'s"
        if p == "noncommuting":
            x, y = sorted(a)
            return f"[{x},{y}] ≠ 0"
        if p == "witness":
            return f"{a[0]} > 0"
        return f"{p}({', '.join(a)})"


class RuleId(enum.Enum):
    A2i = "2.i"
    A2ii = "2.ii"
    A2iii = "2.iii"
    A2iv = "2.iv"
    A2v = "2.v"
    A3i = "3.i"
    A5i = "5.i"
    A5ii = "5.ii"
    A5iii = "5.iii"
    A5iv = "5.iv"
    Qi = "q.i"
    Qii = "q.ii"
    QiiiA = "q.iii.a"
    QiiiB = "q.iii.b"
    QiiiC = "q.iii.c"
    Qiv = "q.iv"


@dataclass(frozen=True)
class Rule:
    id: RuleId
    premises: tuple[Atom, ...]
    conclusion: Atom
    side_conditions: tuple[Condition, ...] = ()

    def __str__(self):
        lhs = ", ".join([str(p) for p in self.premises] + [str(c) for c in self.side_conditions])
        return f"({self.id.value}) {lhs} ⊢ {self.conclusion}"


def _a(label: str, kind: Kind, x: str = "?x") -> Atom:
    return Atom(x, label, kind)


def _c(predicate: str, *args: str) -> Condition:
    return Condition(predicate, args)


K = Kind
CATALOG: tuple[Rule, ...] = (
    Rule(RuleId.A2ii, (_a("?D", K.PLUS),), _a("?D", K.MEASURED)),
    Rule(RuleId.A2ii, (_a("?D", K.MINUS),), _a("?D", K.MEASURED)),
    Rule(RuleId.A2ii, (_a("?D", K.PLUS),), _a("?D", K.NOT_MINUS)),
    Rule(RuleId.A2ii, (_a("?D", K.MINUS),), _a("?D", K.NOT_PLUS)),
    Rule(RuleId.A2iv, (_a("?D", K.MEASURED),), _a("?B", K.NOT_MEASURED), (_c("noncommuting", "?D", "?B"),)),
    Rule(
        RuleId.A3i,
        (_a("?D", K.PLUS), _a("?D", K.MEASURED), _a("?B", K.MEASURED)),
        _a("?B", K.PLUS),
        (_c("correlated", "?D", "?B"),),
    ),
    Rule(RuleId.A5i, (_a("?B", K.PRED_PLUS),), _a("?B", K.NOT_PRED_MINUS)),
    Rule(RuleId.A5i, (_a("?B", K.PRED_MINUS),), _a("?B", K.NOT_PRED_PLUS)),
    Rule(RuleId.A5ii, (_a("?B", K.PRED_PLUS),), _a("?B", K.NOT_MINUS)),
    Rule(RuleId.A5ii, (_a("?B", K.PRED_MINUS),), _a("?B", K.NOT_PLUS)),
    Rule(RuleId.A5ii, (_a("?B", K.MINUS),), _a("?B", K.NOT_PRED_PLUS)),
    Rule(RuleId.A5ii, (_a("?B", K.PLUS),), _a("?B", K.NOT_PRED_MINUS)),
    Rule(
        RuleId.A5iii,
        (_a("?D", K.PLUS),),
        _a("?B", K.PRED_PLUS),
        (_c("correlated", "?D", "?B"), _c("earlier", "?D", "?B")),
    ),
    Rule(RuleId.A5iv, (_a("?D", K.PRED_PLUS),), _a("?B", K.PRED_PLUS), (_c("correlated", "?D", "?B"),)),
)
"""Default rule catalog, in the order the engine tries rules."""

REMARK_RULES = frozenset({RuleId.A5ii, RuleId.A5iii, RuleId.A5iv})


def catalog_without(*ids: RuleId, catalog: tuple[Rule, ...] = CATALOG) -> tuple[Rule, ...]:
    return tuple(r for r in catalog if r.id not in ids)


def remark_catalog(catalog: tuple[Rule, ...] = CATALOG) -> tuple[Rule, ...]:
    return tuple(r for r in catalog if r.id in REMARK_RULES)


# --- facts ----------------------------------------------------------------


@dataclass(frozen=True)
class FactTable:
    """Numerically verified facts about a configuration, frozen for the audit."""

    regions: dict[str, str]
    earlier_region: str
    noncommuting: frozenset[frozenset[str]]
    correlations: dict[tuple[str, str], str]
    probabilities: dict[str, float]

    @classmethod
    def from_config(cls, config: HardyConfiguration, tol: float | None = None) -> FactTable:
        tol = config.tol if tol is None else tol
        report = verify_config(config, tol)
        obs = config.observables
        noncommuting = frozenset(
            frozenset((a, b))
            for a, b in (("D1", "D2"), ("B1", "B2"))
            if commutator_norm(obs[a], obs[b]) > NONCOMMUTING_MIN
        )
        correlations = {
            link: name for link, name in zip(CHAIN, CHAIN_CONDITIONS) if report[name].passed
        }
        psi = config.psi
        probabilities = {}
        for label in LABELS:
            for sign in Sign:
                key = f"P({label}={'+' if sign > 0 else '-'}1)"
                probabilities[key] = outcome_probability(psi, obs[label], sign)
        for (a, sa), (b, sb) in (
            (("D1", Sign.PLUS), ("B2", Sign.MINUS)),
            (("B1", Sign.PLUS), ("D2", Sign.PLUS)),
        ):
            key = f"P({a}={'+' if sa > 0 else '-'}1, {b}={'+' if sb > 0 else '-'}1)"
            probabilities[key] = joint_probability(psi, obs[a], sa, obs[b], sb)
        return cls(
            regions={k: o.region.value for k, o in obs.items()},
            earlier_region=config.earlier.value,
            noncommuting=noncommuting,
            correlations=correlations,
            probabilities=probabilities,
        )

    def check(self, cond: Condition) -> tuple[bool, tuple[str, ...]]:
        """Decide a ground condition; returns (holds, cited fact names)."""
        p, args = cond.predicate, cond.args
        if p == "correlated":
            name = self.correlations.get(args)
            return (name is not None, (name,) if name else ())
        if p == "earlier":
            a, b = args
            ok = self.regions[a] == self.earlier_region and self.regions[b] != self.earlier_region
            return ok, ("q.i",)
        if p == "noncommuting":
            return frozenset(args) in self.noncommuting and args[0] != args[1], ("q.ii",)
        if p == "witness":
            return self.probabilities.get(args[0], 0.0) > WITNESS_MIN, ()
        raise ValueError(f"unknown side condition {p!r}")


# --- engine ---------------------------------------------------------------


class DepthExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class TraceEntry:
    rule: Rule
    bindings: tuple[tuple[str, str], ...]
    premises: tuple[Atom, ...]
    produced: Atom
    facts: tuple[str, ...]
    depth: int

    def __str__(self):
        cites = ", ".join((self.rule.id.value,) + self.facts)
        return f"{self.produced}   [{cites}] from {', '.join(map(str, self.premises)) or '∅'}"


def _match(premises, atoms, bindings):
    """Yield bindings under which every premise is among ``atoms``."""
    if not premises:
        yield bindings
        return
    first, rest = premises[0], premises[1:]
    for atom in atoms:
        if atom.kind is not first.kind:
            continue
        b = dict(bindings)
        ok = True
        for pat, val in ((first.specimen, atom.specimen), (first.label, atom.label)):
            if _is_var(pat):
                if b.setdefault(pat, val) != val:
                    ok = False
                    break
            elif pat != val:
                ok = False
                break
        if ok:
            yield from _match(rest, atoms, b)


def _free_label_vars(rule: Rule, bindings: dict[str, str]) -> list[str]:
    terms = [rule.conclusion.label] + [a for c in rule.side_conditions for a in c.args]
    out = []
    for t in terms:
        if _is_var(t) and t not in bindings and t not in out:
            out.append(t)
    return out


def _instantiations(rule: Rule, atoms, facts: FactTable):
    for b in _match(rule.premises, atoms, {}):
        free = _free_label_vars(rule, b)
        for values in product(LABELS, repeat=len(free)):
            full = dict(b, **dict(zip(free, values)))
            cited = []
            for cond in rule.side_conditions:
                ok, names = facts.check(cond.substitute(full))
                if not ok:
                    break
                cited.extend(names)
            else:
                yield full, tuple(dict.fromkeys(cited))


def _as_facts(config_or_facts) -> FactTable:
    if isinstance(config_or_facts, FactTable):
        return config_or_facts
    return FactTable.from_config(config_or_facts)


def forward_chain(atoms, rules, config, max_depth: int = 32) -> tuple[tuple[Atom, ...], tuple[TraceEntry, ...]]:
    """Apply ``rules`` to ``atoms`` until nothing new appears.

    Each round matches every rule (catalog order) against the atoms known
    at the start of the round (insertion order). Returns all atoms in
    insertion order and the trace of productive applications.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    facts = _as_facts(config)
    known = list(dict.fromkeys(atoms))
    seen = set(known)
    trace: list[TraceEntry] = []
    for depth in range(1, max_depth + 2):
        snapshot = tuple(known)
        fresh = []
        for rule in rules:
            for bindings, cited in _instantiations(rule, snapshot, facts):
                produced = rule.conclusion.substitute(bindings)
                if produced in seen:
                    continue
                seen.add(produced)
                fresh.append(produced)
                premises = tuple(p.substitute(bindings) for p in rule.premises)
                trace.append(TraceEntry(rule, tuple(sorted(bindings.items())), premises, produced, cited, depth))
        if not fresh:
            return tuple(known), tuple(trace)
        if depth > max_depth:
            raise DepthExceeded(f"no fixpoint within {max_depth} rounds")
        known.extend(fresh)
    raise AssertionError("unreachable")


def proof_of(atom: Atom, trace) -> tuple[TraceEntry, ...]:
    """Trace entries needed to derive ``atom``, in derivation order."""
    by_atom = {}
    for entry in trace:
        by_atom.setdefault(entry.produced, entry)
    needed: set[int] = set()
    index = {id(e): i for i, e in enumerate(trace)}

    def visit(a):
        entry = by_atom.get(a)
        if entry is None or index[id(entry)] in needed:
            return
        needed.add(index[id(entry)])
        for p in entry.premises:
            visit(p)

    visit(atom)
    return tuple(trace[i] for i in sorted(needed))


def replay(atoms, trace, config) -> bool:
    """Re-check every trace entry: premises already known and side conditions true."""
    facts = _as_facts(config)
    known = set(atoms)
    for entry in trace:
        b = dict(entry.bindings)
        if any(p not in known for p in entry.premises):
            return False
        if tuple(p.substitute(b) for p in entry.rule.premises) != entry.premises:
            return False
        if entry.rule.conclusion.substitute(b) != entry.produced:
            return False
        if not all(facts.check(c.substitute(b))[0] for c in entry.rule.side_conditions):
            return False
        known.add(entry.produced)
    return True


# --- audit reports --------------------------------------------------------


class StepStatus(enum.Enum):
    VALID = "valid"
    INVALID = "invalid"
    EXISTENTIAL = "existential"


class Proposition(enum.Enum):
    PROP1 = "prop1"
    PROP2 = "prop2"
    REMARK32 = "remark32"


class Verdict(enum.Enum):
    PROOF_VALID = "proof valid"
    PROOF_INVALID = "proof invalid"
    CONTRADICTION_DERIVED = "contradiction derived"
    NO_CONTRADICTION = "no contradiction"


@dataclass(frozen=True)
class DerivationStep:
    step_id: str
    claimed_atoms: tuple[Atom, ...]
    cited_rule: str
    status: StepStatus
    missing_premises: tuple[Atom | Condition, ...] = ()
    cited_facts: tuple[str, ...] = ()
    depends_on: tuple[str, ...] = ()
    by_dependency: bool = False
    conflict_notes: tuple[str, ...] = ()
    witness: float | None = None

    def __post_init__(self):
        if (self.status is StepStatus.INVALID) != bool(self.missing_premises):
            raise ValueError(f"step {self.step_id}: Invalid iff missing premises are listed")

    def format(self) -> str:
        claims = "; ".join(map(str, self.claimed_atoms))
        cites = ", ".join((self.cited_rule,) + self.cited_facts)
        line = f"{self.step_id:<5} {self.status.value.upper():<12} {claims}   [{cites}]"
        if self.witness is not None:
            line += f"  witness p = {self.witness:.6g}"
        extra = []
        if self.missing_premises:
            tag = "missing (via dependency)" if self.by_dependency else "missing"
            extra.append(f"      {tag}: " + "; ".join(map(str, self.missing_premises)))
        for note in self.conflict_notes:
            extra.append(f"      conflict: {note}")
        return "\n".join([line] + extra)


@dataclass(frozen=True)
class AuditReport:
    proposition: Proposition
    steps: tuple[DerivationStep, ...]
    verdict: Verdict
    witness: tuple[str, float] | None = None

    def __post_init__(self):
        invalid = any(s.status is StepStatus.INVALID for s in self.steps)
        if (self.verdict is Verdict.PROOF_INVALID) != invalid:
            raise ValueError("verdict must be PROOF_INVALID exactly when some step is invalid")

    def step(self, step_id: str) -> DerivationStep:
        for s in self.steps:
            if s.step_id == step_id:
                return s
        raise KeyError(step_id)

    def invalid_steps(self, direct_only: bool = False) -> list[str]:
        return [
            s.step_id for s in self.steps
            if s.status is StepStatus.INVALID and not (direct_only and s.by_dependency)
        ]

    def format(self) -> str:
        head = f"== {self.proposition.value}: {self.verdict.value}"
        if self.witness:
            head += f"  (witness {self.witness[0]}, p = {self.witness[1]:.6g})"
        return "\n".join([head] + [s.format() for s in self.steps])


def _require_structure(config: HardyConfiguration) -> FactTable:
    report = verify_config(config, config.tol)
    bad = [n for n in ("q.i", "q.ii") if not report[n].passed]
    if bad:
        raise ConfigRejected(f"configuration fails {bad}")
    return FactTable.from_config(config)


def _diagnose(claim: Atom, rule_id: RuleId, atoms, catalog, facts: FactTable):
    """Cheapest instantiation of ``rule_id`` concluding ``claim``: what is missing."""
    known = set(atoms)
    best = None
    for rule in catalog:
        if rule.id is not rule_id or rule.conclusion.kind is not claim.kind:
            continue
        b = {}
        for pat, val in ((rule.conclusion.specimen, claim.specimen), (rule.conclusion.label, claim.label)):
            if _is_var(pat):
                b[pat] = val
            elif pat != val:
                break
        else:
            pending = [p.label for p in rule.premises if _is_var(p.label) and p.label not in b]
            pending += [a for c in rule.side_conditions for a in c.args if _is_var(a) and a not in b]
            pending = list(dict.fromkeys(pending))
            for values in product(LABELS, repeat=len(pending)):
                full = dict(b, **dict(zip(pending, values)))
                missing = [p.substitute(full) for p in rule.premises if p.substitute(full) not in known]
                cited, failed = [], []
                for cond in rule.side_conditions:
                    ok, names = facts.check(cond.substitute(full))
                    cited.extend(names)
                    if not ok:
                        failed.append(cond.substitute(full))
                cost = len(missing) + len(failed)
                if best is None or cost < best[0]:
                    best = (cost, tuple(missing) + tuple(failed), tuple(dict.fromkeys(cited)))
    if best is None:
        return (Condition("rule_available", (rule_id.value,)),), ()
    return best[1], best[2]


def _conflicts(missing, atoms, trace) -> tuple[str, ...]:
    """For each missing atom whose negation is derivable, say how."""
    known = set(atoms)
    notes = []
    for m in missing:
        if not isinstance(m, Atom) or m.negate() not in known:
            continue
        entry = next(e for e in trace if e.produced == m.negate())
        b = dict(entry.bindings)
        conds = [str(c.substitute(b)) for c in entry.rule.side_conditions]
        reasons = " and ".join([str(p) for p in entry.premises] + conds)
        notes.append(f"{reasons} ⇒ {m.negate()} ({entry.rule.id.value})")
    return tuple(notes)


def _derived_step(step_id, claims, rule_id, atoms, trace, catalog, facts, depends_on=(), hypotheses=()):
    """Check each claimed atom is a hypothesis or produced by ``rule_id``."""
    produced = {}
    for e in trace:
        produced.setdefault((e.produced, e.rule.id), e)
    missing, cited, notes = [], [], []
    for claim in claims:
        if claim in hypotheses:
            continue
        entry = produced.get((claim, rule_id))
        if entry is not None:
            cited.extend(entry.facts)
            continue
        gaps, gap_cites = _diagnose(claim, rule_id, atoms, catalog, facts)
        missing.extend(gaps)
        cited.extend(gap_cites)
        notes.extend(_conflicts(gaps, atoms, trace))
    status = StepStatus.INVALID if missing else StepStatus.VALID
    return DerivationStep(
        step_id,
        tuple(claims),
        rule_id.value,
        status,
        tuple(dict.fromkeys(missing)),
        tuple(dict.fromkeys(cited)),
        tuple(depends_on),
        conflict_notes=tuple(notes),
    )


def _mark_dependencies(steps: list[DerivationStep]) -> list[DerivationStep]:
    """Flag invalid steps whose only gaps are claims of earlier invalid steps."""
    out = []
    unsupported: set[Atom] = set()
    for s in steps:
        if s.status is StepStatus.INVALID:
            gaps = set(s.missing_premises)
            if gaps and gaps <= unsupported and not s.conflict_notes:
                s = replace(s, by_dependency=True)
            unsupported.update(s.claimed_atoms)
        out.append(s)
    return out


def _existential_step(step_id, claims, rule_id, facts, key, cited) -> DerivationStep:
    p = facts.probabilities[key]
    if p > WITNESS_MIN:
        return DerivationStep(step_id, claims, rule_id.value, StepStatus.EXISTENTIAL, (), cited, witness=p)
    cond = Condition("witness", (key,))
    return DerivationStep(step_id, claims, rule_id.value, StepStatus.INVALID, (cond,), cited, witness=p)


def audit_proposition1(config: HardyConfiguration, catalog: tuple[Rule, ...] = CATALOG) -> AuditReport:
    """Replay E.1-E.5: a D2 measurement with B1 = +1 yields pred+ on B2."""
    facts = _require_structure(config)
    x = "x"
    e1 = Atom(x, "D2", Kind.MEASURED)
    e2 = Atom(x, "B1", Kind.PLUS)
    hyps = (e1, e2)
    atoms, trace = forward_chain(hyps, catalog, facts)

    steps = [
        DerivationStep("E.1", (e1,), "Hypothesis", StepStatus.VALID),
        DerivationStep("E.2", (e2,), "Hypothesis", StepStatus.VALID),
    ]
    e3 = _derived_step(
        "E.3", (Atom(x, "B1", Kind.MEASURED), e1), RuleId.A2ii, atoms, trace, catalog, facts,
        depends_on=("E.1", "E.2"), hypotheses=hyps,
    )
    key = "P(B1=+1, D2=+1)"
    witness = facts.probabilities[key]
    if witness <= WITNESS_MIN:
        gaps = e3.missing_premises + (Condition("witness", (key,)),)
        e3 = replace(e3, status=StepStatus.INVALID, missing_premises=gaps)
    steps.append(replace(e3, witness=witness))
    steps.append(_derived_step(
        "E.4", (Atom(x, "D2", Kind.PLUS),), RuleId.A3i, atoms, trace, catalog, facts, depends_on=("E.2", "E.3"),
    ))
    steps.append(_derived_step(
        "E.5", (Atom(x, "B2", Kind.PRED_PLUS),), RuleId.A5iii, atoms, trace, catalog, facts, depends_on=("E.4",),
    ))
    steps = _mark_dependencies(steps)
    invalid = any(s.status is StepStatus.INVALID for s in steps)
    return AuditReport(
        Proposition.PROP1,
        tuple(steps),
        Verdict.PROOF_INVALID if invalid else Verdict.PROOF_VALID,
        (x, witness),
    )


def audit_proposition2(config: HardyConfiguration, catalog: tuple[Rule, ...] = CATALOG) -> AuditReport:
    """Replay S.1-S.5 for the Hardy specimen x0 ∈ D1+ ∩ B2-."""
    facts = _require_structure(config)
    x, x0 = "x", "x0"

    s1 = _existential_step("S.1", (Atom(x, "D1", Kind.PLUS),), RuleId.A2iii, facts, "P(D1=+1)", ("q.ii",))
    s4_claims = (Atom(x0, "D1", Kind.PLUS), Atom(x0, "B2", Kind.MINUS))
    s4 = _existential_step("S.4", s4_claims, RuleId.Qiv, facts, "P(D1=+1, B2=-1)", ())

    atoms, trace = forward_chain(s4_claims, catalog, facts)
    s2 = _derived_step("S.2", (Atom(x0, "B1", Kind.PLUS),), RuleId.A3i, atoms, trace, catalog, facts, depends_on=("S.4",))
    if s2.status is StepStatus.INVALID or s1.status is StepStatus.INVALID:
        gaps = tuple(a for s in (s1, s2) if s.status is StepStatus.INVALID for a in s.claimed_atoms)
        s3 = DerivationStep("S.3", s2.claimed_atoms, "S.1+S.2", StepStatus.INVALID, gaps,
                            depends_on=("S.1", "S.2"), by_dependency=True)
    else:
        s3 = DerivationStep("S.3", s2.claimed_atoms, "S.1+S.2", StepStatus.VALID, depends_on=("S.1", "S.2"))
    s5 = _derived_step(
        "S.5", (Atom(x0, "B2", Kind.NOT_PRED_PLUS),), RuleId.A5ii, atoms, trace, catalog, facts, depends_on=("S.4",),
    )
    steps = (s1, s2, s3, s4, s5)
    invalid = any(s.status is StepStatus.INVALID for s in steps)
    return AuditReport(
        Proposition.PROP2,
        steps,
        Verdict.PROOF_INVALID if invalid else Verdict.PROOF_VALID,
        (x0, facts.probabilities["P(D1=+1, B2=-1)"]),
    )


def audit_remark_3_2(config: HardyConfiguration, catalog: tuple[Rule, ...] | None = None, start=None) -> AuditReport:
    """Chain pred+ marks from ``x ∈ D1+`` and look for a clash with the Hardy specimen.

    ``catalog`` defaults to the remark rules (5.ii, 5.iii, 5.iv). The
    clash is checked by instantiating the schematic ``x`` with ``x0``,
    which q.iv places in D1+ ∩ B2-.
    """
    facts = _require_structure(config)
    catalog = remark_catalog() if catalog is None else catalog
    start = (Atom("x", "D1", Kind.PLUS),) if start is None else tuple(start)
    atoms, trace = forward_chain(start, catalog, facts)

    key = "P(D1=+1, B2=-1)"
    p = facts.probabilities[key]
    witness_atoms = (Atom("x0", "D1", Kind.PLUS), Atom("x0", "B2", Kind.MINUS))
    clash = None
    if p > WITNESS_MIN:
        specimens = {a.specimen for a in start}
        for name in sorted(specimens):
            rename = {name: "x0"}
            if not all(a.substitute(rename) in witness_atoms for a in start if a.specimen == name):
                continue
            for atom in atoms:
                if atom.specimen == name and atom.substitute(rename).negate() in witness_atoms:
                    clash = atom
                    break
            if clash:
                break

    def as_step(i, entry):
        return DerivationStep(f"R.{i}", (entry.produced,), entry.rule.id.value, StepStatus.VALID, cited_facts=entry.facts)

    if clash is None:
        steps = tuple(as_step(i, e) for i, e in enumerate(trace, 1))
        return AuditReport(Proposition.REMARK32, steps, Verdict.NO_CONTRADICTION)

    chain = proof_of(clash, trace)
    steps = [as_step(i, e) for i, e in enumerate(chain, 1)]
    w = clash.substitute({clash.specimen: "x0"}).negate()
    steps.append(DerivationStep(
        f"R.{len(steps) + 1}",
        (w, w.negate()),
        RuleId.Qiv.value,
        StepStatus.VALID,
        conflict_notes=(f"{clash} holds for every x ∈ D1+, but q.iv gives x0 ∈ D1+ with {w}",),
        witness=p,
    ))
    return AuditReport(Proposition.REMARK32, tuple(steps), Verdict.CONTRADICTION_DERIVED, ("x0", p))


EXPECTED_VERDICTS = {
    Proposition.PROP1: Verdict.PROOF_VALID,
    Proposition.PROP2: Verdict.PROOF_INVALID,
    Proposition.REMARK32: Verdict.CONTRADICTION_DERIVED,
}


def matches_expectation(report: AuditReport) -> bool:
    """Whether ``report`` reproduces the expected verdict (for prop2: failing at S.2)."""
    if report.verdict is not EXPECTED_VERDICTS[report.proposition]:
        return False
    if report.proposition is Proposition.PROP2:
        return report.invalid_steps(direct_only=True) == ["S.2"]
    return True


# --- (SR)_ν on concrete specimens ------------------------------------------


class SrStatus(enum.Enum):
    SATISFIED = "satisfied"
    VACUOUSLY_SATISFIED = "vacuously satisfied"
    VIOLATED = "violated"


def sr_nu_holds(specimen: Specimen) -> SrStatus:
    """``B1 = +1 ⇒ pred+ on B2`` for a specimen whose marks have been closed."""
    if specimen.outcomes.get("B1") != 1:
        return SrStatus.VACUOUSLY_SATISFIED
    if specimen.has_mark("B2", Mark.PRED_PLUS):
        return SrStatus.SATISFIED
    return SrStatus.VIOLATED
