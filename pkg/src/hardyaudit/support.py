"""Finite supports: sampled ensembles of specimens and their prediction marks.

A specimen gets a measurement context (at most one observable per
region), actual outcomes drawn from the Born distribution, and a set of
prediction marks that the closure rule may add later.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .hardy import CHAIN, LABELS, ConfigRejected, HardyConfiguration, verify_config
from .kernel import Sign, commutes, joint_probability, outcome_probability

ZERO_PROBABILITY = 1e-12


class AlphaChoice(enum.Enum):
    D1 = "D1"
    D2 = "D2"
    NONE = "none"


class BetaChoice(enum.Enum):
    B1 = "B1"
    B2 = "B2"
    NONE = "none"


class Mark(enum.Enum):
    PRED_PLUS = "pred+"
    PRED_MINUS = "pred-"


class Filter(enum.Enum):
    ALL = "all"
    PLUS = "plus"
    MINUS = "minus"


class InvalidPolicy(ValueError):
    pass


class UnknownLabel(KeyError):
    pass


class ConsistencyViolation(RuntimeError):
    """Closure tried to mark a prediction that contradicts the specimen."""

    def __init__(self, specimen_id: int, label: str, statement: str, rule_chain: tuple[str, ...]):
        self.specimen_id = specimen_id
        self.label = label
        self.statement = statement
        self.rule_chain = rule_chain
        super().__init__(
            f"specimen {specimen_id}: pred+ on {label} violates ({statement}); chain: " + " ⇒ ".join(rule_chain)
        )


@dataclass(frozen=True)
class Context:
    alpha: AlphaChoice = AlphaChoice.NONE
    beta: BetaChoice = BetaChoice.NONE

    @property
    def measured(self) -> tuple[str, ...]:
        return tuple(c.value for c in (self.alpha, self.beta) if c.value != "none")

    @property
    def name(self) -> str:
        return f"{self.alpha.value}/{self.beta.value}"

    @classmethod
    def parse(cls, text: str) -> Context:
        a, b = text.split("/")
        return cls(AlphaChoice(a), BetaChoice(b))


ALL_CONTEXTS = tuple(Context(a, b) for a, b in product(AlphaChoice, BetaChoice))


@dataclass(frozen=True)
class ContextPolicy:
    """Sampling weights over the nine contexts, in ``ALL_CONTEXTS`` order."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) != len(ALL_CONTEXTS):
            raise InvalidPolicy(f"need {len(ALL_CONTEXTS)} weights, got {len(w)}")
        if any(not np.isfinite(x) or x < 0 for x in w):
            raise InvalidPolicy("weights must be finite and nonnegative")
        if abs(sum(w) - 1.0) > 1e-12:
            raise InvalidPolicy(f"weights sum to {sum(w)!r}, not 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def concentrated(cls, context: Context) -> ContextPolicy:
        return cls(tuple(1.0 if c == context else 0.0 for c in ALL_CONTEXTS))

    @classmethod
    def uniform(cls) -> ContextPolicy:
        return cls((1 / 9,) * 8 + (1 - 8 / 9,))

    @classmethod
    def preset(cls, name: str) -> ContextPolicy:
        """``uniform``, ``none``, or a region pair such as ``d1b2``, ``d2``, ``b1``."""
        name = name.lower()
        if name == "uniform":
            return cls.uniform()
        if name == "none":
            return cls.concentrated(Context())
        alpha, beta = AlphaChoice.NONE, BetaChoice.NONE
        rest = name
        if rest[:2] in ("d1", "d2"):
            alpha, rest = AlphaChoice(rest[:2].upper()), rest[2:]
        if rest[:2] in ("b1", "b2"):
            beta, rest = BetaChoice(rest[:2].upper()), rest[2:]
        if rest or (alpha is AlphaChoice.NONE and beta is BetaChoice.NONE):
            raise InvalidPolicy(f"unknown policy preset {name!r}")
        return cls.concentrated(Context(alpha, beta))


@dataclass(frozen=True, slots=True)
class Specimen:
    id: int
    context: Context
    outcomes: dict[str, int] = field(default_factory=dict)
    predictions: dict[str, frozenset[Mark]] = field(default_factory=dict)

    def has_mark(self, label: str, mark: Mark) -> bool:
        return mark in self.predictions.get(label, ())


@dataclass(frozen=True, eq=False)
class Support:
    config: HardyConfiguration
    specimens: tuple[Specimen, ...]
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "specimens", tuple(self.specimens))
        for i, s in enumerate(self.specimens):
            if s.id != i:
                raise ValueError(f"specimen ids must be dense from 0; position {i} has id {s.id}")

    def __eq__(self, other):
        if not isinstance(other, Support):
            return NotImplemented
        return self.seed == other.seed and self.config == other.config and self.specimens == other.specimens

    __hash__ = None

    def __len__(self):
        return len(self.specimens)


def _categorical(rng: np.random.Generator, probs, size: int) -> np.ndarray:
    """Inverse-CDF draw in which zero-weight categories are never chosen."""
    cum = np.cumsum(probs)
    cum = cum / cum[-1]
    return np.searchsorted(cum, rng.random(size), side="right")


def _outcome_table(config: HardyConfiguration, context: Context) -> tuple[list[tuple[int, ...]], list[float]]:
    """Possible outcome tuples for ``context.measured`` and their exact probabilities."""
    labels = context.measured
    psi = config.psi
    if len(labels) == 2:
        a, b = (config.observable(k) for k in labels)
        combos = [(sa, sb) for sa in (1, -1) for sb in (1, -1)]
        probs = [joint_probability(psi, a, Sign(sa), b, Sign(sb)) for sa, sb in combos]
    elif len(labels) == 1:
        obs = config.observable(labels[0])
        combos = [(1,), (-1,)]
        probs = [outcome_probability(psi, obs, Sign(s)) for (s,) in combos]
    else:
        return [()], [1.0]
    probs = [0.0 if p < ZERO_PROBABILITY else p for p in probs]
    return combos, probs


def exact_outcome_probabilities(config: HardyConfiguration, context: Context) -> dict[tuple[int, ...], float]:
    combos, probs = _outcome_table(config, context)
    total = sum(probs)
    return {c: p / total for c, p in zip(combos, probs)}


def sample_support(config: HardyConfiguration, policy: ContextPolicy, n: int, seed: int) -> Support:
    """Draw ``n`` specimens: a context from ``policy``, then Born-rule outcomes."""
    if not isinstance(policy, ContextPolicy):
        raise InvalidPolicy("policy must be a ContextPolicy")
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    ctx_index = _categorical(rng, policy.weights, n)

    outcomes: list[dict[str, int]] = [{} for _ in range(n)]
    for k, context in enumerate(ALL_CONTEXTS):
        members = np.flatnonzero(ctx_index == k)
        if members.size == 0 or not context.measured:
            continue
        combos, probs = _outcome_table(config, context)
        draws = _categorical(rng, probs, members.size)
        labels = context.measured
        for i, d in zip(members.tolist(), draws.tolist()):
            outcomes[i] = dict(zip(labels, combos[d]))

    specimens = tuple(
        Specimen(i, ALL_CONTEXTS[k], outcomes[i], {}) for i, k in enumerate(ctx_index.tolist())
    )
    return Support(config, specimens, seed)


def extension(support: Support, label: str, filter: Filter = Filter.ALL) -> frozenset[int]:
    """Ids of specimens on which ``label`` was measured, optionally by outcome sign."""
    if label not in LABELS:
        raise UnknownLabel(label)
    filter = Filter(filter)
    if filter is Filter.ALL:
        return frozenset(s.id for s in support.specimens if label in s.outcomes)
    want = 1 if filter is Filter.PLUS else -1
    return frozenset(s.id for s in support.specimens if s.outcomes.get(label) == want)


# --- axiom reports --------------------------------------------------------


class Status(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    WITNESSED = "witnessed"
    NOT_WITNESSED = "not witnessed"


@dataclass(frozen=True)
class AxiomEntry:
    name: str
    status: Status
    detail: str = ""
    offenders: tuple[int, ...] = ()


@dataclass(frozen=True)
class AxiomReport:
    entries: tuple[AxiomEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.status is not Status.FAIL for e in self.entries)

    def __getitem__(self, name: str) -> AxiomEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def format_table(self) -> str:
        lines = []
        for e in self.entries:
            tail = f" specimens {list(e.offenders[:10])}" if e.offenders else ""
            lines.append(f"{e.name:<12} {e.status.value:<14} {e.detail}{tail}")
        return "\n".join(lines)


def _witness(name: str, found: bool, detail: str) -> AxiomEntry:
    return AxiomEntry(name, Status.WITNESSED if found else Status.NOT_WITNESSED, detail)


def check_kinematic_axioms(support: Support) -> AxiomReport:
    """Check partition and incompatibility on this support; note existential witnesses."""
    config = support.config
    entries = []

    bad_ctx = tuple(s.id for s in support.specimens if set(s.outcomes) != set(s.context.measured))
    entries.append(AxiomEntry(
        "context",
        Status.FAIL if bad_ctx else Status.PASS,
        "outcomes recorded exactly for the measured observables",
        bad_ctx,
    ))

    bad_values = tuple(
        s.id for s in support.specimens
        if any(v not in (1, -1) or k not in LABELS for k, v in s.outcomes.items())
    )
    entries.append(AxiomEntry(
        "2.ii",
        Status.FAIL if bad_values else Status.PASS,
        "D+ and D- partition D",
        bad_values,
    ))

    for a, b in (("D1", "D2"), ("B1", "B2")):
        name = f"2.iv:{a},{b}"
        if commutes(config.observable(a), config.observable(b)):
            entries.append(AxiomEntry(name, Status.PASS, "commuting pair, no constraint"))
            continue
        both = tuple(sorted(extension(support, a) & extension(support, b)))
        entries.append(AxiomEntry(
            name,
            Status.FAIL if both else Status.PASS,
            f"[{a},{b}] ≠ 0 so {a} ∩ {b} must be empty",
            both,
        ))

    for label in LABELS:
        entries.append(_witness(f"2.i:{label}", bool(extension(support, label)), f"{label} measured somewhere"))
    for label in LABELS:
        for f, sign in ((Filter.PLUS, "+"), (Filter.MINUS, "-")):
            found = bool(extension(support, label, f))
            entries.append(_witness(f"2.iii:{label}{sign}", found, f"{label}{sign} nonempty"))
    for a in ("D1", "D2"):
        for b in ("B1", "B2"):
            found = bool(extension(support, a) & extension(support, b))
            entries.append(_witness(f"2.v:{a},{b}", found, f"{a} ∩ {b} nonempty"))
    return AxiomReport(tuple(entries))


def check_prediction_consistency(support: Support) -> AxiomReport:
    both, clash = [], []
    for s in support.specimens:
        for label, marks in s.predictions.items():
            if Mark.PRED_PLUS in marks and Mark.PRED_MINUS in marks:
                both.append(s.id)
            actual = s.outcomes.get(label)
            if (Mark.PRED_PLUS in marks and actual == -1) or (Mark.PRED_MINUS in marks and actual == 1):
                clash.append(s.id)
    return AxiomReport((
        AxiomEntry("5.i", Status.FAIL if both else Status.PASS, "no label predicted both +1 and -1", tuple(both)),
        AxiomEntry("5.ii", Status.FAIL if clash else Status.PASS, "predictions agree with actual outcomes", tuple(clash)),
    ))


# --- prediction closure ---------------------------------------------------


def _licensed_links(config: HardyConfiguration, strengthened: bool) -> tuple[tuple[str, str], ...]:
    if strengthened:
        return CHAIN
    return tuple(
        (x, y) for x, y in CHAIN
        if config.observable(x).region is config.earlier and config.observable(y).region is not config.earlier
    )


def _close_specimen(s: Specimen, links, measured_links, strengthened: bool) -> Specimen:
    preds = {k: set(v) for k, v in s.predictions.items()}
    why: dict[str, tuple[str, ...]] = {
        k: (f"{k}=+1 measured",) for k, v in s.outcomes.items() if v == 1
    }
    changed = True
    while changed:
        changed = False
        for x, y in links:
            if x in s.outcomes and s.outcomes[x] == 1:
                source = why[x]
            elif strengthened and Mark.PRED_PLUS in preds.get(x, ()):
                source = why.get(f"pred:{x}", (f"pred+ {x} given",))
            else:
                continue
            if Mark.PRED_PLUS in preds.get(y, ()):
                continue
            rule = "5.iii" if (x, y) in measured_links and x in s.outcomes else "5.iv"
            chain = source + (f"{x}→{y} ({rule}): pred+ {y}",)
            if s.outcomes.get(y) == -1:
                raise ConsistencyViolation(s.id, y, "5.ii", chain + (f"{y}=-1 measured",))
            if Mark.PRED_MINUS in preds.get(y, ()):
                raise ConsistencyViolation(s.id, y, "5.i", chain + (f"pred- {y} already present",))
            preds.setdefault(y, set()).add(Mark.PRED_PLUS)
            why[f"pred:{y}"] = chain
            changed = strengthened
    frozen = {k: frozenset(v) for k, v in preds.items()}
    if frozen == s.predictions:
        return s
    return Specimen(s.id, s.context, s.outcomes, frozen)


def apply_prediction_closure(support: Support, strengthened: bool = False) -> Support:
    """Add pred+ marks licensed by the correlation chain.

    With ``strengthened=False`` a mark on Y requires an actual +1 outcome
    of X, measured in the earlier region, for a chain link X→Y. With
    ``strengthened=True`` marks also propagate from other marks along
    every link until a fixed point: this is the unlicensed rule, and on
    Hardy supports it eventually contradicts a measured outcome.
    """
    report = verify_config(support.config, support.config.tol)
    if not report.passed:
        raise ConfigRejected(f"configuration fails {report.failures()}")
    links = _licensed_links(support.config, strengthened)
    measured_links = _licensed_links(support.config, False)
    specimens = tuple(_close_specimen(s, links, measured_links, strengthened) for s in support.specimens)
    return Support(support.config, specimens, support.seed)


# --- sampling statistics --------------------------------------------------


def sample_stats(support: Support) -> dict:
    """Per-context counts and outcome frequencies beside the exact probabilities."""
    by_context: dict[Context, list[Specimen]] = {c: [] for c in ALL_CONTEXTS}
    for s in support.specimens:
        by_context[s.context].append(s)
    rows = []
    for context in ALL_CONTEXTS:
        members = by_context[context]
        exact = exact_outcome_probabilities(support.config, context)
        counts = {c: 0 for c in exact}
        for s in members:
            counts[tuple(s.outcomes[k] for k in context.measured)] += 1
        outcomes = []
        if context.measured and members:
            for combo, p in exact.items():
                outcomes.append({
                    "outcome": list(combo),
                    "count": counts[combo],
                    "frequency": counts[combo] / len(members),
                    "exact": p,
                })
        rows.append({"context": context.name, "count": len(members), "labels": list(context.measured), "outcomes": outcomes})
    return {"n": len(support), "seed": support.seed, "contexts": rows}
