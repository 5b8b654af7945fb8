import pytest

from hardyaudit.auditor import (
    CATALOG,
    Atom,
    AuditReport,
    Condition,
    DepthExceeded,
    DerivationStep,
    FactTable,
    Kind,
    Proposition,
    Rule,
    RuleId,
    SrStatus,
    StepStatus,
    Verdict,
    audit_proposition1,
    audit_proposition2,
    audit_remark_3_2,
    catalog_without,
    forward_chain,
    matches_expectation,
    proof_of,
    remark_catalog,
    replay,
    sr_nu_holds,
)
from hardyaudit.hardy import ConfigRejected, HardyConfiguration, HardyParams, build_config
from hardyaudit.kernel import Region, Sign, joint_probability, validate_observable
from hardyaudit.support import (
    AlphaChoice,
    BetaChoice,
    Context,
    Mark,
    Specimen,
    Support,
    apply_prediction_closure,
)


def perturbed(config, delta=0.3):
    p = config.params
    meas = list(p.meas_angles)
    meas[2] += delta
    return build_config(HardyParams(p.state_angles, meas))


class TestAtoms:
    def test_unknown_label(self):
        with pytest.raises(ValueError):
            Atom("x", "C3", Kind.PLUS)

    def test_kind_must_be_enum(self):
        with pytest.raises(TypeError):
            Atom("x", "D1", "plus")

    def test_negation_roundtrip(self):
        for kind in Kind:
            a = Atom("x", "B1", kind)
            assert a.negate().negate() == a
            assert a.negate().kind.negative != kind.negative

    def test_rendering(self):
        assert str(Atom("x0", "B1", Kind.MEASURED)) == "x0 ∈ B1"
        assert str(Atom("x", "B2", Kind.PRED_PLUS)) == "x ∈ pred(B2)+"
        assert str(Atom("x0", "B1", Kind.NOT_MEASURED)) == "x0 ∉ B1"
        assert str(Condition("correlated", ("B1", "D2"))) == "correlation B1→D2 holds"


class TestFacts:
    def test_chain_correlations_only(self, hardy):
        facts = FactTable.from_config(hardy)
        assert set(facts.correlations) == {("D1", "B1"), ("B1", "D2"), ("D2", "B2")}

    def test_probabilities_from_kernel(self, hardy):
        facts = FactTable.from_config(hardy)
        p = joint_probability(hardy.psi, hardy.d1, Sign.PLUS, hardy.b2, Sign.MINUS)
        assert facts.probabilities["P(D1=+1, B2=-1)"] == p


class TestEngine:
    def test_single_firing(self, hardy):
        rules = tuple(r for r in CATALOG if r.id is RuleId.A5iii)
        start = (Atom("x", "D1", Kind.PLUS),)
        atoms, trace = forward_chain(start, rules, hardy)
        assert atoms == start + (Atom("x", "B1", Kind.PRED_PLUS),)
        assert len(trace) == 1 and trace[0].depth == 1
        assert "q.iii.a" in trace[0].facts

    def test_empty_rules_identity(self, hardy):
        start = (Atom("x", "D1", Kind.PLUS), Atom("y", "B2", Kind.MINUS))
        assert forward_chain(start, (), hardy) == (start, ())

    def test_remark_catalog_chain(self, hardy):
        atoms, trace = forward_chain((Atom("x", "D1", Kind.PLUS),), remark_catalog(), hardy)
        expected = [
            Atom("x", "B1", Kind.PRED_PLUS),
            Atom("x", "D2", Kind.PRED_PLUS),
            Atom("x", "B2", Kind.PRED_PLUS),
            Atom("x", "B2", Kind.NOT_MINUS),
        ]
        chain = [e.produced for e in proof_of(expected[-1], trace)]
        assert chain == expected
        assert set(expected) <= set(atoms)

    def test_depth_limit(self, hardy):
        with pytest.raises(DepthExceeded):
            forward_chain((Atom("x", "D1", Kind.PLUS),), remark_catalog(), hardy, max_depth=1)
        with pytest.raises(ValueError):
            forward_chain((), (), hardy, max_depth=0)

    @pytest.mark.parametrize("start", [
        (Atom("x", "D1", Kind.PLUS),),
        (Atom("x", "D2", Kind.MEASURED), Atom("x", "B1", Kind.PLUS)),
        (Atom("x0", "D1", Kind.PLUS), Atom("x0", "B2", Kind.MINUS)),
        (Atom("y", "B1", Kind.PRED_MINUS), Atom("y", "D2", Kind.MINUS), Atom("y", "D2", Kind.MEASURED)),
    ])
    def test_trace_replays_soundly(self, hardy, start):
        atoms, trace = forward_chain(start, CATALOG, hardy)
        assert replay(start, trace, hardy)
        assert set(atoms) == set(start) | {e.produced for e in trace}

    def test_replay_detects_forged_premise(self, hardy):
        start = (Atom("x", "D1", Kind.PLUS),)
        _, trace = forward_chain(start, CATALOG, hardy)
        assert not replay((Atom("x", "D2", Kind.PLUS),), trace, hardy)

    def test_deterministic(self, hardy):
        start = (Atom("x", "D1", Kind.PLUS), Atom("x", "B2", Kind.MEASURED))
        assert forward_chain(start, CATALOG, hardy) == forward_chain(start, CATALOG, hardy)

    def test_broken_correlation_blocks_rule(self, hardy):
        bad = perturbed(hardy)
        atoms, _ = forward_chain((Atom("x", "D1", Kind.PLUS),), remark_catalog(), bad)
        assert Atom("x", "B1", Kind.PRED_PLUS) not in atoms


class TestProposition1:
    def test_canonical(self, hardy):
        report = audit_proposition1(hardy)
        assert report.verdict is Verdict.PROOF_VALID
        assert [s.step_id for s in report.steps] == ["E.1", "E.2", "E.3", "E.4", "E.5"]
        assert all(s.status is StepStatus.VALID for s in report.steps)
        p = joint_probability(hardy.psi, hardy.b1, Sign.PLUS, hardy.d2, Sign.PLUS)
        assert report.witness[1] == pytest.approx(p, abs=1e-15) and p > 1e-9
        assert report.step("E.4").claimed_atoms == (Atom("x", "D2", Kind.PLUS),)
        assert report.step("E.5").claimed_atoms == (Atom("x", "B2", Kind.PRED_PLUS),)
        assert "q.iii.b" in report.step("E.4").cited_facts
        assert matches_expectation(report)

    def test_broken_b1_correlation(self, hardy):
        report = audit_proposition1(perturbed(hardy))
        e4 = report.step("E.4")
        assert e4.status is StepStatus.INVALID
        assert "correlation B1→D2 holds" in [str(m) for m in e4.missing_premises]
        assert report.verdict is Verdict.PROOF_INVALID
        assert not matches_expectation(report)

    def test_rejects_structurally_invalid(self, hardy):
        b2 = validate_observable(hardy.b1.matrix, Region.BETA, "B2")
        with pytest.raises(ConfigRejected):
            audit_proposition1(HardyConfiguration(hardy.psi, hardy.d1, hardy.d2, hardy.b1, b2))


class TestProposition2:
    def test_canonical(self, hardy):
        report = audit_proposition2(hardy)
        assert report.verdict is Verdict.PROOF_INVALID
        assert report.invalid_steps() == ["S.2", "S.3"]
        assert report.invalid_steps(direct_only=True) == ["S.2"]
        assert report.step("S.1").status is StepStatus.EXISTENTIAL
        assert report.step("S.4").status is StepStatus.EXISTENTIAL
        assert report.step("S.5").status is StepStatus.VALID
        s2 = report.step("S.2")
        assert s2.missing_premises == (Atom("x0", "B1", Kind.MEASURED),)
        assert any("x0 ∈ B2" in n and "[B1,B2] ≠ 0" in n for n in s2.conflict_notes)
        assert report.step("S.3").by_dependency
        assert report.step("S.4").witness == pytest.approx(0.0901699, abs=1e-6)
        assert matches_expectation(report)

    def test_without_incompatibility_rule(self, hardy):
        report = audit_proposition2(hardy, catalog_without(RuleId.A2iv))
        s2 = report.step("S.2")
        assert s2.status is StepStatus.INVALID
        assert s2.missing_premises == (Atom("x0", "B1", Kind.MEASURED),)
        assert s2.conflict_notes == ()

    def test_commuting_beta_pair_rejected(self, hardy):
        b2 = validate_observable(hardy.b1.matrix, Region.BETA, "B2")
        with pytest.raises(ConfigRejected):
            audit_proposition2(HardyConfiguration(hardy.psi, hardy.d1, hardy.d2, hardy.b1, b2))


class TestRemark:
    def test_contradiction(self, hardy):
        report = audit_remark_3_2(hardy)
        assert report.verdict is Verdict.CONTRADICTION_DERIVED
        assert len(report.steps) == 5
        claims = [s.claimed_atoms[0] for s in report.steps[:4]]
        assert claims == [
            Atom("x", "B1", Kind.PRED_PLUS),
            Atom("x", "D2", Kind.PRED_PLUS),
            Atom("x", "B2", Kind.PRED_PLUS),
            Atom("x", "B2", Kind.NOT_MINUS),
        ]
        assert [s.cited_rule for s in report.steps] == ["5.iii", "5.iv", "5.iv", "5.ii", "q.iv"]
        assert report.steps[-1].conflict_notes
        assert matches_expectation(report)

    def test_without_forbidden_rule(self, hardy):
        report = audit_remark_3_2(hardy, catalog_without(RuleId.A5iv, catalog=remark_catalog()))
        assert report.verdict is Verdict.NO_CONTRADICTION
        produced = [s.claimed_atoms[0] for s in report.steps]
        assert Atom("x", "B1", Kind.PRED_PLUS) in produced
        assert Atom("x", "D2", Kind.PRED_PLUS) not in produced
        assert not matches_expectation(report)

    def test_empty_start(self, hardy):
        report = audit_remark_3_2(hardy, start=())
        assert report.verdict is Verdict.NO_CONTRADICTION
        assert report.steps == ()


def test_audits_deterministic(hardy):
    for audit in (audit_proposition1, audit_proposition2, audit_remark_3_2):
        assert audit(hardy) == audit(hardy)


def test_report_invariants():
    with pytest.raises(ValueError):
        DerivationStep("S.9", (), "3.i", StepStatus.INVALID)
    with pytest.raises(ValueError):
        DerivationStep("S.9", (), "3.i", StepStatus.VALID, missing_premises=(Atom("x", "B1", Kind.MEASURED),))
    ok = DerivationStep("S.9", (), "3.i", StepStatus.VALID)
    with pytest.raises(ValueError):
        AuditReport(Proposition.PROP1, (ok,), Verdict.PROOF_INVALID)


class TestSrNu:
    def test_closure_satisfies(self, hardy):
        s = Specimen(0, Context(AlphaChoice.D2, BetaChoice.B1), {"D2": 1, "B1": 1})
        closed = apply_prediction_closure(Support(hardy, (s,)))
        assert sr_nu_holds(closed.specimens[0]) is SrStatus.SATISFIED

    def test_vacuous(self):
        assert sr_nu_holds(Specimen(0, Context(AlphaChoice.D1), {"D1": 1})) is SrStatus.VACUOUSLY_SATISFIED

    def test_violated(self):
        s = Specimen(0, Context(beta=BetaChoice.B1), {"B1": 1})
        assert sr_nu_holds(s) is SrStatus.VIOLATED
        marked = Specimen(0, s.context, s.outcomes, {"B2": frozenset({Mark.PRED_PLUS})})
        assert sr_nu_holds(marked) is SrStatus.SATISFIED
