import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardyaudit.auditor import audit_proposition1, audit_proposition2, audit_remark_3_2
from hardyaudit.hardy import HardyConfiguration, verify_config
from hardyaudit.kernel import IDENTITY_2, Region, StateVector, tensor_product, validate_observable
from hardyaudit.serialize import (
    FormatError,
    ReportFile,
    audit_report_from_dict,
    audit_report_to_dict,
    axiom_report_from_dict,
    axiom_report_to_dict,
    condition_report_from_dict,
    condition_report_to_dict,
    config_from_dict,
    config_to_dict,
    dumps,
    load_config,
    support_from_dict,
    support_to_dict,
)
from hardyaudit.support import ContextPolicy, apply_prediction_closure, check_kinematic_axioms, sample_support

from conftest import random_involution, random_unit


def random_config(seed):
    rng = np.random.default_rng(seed)
    alpha = [tensor_product(random_involution(rng), IDENTITY_2) for _ in range(2)]
    beta = [tensor_product(IDENTITY_2, random_involution(rng)) for _ in range(2)]
    obs = [
        validate_observable(alpha[0], Region.ALPHA, "D1"),
        validate_observable(alpha[1], Region.ALPHA, "D2"),
        validate_observable(beta[0], Region.BETA, "B1"),
        validate_observable(beta[1], Region.BETA, "B2"),
    ]
    return HardyConfiguration(StateVector(random_unit(rng, 4)), *obs, tol=float(rng.choice([1e-9, 1e-7])))


def roundtrip(doc):
    return json.loads(dumps(doc))


@given(st.integers(0, 2**32 - 1))
def test_config_roundtrip(seed):
    config = random_config(seed)
    assert config_from_dict(roundtrip(config_to_dict(config, "p"))) == config


def test_canonical_config_roundtrip(hardy, tmp_path):
    path = tmp_path / "c.json"
    path.write_text(dumps(config_to_dict(hardy)))
    assert load_config(path) == hardy
    doc = json.loads(path.read_text())
    assert doc["schema_version"] == 1
    assert [o["label"] for o in doc["observables"]] == ["D1", "D2", "B1", "B2"]
    assert all(len(pair) == 2 for pair in doc["state"])


class TestConfigDiagnostics:
    def test_missing_schema(self, hardy):
        doc = config_to_dict(hardy)
        del doc["schema_version"]
        with pytest.raises(FormatError, match="schema_version"):
            config_from_dict(doc)

    def test_wrong_schema(self, hardy):
        doc = dict(config_to_dict(hardy), schema_version=2)
        with pytest.raises(FormatError):
            config_from_dict(doc)

    def test_bad_matrix_names_field(self, hardy):
        doc = roundtrip(config_to_dict(hardy))
        doc["observables"][2]["matrix"][0][0] = [5.0, 0.0]
        with pytest.raises(FormatError, match=r"observables\[2\]"):
            config_from_dict(doc)

    def test_unnormalized_state(self, hardy):
        doc = roundtrip(config_to_dict(hardy))
        doc["state"][0] = [9.0, 0.0]
        with pytest.raises(FormatError, match="state"):
            config_from_dict(doc)

    def test_truncated_file(self, hardy, tmp_path):
        path = tmp_path / "t.json"
        path.write_text(dumps(config_to_dict(hardy))[:200])
        with pytest.raises(FormatError, match="line"):
            load_config(path)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 60))
def test_support_roundtrip(seed, n):
    from hardyaudit.hardy import canonical_config

    support = apply_prediction_closure(sample_support(canonical_config(), ContextPolicy.uniform(), n, seed))
    assert support_from_dict(roundtrip(support_to_dict(support))) == support


def test_report_roundtrips(hardy):
    cond = verify_config(hardy)
    assert condition_report_from_dict(roundtrip(condition_report_to_dict(cond))) == cond
    axioms = check_kinematic_axioms(sample_support(hardy, ContextPolicy.uniform(), 100, 0))
    assert axiom_report_from_dict(roundtrip(axiom_report_to_dict(axioms))) == axioms
    for audit in (audit_proposition1, audit_proposition2, audit_remark_3_2):
        report = audit(hardy)
        assert audit_report_from_dict(roundtrip(audit_report_to_dict(report))) == report


@given(st.integers(0, 2**32 - 1))
def test_condition_report_roundtrip_random(seed):
    report = verify_config(random_config(seed))
    back = ReportFile.loads(ReportFile("condition", condition_report_to_dict(report), {"seed": seed}).dumps())
    assert back.decode() == report
    assert back.settings == {"seed": seed}


def test_report_file_audit_decode(hardy):
    reports = [audit_proposition2(hardy), audit_remark_3_2(hardy)]
    rf = ReportFile("audit", [audit_report_to_dict(r) for r in reports], {"which": "x"})
    assert ReportFile.loads(rf.dumps()) == rf
    assert rf.decode() == reports


def test_report_file_kind_checked():
    with pytest.raises(ValueError):
        ReportFile("bogus", {})
    with pytest.raises(FormatError):
        ReportFile.from_dict({"schema_version": 1, "kind": "bogus", "payload": {}})
