"""Hardy configurations, finite supports and audits of counterfactual locality derivations."""

from .auditor import (
    CATALOG,
    Atom,
    AuditReport,
    Kind,
    RuleId,
    SrStatus,
    Verdict,
    audit_proposition1,
    audit_proposition2,
    audit_remark_3_2,
    catalog_without,
    forward_chain,
    sr_nu_holds,
)
from .hardy import (
    HARDY_OPTIMUM,
    ConditionReport,
    HardyConfiguration,
    HardyParams,
    OptimizerSettings,
    build_config,
    canonical_config,
    hardy_score,
    optimize_hardy,
    verify_config,
)
from .kernel import (
    Region,
    Sign,
    StateVector,
    TwoValueObservable,
    commutes,
    correlation_holds,
    expectation,
    joint_probability,
    projector,
    tensor_product,
    validate_observable,
)
from .support import (
    Context,
    ContextPolicy,
    Filter,
    Support,
    apply_prediction_closure,
    check_kinematic_axioms,
    check_prediction_consistency,
    extension,
    sample_support,
)

__version__ = "0.1.0"
