"""Replay the three derivations on the canonical configuration.

The first proof checks out step by step. The second fails at the step that
needs the Hardy specimen to have been measured for B1, and the engine
explains why that premise is unavailable. Chaining prediction marks along
all three correlations produces a clash with the Hardy specimen; dropping
the rule that propagates from a prediction removes it.
"""

from hardyaudit import canonical_config
from hardyaudit.auditor import (
    RuleId,
    audit_proposition1,
    audit_proposition2,
    audit_remark_3_2,
    catalog_without,
    remark_catalog,
)

config = canonical_config()
for audit in (audit_proposition1, audit_proposition2, audit_remark_3_2):
    print(audit(config).format(), end="\n\n")

print(audit_remark_3_2(config, catalog_without(RuleId.A5iv, catalog=remark_catalog())).format())
