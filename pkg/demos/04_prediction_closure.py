"""Contrast the two closure regimes on a sampled support.

Marks licensed only by measured outcomes stay consistent with every
specimen. Letting marks propagate from other marks reaches B2 for a
specimen that actually recorded B2 = −1.
"""

from hardyaudit import ContextPolicy, canonical_config, sample_support
from hardyaudit.support import ConsistencyViolation, apply_prediction_closure, check_prediction_consistency

config = canonical_config()
support = sample_support(config, ContextPolicy.preset("d1b2"), 2_000, seed=3)

closed = apply_prediction_closure(support)
marked = sum(1 for s in closed.specimens if s.predictions)
print(f"measured-only closure: {marked} specimens marked")
print(check_prediction_consistency(closed).format_table())

try:
    apply_prediction_closure(support, strengthened=True)
except ConsistencyViolation as err:
    print("\npropagating closure failed:")
    print(f"  specimen {err.specimen_id}, label {err.label}, statement {err.statement}")
    for link in err.rule_chain:
        print("   ", link)
