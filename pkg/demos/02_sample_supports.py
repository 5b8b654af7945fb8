"""Draw specimens from the canonical configuration under several context policies.

The (D1, B2) context shows the Hardy event D1 = +1, B2 = −1 at roughly 9 %,
while the three chained contexts never produce their forbidden pair.
"""

import math

from hardyaudit import ContextPolicy, Filter, canonical_config, extension, sample_support
from hardyaudit.kernel import Sign, joint_probability

config = canonical_config()
n = 50_000

support = sample_support(config, ContextPolicy.preset("d1b2"), n, seed=7)
hits = extension(support, "D1", Filter.PLUS) & extension(support, "B2", Filter.MINUS)
p = joint_probability(config.psi, config.d1, Sign.PLUS, config.b2, Sign.MINUS)
sigma = math.sqrt(p * (1 - p) / n)
print(f"D1=+1, B2=-1: {len(hits) / n:.5f} sampled vs {p:.5f} exact ({(len(hits) / n - p) / sigma:+.2f} sigma)")

for policy, (x, sx, y, sy) in {
    "d1b1": ("D1", 1, "B1", -1),
    "d2b1": ("B1", 1, "D2", -1),
    "d2b2": ("D2", 1, "B2", -1),
}.items():
    s = sample_support(config, ContextPolicy.preset(policy), n, seed=7)
    count = sum(1 for sp in s.specimens if sp.outcomes[x] == sx and sp.outcomes[y] == sy)
    print(f"{policy}: {x}={sx:+d} with {y}={sy:+d} occurred {count} times")
