"""Search for a Hardy configuration and inspect its certificate.

Runs the multi-start optimizer with a handful of restarts, prints the
condition table and compares the score with the closed form (5√5 − 11)/2.
"""

import math

from hardyaudit import OptimizerSettings, canonical_config, hardy_score, optimize_hardy, verify_config

config, report = optimize_hardy(seed=1, settings=OptimizerSettings(restarts=4))
print(report.format_table())

score = hardy_score(config)
print(f"\nscore               {score:.15f}")
print(f"closed form         {(5 * math.sqrt(5) - 11) / 2:.15f}")

# The frozen configuration shipped with the package carries the same certificate.
print("\ncanonical passes:", verify_config(canonical_config()).passed)
