"""
Classical coin against three-path interference
==============================================

Two tosses of a fair coin give an ordinary probability measure.  Three
paths with amplitudes (1, 1, -1) do not: {a} and {b} each have measure 1,
yet {a, b} has measure 4.
"""

from qmt import generators
from qmt.measure import kolmogorov_violation, quantum_sum_rule_check

coin = generators.coin()
print("coin:", {coin.fmt(A): str(coin.mu(A)) for A in range(1, coin.full + 1) if bin(A).count("1") == 1})
print("coin additive:", kolmogorov_violation(coin) is None)

# the interference example
three = generators.three_path()
for A in range(three.full + 1):
    print(f"  mu{three.fmt(A):8s} = {three.mu(A)}")

A, B = kolmogorov_violation(three)
print("additivity fails on", three.fmt(A), "and", three.fmt(B))

# null events: {a,c} and {b,c} cancel exactly
print("null events:", [three.fmt(Z) for Z in three.null_events()])

# the quantum sum rule still holds for every disjoint triple
print("sum-rule violations:", quantum_sum_rule_check(three))
