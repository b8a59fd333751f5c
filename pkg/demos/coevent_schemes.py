"""
Coevent schemes side by side
============================

A multiplicative coevent A* answers "true" for exactly the events that
contain A.  The schemes differ in which duals A they admit.
"""

from qmt import coevents as ce
from qmt import generators
from qmt.grainings import build_poset

theory = generators.three_path()
poset = build_poset(theory)

def show(result):
    duals = [theory.fmt(A) for A in result.duals] or ["(empty)"]
    print(f"{result.name:7s} {', '.join(duals)}")

show(ce.multiplicative_scheme(theory, poset=poset))
show(ce.cons_d(theory, poset=poset))
show(ce.cons_c(theory, poset=poset))
show(ce.cons_m(theory, poset=poset))

# the two minimality readings pick opposite ends of the preclusive duals
print("preclusive duals:", [theory.fmt(A) for A in ce.preclusive_duals(theory)])
print("literal mode M:  ", [theory.fmt(A) for A in ce.multiplicative_scheme(theory, "literal", poset).duals])

# loose Cons_D admits any block of a decoherent partition
show(ce.cons_d(theory, "loose", poset))

# {a,b}* is preclusive but not classical on the two-block decoherent sets
phi = ce.co_dual(theory.n, theory.event("a", "b"))
for p in poset.tagged("D"):
    print(f"  {p.format(theory.labels):14s} classical: {ce.is_classical_on(phi, p)}")
