"""
Which coarse grainings look classical?
======================================

Every partition of the histories is a candidate coarse graining.  Tag
the decoherent ones (D) and the preclusively separable ones (P), then
write the Hasse diagram as DOT.
"""

import sys

from qmt import generators
from qmt.grainings import build_poset, is_decoherent, poset_dot

theory = generators.random_theory(seed=3, n=4)
poset = build_poset(theory)
print(f"{len(poset)} partitions of {theory.n} histories")

for tag in ("D", "P", "PD"):
    print(f"B_{tag}: {len(poset.tagged(tag))}")

for p in poset.tagged("D")[:6]:
    print("  decoherent:", p.format(theory.labels))

# the finest partition is decoherent only when the measure is additive
finest = poset.elements[-1]
print("finest decoherent?", is_decoherent(theory, finest))

out = sys.argv[1] if len(sys.argv) > 1 else None
if out:
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(poset_dot(poset))
    print("wrote", out)
