"""
One Heyting algebra for all consistent sets
===========================================

Valuations living on different decoherent partitions are sent to upper
sets of the poset B_D.  With every decoherent partition generating the
subobject, each valuation lands on the principal upper set of its home,
so valuations sharing a home collide.  Restricting the generators to B_PD
clears the degeneracy flag; for three paths it also sends every valuation
to the top partition alone.
"""

from qmt import generators, topos
from qmt.grainings import build_poset
from qmt.valuations import format_valuation

theory = generators.three_path()
poset = build_poset(theory)
bd, bpd = poset.tagged("D"), poset.tagged("PD")


def describe(emb):
    P = emb.poset
    print("  degenerate:", emb.degenerate)
    for phi in emb.valuations:
        img = [p.format(theory.labels) for p in P.members(emb.images[phi].mask)]
        print(f"  {format_valuation(phi, theory.labels):28s} -> {img}")
    print("  algebra size:", len(emb.algebra), " collisions:", len(emb.collisions()))
    assert not emb.algebra.violations()


print("generators = B_D")
describe(topos.h_map(theory, bd))

print("generators = B_PD")
describe(topos.h_map(theory, bd, bpd))

# every upper-set algebra is a Heyting algebra, and global elements of the
# truth-value object match upper sets one to one
H = topos.heyting_ops(bd)
print("upper sets of B_D:", len(H), " Gamma iso:", topos.gamma_iso_check(bd))
