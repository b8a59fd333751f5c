"""Naive recomputations used to cross-check the fast paths.

Everything here is written from the definitions with explicit sets and
truth tables: measures as double sums, sublattices as unions of block
combinations, coevents as explicit supports, valuations as dictionaries.
Nothing is shared with the fast path except the theory's zero test.
"""

from __future__ import annotations

import itertools

from . import coevents as ce
from . import topos
from .grainings import build_poset, enumerate_partitions
from .measure import HistoriesTheory
from .valuations import homs


def _events(n):
    return range(1 << n)


def _subset(A, B):
    return A & B == A


def naive_mu(theory: HistoriesTheory, A: int):
    idx = [i for i in range(theory.n) if A >> i & 1]
    total = theory.re[0][0] * 0
    for a in idx:
        for b in idx:
            total += theory.re[a][b]
    return total


def naive_sublattice(partition) -> set[int]:
    out = set()
    blocks = partition.blocks
    for r in range(len(blocks) + 1):
        for combo in itertools.combinations(blocks, r):
            u = 0
            for b in combo:
                u |= b
            out.add(u)
    return out


def naive_decoherent(theory, partition, mu) -> bool:
    ev = naive_sublattice(partition)
    return all(theory.close(mu[A | B], mu[A] + mu[B])
               for A in ev for B in ev if A & B == 0)


def naive_separable(theory, partition, mu) -> bool:
    nulls = [Z for Z in _events(theory.n) if theory.is_zero(mu[Z])]
    return all(theory.is_zero(mu[b & Z]) for Z in nulls for b in partition.blocks)


def naive_tags(theory):
    mu = [naive_mu(theory, A) for A in _events(theory.n)]
    parts = enumerate_partitions(theory.n)
    dec = [p for p in parts if naive_decoherent(theory, p, mu)]
    sep = [p for p in parts if naive_separable(theory, p, mu)]
    return mu, parts, dec, sep


def decoherence_diff(theory: HistoriesTheory, poset=None) -> list[str]:
    poset = build_poset(theory) if poset is None else poset
    mu, parts, dec, sep = naive_tags(theory)
    out = []
    for A in _events(theory.n):
        if not theory.close(mu[A], theory.mu_table[A]):
            out.append(f"mu{theory.fmt(A)}: fast {theory.mu_table[A]} naive {mu[A]}")
    if set(dec) != set(poset.tagged("D")):
        out.append("B_D differs")
    if set(sep) != set(poset.tagged("P")):
        out.append("B_P differs")
    return out


# -- schemes ----------------------------------------------------------------------

def _filter_support(n, A):
    return frozenset(B for B in _events(n) if _subset(A, B))


def _is_multiplicative(n, supp):
    return all(((A & B) in supp) == (A in supp and B in supp)
               for A in _events(n) for B in _events(n))


def _minimal(supports: dict, mode: str) -> list[int]:
    """Keys whose coevent is minimal under domination (literal) or dual inclusion."""
    keys = list(supports)
    out = []
    for A in keys:
        beaten = False
        for B in keys:
            if B == A:
                continue
            if mode == "literal":
                # psi dominates phi: psi(X)=1 implies phi(X)=1
                beaten = supports[B] <= supports[A]
            else:
                # phi is primitive unless a strictly larger support exists
                beaten = supports[A] < supports[B]
            if beaten:
                break
        if not beaten:
            out.append(A)
    return sorted(out)


def naive_schemes(theory: HistoriesTheory, mode: str = "primitive", reading: str = "literal") -> dict:
    n = theory.n
    mu, parts, dec, _ = naive_tags(theory)
    null = {Z for Z in _events(n) if theory.is_zero(mu[Z])}
    candidates = {}
    for A in range(1, 1 << n):
        supp = _filter_support(n, A)
        if _is_multiplicative(n, supp):
            candidates[A] = supp
    preclusive = {A: s for A, s in candidates.items() if not (s & null)}
    M = _minimal(preclusive, mode)

    def classical(supp, p):
        return sum(b in supp for b in p.blocks) == 1

    mpc = {A: s for A, s in preclusive.items() if all(classical(s, p) for p in dec)}
    cons_m = _minimal(mpc, mode)

    def truth_table(p, block):
        return {B: int(_subset(block, B)) for B in naive_sublattice(p)}

    def in_cl(table):
        return not any(table[Z] and theory.is_zero(mu[Z]) for Z in table)

    cons_d, cons_c = set(), set()
    for p in dec:
        for block in p.blocks:
            table = truth_table(p, block)
            supp_phi = {B for B, v in table.items() if v}
            if reading == "literal":
                ok = candidates[block] == supp_phi
            else:
                ok = True
            if ok:
                cons_d.add(block)
                if in_cl(table):
                    cons_c.add(block)
    return {
        "M": M,
        "M_PC": sorted(mpc),
        "Cons_M": cons_m,
        "Cons_D": sorted(cons_d),
        "Cons_C": sorted(cons_c),
    }


def scheme_diff(theory: HistoriesTheory, poset=None) -> list[str]:
    poset = build_poset(theory) if poset is None else poset
    out = []
    for mode in ce.MODES:
        naive = naive_schemes(theory, mode=mode)
        fast = {
            "M": ce.multiplicative_scheme(theory, mode, poset).duals,
            "Cons_M": ce.cons_m(theory, mode, poset).duals,
            "M_PC": tuple(c.dual for c in ce.m_pc(theory, poset)),
        }
        for key, val in fast.items():
            if sorted(val) != naive[key]:
                out.append(f"{key} ({mode}): fast {sorted(val)} naive {naive[key]}")
    for reading in ce.READINGS:
        naive = naive_schemes(theory, reading=reading)
        for key, fn in (("Cons_D", ce.cons_d), ("Cons_C", ce.cons_c)):
            val = sorted(fn(theory, reading, poset).duals)
            if val != naive[key]:
                out.append(f"{key} ({reading}): fast {val} naive {naive[key]}")
    return out


# -- Heyting ------------------------------------------------------------------------

def naive_upper_sets(P: topos.FinitePoset) -> list[int]:
    k = len(P)
    out = []
    for S in range(1 << k):
        ok = True
        for i in range(k):
            if S >> i & 1:
                for j in range(k):
                    if P.leq(i, j) and not S >> j & 1:
                        ok = False
                        break
            if not ok:
                break
        if ok:
            out.append(S)
    return out


def naive_implies(carrier, a, b):
    """Greatest carrier element c with c & a <= b, by exhaustive search."""
    cands = [c for c in carrier if c & a & ~b == 0]
    # a greatest element has maximal size, so try those first
    for g in sorted(cands, key=lambda c: -bin(c).count("1")):
        if all(c & ~g == 0 for c in cands):
            return g
    return None


def heyting_diff(alg: topos.HeytingAlgebra, exhaustive_carrier: bool = True) -> list[str]:
    out = []
    P = alg.poset
    if alg.full and exhaustive_carrier and len(P) <= 15:
        if naive_upper_sets(P) != list(alg.carrier):
            out.append("upper-set enumeration differs")
    C = alg.carrier
    for a in C:
        for b in C:
            g = naive_implies(C, a, b)
            if g != alg.implies(a, b):
                out.append(f"implies({a},{b}): fast {alg.implies(a, b)} naive {g}")
    return out


# -- topos: valuation subobject ----------------------------------------------------------

def _table(phi):
    return frozenset((B, int(_subset(phi.block, B))) for B in naive_sublattice(phi.partition))


def naive_valuation_subobject(theory, P, Q=None) -> list[frozenset]:
    """Stages of the restricted-valuation subobject, as sets of truth tables."""
    P = list(P)
    Q = P if Q is None else list(Q)
    out = []
    for target in P:
        domain = naive_sublattice(target)
        stage = set()
        for g in Q:
            if domain <= naive_sublattice(g):
                for block in g.blocks:
                    full_table = {B: int(_subset(block, B)) for B in naive_sublattice(g)}
                    stage.add(frozenset((B, full_table[B]) for B in domain))
        out.append(frozenset(stage))
    return out


def topos_diff(theory: HistoriesTheory, P, Q=None) -> list[str]:
    S = topos.valuation_subobject(theory, P, Q)
    poset = S.parent.poset
    naive = naive_valuation_subobject(theory, poset.elements, Q)
    out = []
    for i, stage in enumerate(S.stages):
        if frozenset(_table(phi) for phi in stage) != naive[i]:
            out.append(f"subobject stage {i} differs")
    naive_degenerate = all(
        len(naive[i]) == len(homs(p)) for i, p in enumerate(poset.elements)
    )
    if naive_degenerate != S.degenerate:
        out.append(f"degeneracy flag: fast {S.degenerate} naive {naive_degenerate}")
    return out


def full_diff(theory: HistoriesTheory, heyting_max: int = 8) -> dict[str, list[str]]:
    """Every oracle comparison for one theory; all lists empty means agreement."""
    poset = build_poset(theory)
    report = {
        "decoherence": decoherence_diff(theory, poset),
        "schemes": scheme_diff(theory, poset),
        "heyting": [],
        "topos": [],
    }
    for tag in ("D", "PD"):
        members = poset.tagged(tag)
        if not members or len(members) > heyting_max:
            continue
        P = topos.as_poset(members)
        report["heyting"] += heyting_diff(topos.heyting_ops(P))
        report["heyting"] += heyting_diff(topos.h_map(theory, members).algebra)
        report["topos"] += topos_diff(theory, members)
        report["topos"] += topos_diff(theory, members, poset.tagged("PD"))
    return report
