"""Varying sets over a finite poset and the Heyting algebra of upper sets.

Elements of a :class:`FinitePoset` are addressed by index; subsets of the
poset are ``int`` bitmasks over those indices.  A sieve at ``p`` is an
upward-closed subset of the principal up-set of ``p``.  A global element of
the subobject classifier is a compatible family of sieves, which we store
as the single upper set it comes from (:func:`gamma_iso_check` verifies
that correspondence exhaustively).

The theory-level constructions take the indexing poset as a sequence of
partitions, ordered by refinement (finer is lower).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import (
    ForeignElement,
    HomeNotInPoset,
    NotAccessibleAnywhere,
    NotAPartialOrder,
    NotASubobject,
    SpaceMismatch,
)
from .grainings import Partition, refinement_matrix
from .measure import HistoriesTheory, members
from .valuations import HomValuation, homs, restrict_hom


def _bits(mask: int) -> list[int]:
    return members(mask)


class FinitePoset:
    def __init__(self, elements: Sequence[Hashable], leq: Sequence[Sequence[bool]]):
        self.elements = tuple(elements)
        self.index = {x: i for i, x in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise NotAPartialOrder("poset elements must be distinct")
        k = len(self.elements)
        self._leq = tuple(tuple(bool(leq[i][j]) for j in range(k)) for i in range(k))
        self.up = tuple(sum(1 << j for j in range(k) if self._leq[i][j]) for i in range(k))
        self.down = tuple(sum(1 << j for j in range(k) if self._leq[j][i]) for i in range(k))
        self.all = (1 << k) - 1
        bad = self.order_violations()
        if bad:
            raise NotAPartialOrder(bad[0])
        # tops first: q > p implies up(q) is strictly smaller than up(p)
        self.top_down = tuple(sorted(range(k), key=lambda i: (bin(self.up[i]).count("1"), i)))

    @classmethod
    def from_relation(cls, elements, pairs: Iterable[tuple]) -> FinitePoset:
        """Reflexive-transitive closure of the given ``(lower, upper)`` pairs."""
        elements = list(elements)
        idx = {x: i for i, x in enumerate(elements)}
        k = len(elements)
        leq = [[i == j for j in range(k)] for i in range(k)]
        for a, b in pairs:
            leq[idx[a]][idx[b]] = True
        for m in range(k):
            for i in range(k):
                if leq[i][m]:
                    for j in range(k):
                        if leq[m][j]:
                            leq[i][j] = True
        return cls(elements, leq)

    @classmethod
    def of_partitions(cls, parts: Iterable[Partition]) -> FinitePoset:
        parts = list(dict.fromkeys(parts))
        return cls(parts, refinement_matrix(parts).tolist())

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FinitePoset({len(self)} elements)"

    def leq(self, i: int, j: int) -> bool:
        return self._leq[i][j]

    def order_violations(self) -> list[str]:
        k = len(self.elements)
        out = []
        for i in range(k):
            if not self._leq[i][i]:
                out.append(f"not reflexive at {i}")
            for j in range(k):
                if i != j and self._leq[i][j] and self._leq[j][i]:
                    out.append(f"not antisymmetric at {i},{j}")
                if self._leq[i][j] and self.up[j] & ~self.up[i]:
                    out.append(f"not transitive through {i}<={j}")
        return out

    def pos(self, x) -> int:
        try:
            return self.index[x]
        except (KeyError, TypeError):
            raise ForeignElement(f"{x!r} is not an element of the poset") from None

    def members(self, mask: int) -> tuple:
        return tuple(self.elements[i] for i in _bits(mask))

    def is_upper(self, mask: int) -> bool:
        return all(self.up[i] & ~mask == 0 for i in _bits(mask))

    def upper_closure(self, mask: int) -> int:
        out = 0
        for i in _bits(mask):
            out |= self.up[i]
        return out

    def upper_sets(self, within: int | None = None) -> list[int]:
        """All upper sets of the subposet on ``within`` (an up-closed mask), sorted."""
        region = self.all if within is None else within
        order = [i for i in self.top_down if region >> i & 1]
        out = []

        def rec(pos, chosen):
            if pos == len(order):
                out.append(chosen)
                return
            i = order[pos]
            rec(pos + 1, chosen)
            above = self.up[i] & region & ~(1 << i)
            if above & ~chosen == 0:
                rec(pos + 1, chosen | 1 << i)

        rec(0, 0)
        return sorted(out)

    def hasse(self) -> list[tuple[int, int]]:
        k = len(self)
        out = []
        for i in range(k):
            for j in range(k):
                if i != j and self._leq[i][j]:
                    between = self.up[i] & self.down[j] & ~(1 << i) & ~(1 << j)
                    if not between:
                        out.append((i, j))
        return out

    def to_dot(self, label: Callable[[Hashable], str] = str, highlight: int = 0) -> str:
        lines = ["digraph P {", "  rankdir=BT;", "  node [shape=box];"]
        for i, x in enumerate(self.elements):
            text = label(x).replace('"', '\\"')
            style = ', style=filled, fillcolor="lightblue"' if highlight >> i & 1 else ""
            lines.append(f'  n{i} [label="{text}"{style}];')
        for i, j in self.hasse():
            lines.append(f"  n{i} -> n{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


@lru_cache(maxsize=256)
def _partition_poset(parts: tuple[Partition, ...]) -> FinitePoset:
    return FinitePoset.of_partitions(parts)


def as_poset(P) -> FinitePoset:
    """Accept a FinitePoset, a PosetTag or any sequence of partitions."""
    if isinstance(P, FinitePoset):
        return P
    return _partition_poset(tuple(P))


# -- sieves and upper sets ----------------------------------------------------

@dataclass(frozen=True)
class Sieve:
    at: int
    mask: int


@dataclass(frozen=True)
class UpperSet:
    """An upper set of a poset, standing for a global element of the classifier."""

    mask: int
    members: tuple

    def sieve_at(self, P: FinitePoset, i: int) -> Sieve:
        return Sieve(i, self.mask & P.up[i])


def upper_set(P: FinitePoset, mask: int) -> UpperSet:
    return UpperSet(mask, P.members(mask))


def is_sieve(P: FinitePoset, s: Sieve) -> bool:
    return s.mask & ~P.up[s.at] == 0 and P.is_upper(s.mask)


def sieves_at(P, p) -> list[Sieve]:
    """Every sieve at ``p``; restriction to ``q >= p`` is intersection with ``up(q)``."""
    P = as_poset(P)
    i = P.pos(p)
    return [Sieve(i, m) for m in P.upper_sets(P.up[i])]


# -- varying sets ---------------------------------------------------------------

class VaryingSet:
    """A covariant set-valued functor on a finite poset.

    ``arrow(i, j, x)`` maps ``x`` in stage ``i`` to stage ``j`` for ``i <= j``.
    """

    def __init__(self, poset: FinitePoset, stages: Sequence[Iterable], arrow, name: str = ""):
        self.poset = poset
        self.stages = tuple(tuple(s) for s in stages)
        self._stage_sets = tuple(frozenset(s) for s in self.stages)
        self._arrow = arrow
        self.name = name

    def __repr__(self):
        return f"VaryingSet({self.name or 'anonymous'}, sizes={[len(s) for s in self.stages]})"

    def stage(self, i: int) -> tuple:
        return self.stages[i]

    def contains(self, i: int, x) -> bool:
        return x in self._stage_sets[i]

    def transition(self, i: int, j: int, x):
        if not self.poset.leq(i, j):
            raise ForeignElement(f"no arrow from stage {i} to stage {j}")
        return self._arrow(i, j, x)

    def law_violations(self) -> list[str]:
        """Identity and composition laws, over every comparable pair and triple."""
        P = self.poset
        out = []
        for i in range(len(P)):
            for x in self.stages[i]:
                if self._arrow(i, i, x) != x:
                    out.append(f"identity fails at stage {i}")
                for j in _bits(P.up[i]):
                    y = self._arrow(i, j, x)
                    if not self.contains(j, y):
                        out.append(f"arrow {i}->{j} leaves stage {j}")
                        continue
                    for k in _bits(P.up[j]):
                        if self._arrow(j, k, y) != self._arrow(i, k, x):
                            out.append(f"composition fails on {i}->{j}->{k}")
        return out


@dataclass(frozen=True, eq=False)
class Subobject:
    parent: VaryingSet
    stages: tuple[frozenset, ...]
    name: str = ""

    @property
    def degenerate(self) -> bool:
        """True when every stage is the whole parent stage."""
        return all(s == frozenset(self.parent.stage(i)) for i, s in enumerate(self.stages))

    @property
    def empty(self) -> bool:
        return not any(self.stages)

    def violations(self) -> list[str]:
        P = self.parent.poset
        out = []
        for i, s in enumerate(self.stages):
            if not s <= frozenset(self.parent.stage(i)):
                out.append(f"stage {i} is not inside the parent stage")
            for x in s:
                for j in _bits(P.up[i]):
                    if self.parent.transition(i, j, x) not in self.stages[j]:
                        out.append(f"square {i}->{j} does not commute")
        return out


def constant_varying_set(P, X: Iterable) -> VaryingSet:
    P = as_poset(P)
    X = tuple(X)
    return VaryingSet(P, [X] * len(P), lambda i, j, x: x, name="constant")


def characteristic(F: VaryingSet, S: Subobject, p: int, x) -> Sieve:
    """The stages above ``p`` at which ``x`` has been carried into ``S``."""
    if S.parent is not F:
        raise NotASubobject("subobject belongs to a different varying set")
    if not F.contains(p, x):
        raise ForeignElement(f"{x!r} is not in stage {p}")
    P = F.poset
    mask = 0
    for q in _bits(P.up[p]):
        if F.transition(p, q, x) in S.stages[q]:
            mask |= 1 << q
    s = Sieve(p, mask)
    if not is_sieve(P, s):
        raise NotASubobject(f"characteristic value at stage {p} is not a sieve")
    return s


def characteristic_violations(F: VaryingSet, S: Subobject) -> list[str]:
    """Sieve well-formedness and naturality of the characteristic family."""
    P = F.poset
    out = []
    for p in range(len(P)):
        for x in F.stage(p):
            s = characteristic(F, S, p, x)
            for q in _bits(P.up[p]):
                t = characteristic(F, S, q, F.transition(p, q, x))
                if t.mask != s.mask & P.up[q]:
                    out.append(f"naturality fails on {p}->{q}")
    return out


# -- Heyting algebras -----------------------------------------------------------

class HeytingAlgebra:
    """A finite lattice of upper sets closed under meet and join.

    ``implies`` is the relative pseudocomplement inside the carrier: the
    ambient implication of all upper sets when that lands in the carrier,
    otherwise the join of every carrier element ``c`` with ``a & c <= b``.
    Pairs where the two differ are listed in ``divergences``.
    """

    def __init__(self, poset: FinitePoset, carrier: Iterable[int], full: bool = False):
        self.poset = poset
        self.carrier = tuple(sorted(set(carrier)))
        self._set = frozenset(self.carrier)
        self.full = full
        if self.carrier:
            top, bottom = 0, poset.all
            for c in self.carrier:
                top |= c
                bottom &= c
            self.top, self.bottom = top, bottom
        else:
            self.top = self.bottom = None
        self._implies = {}
        self.divergences = []
        C = self.carrier
        for a in C:
            amb_row = ambient_implies_row(poset, a, C)
            for b, amb in zip(C, amb_row):
                if amb in self._set:
                    rel = amb
                else:
                    rel = 0
                    for c in C:
                        if a & c & ~b == 0:
                            rel |= c
                    self.divergences.append((a, b, amb, rel))
                self._implies[a, b] = rel

    def __len__(self):
        return len(self.carrier)

    def __contains__(self, mask):
        return mask in self._set

    @staticmethod
    def meet(a: int, b: int) -> int:
        return a & b

    @staticmethod
    def join(a: int, b: int) -> int:
        return a | b

    @staticmethod
    def le(a: int, b: int) -> bool:
        return a & ~b == 0

    def implies(self, a: int, b: int) -> int:
        return self._implies[a, b]

    def neg(self, a: int) -> int:
        return self.implies(a, self.bottom)

    def violations(self) -> list[str]:
        """Lattice closure, implication staying inside, and the adjunction
        ``c <= (a => b)  iff  c & a <= b`` over every triple."""
        out = []
        C = self.carrier
        for a in C:
            for b in C:
                if a & b not in self._set or a | b not in self._set:
                    out.append(f"carrier not closed on {a},{b}")
                if self._implies[a, b] not in self._set:
                    out.append(f"implication {a}=>{b} leaves the carrier")
        if not C:
            return out
        if len(self.poset) <= 62:
            arr = np.array(C, dtype=np.int64)
            for a in C:
                imp = np.array([self._implies[a, b] for b in C], dtype=np.int64)
                lhs = (arr[:, None] & ~imp[None, :]) == 0          # c <= (a => b)
                rhs = ((arr[:, None] & a) & ~arr[None, :]) == 0    # c & a <= b
                if not np.array_equal(lhs, rhs):
                    ci, bi = np.argwhere(lhs != rhs)[0]
                    out.append(f"adjunction fails on a={a}, b={C[bi]}, c={C[ci]}")
        else:
            for a in C:
                for b in C:
                    imp = self._implies[a, b]
                    for c in C:
                        if (c & ~imp == 0) != (c & a & ~b == 0):
                            out.append(f"adjunction fails on a={a}, b={b}, c={c}")
        return out


def ambient_implies(P: FinitePoset, a: int, b: int) -> int:
    """``{p : up(p) & a <= b}``, the implication in the algebra of all upper sets."""
    out = 0
    for i in range(len(P)):
        if P.up[i] & a & ~b == 0:
            out |= 1 << i
    return out


def ambient_implies_row(P: FinitePoset, a: int, bs: Sequence[int]) -> list[int]:
    if len(P) > 62 or not bs:
        return [ambient_implies(P, a, b) for b in bs]
    up = np.array(P.up, dtype=np.int64)
    B = np.array(bs, dtype=np.int64)
    ok = ((up[None, :] & a) & ~B[:, None]) == 0
    weights = np.left_shift(np.int64(1), np.arange(len(P), dtype=np.int64))
    return [int(x) for x in (ok * weights[None, :]).sum(axis=1)]


def heyting_ops(P) -> HeytingAlgebra:
    P = as_poset(P)
    return HeytingAlgebra(P, P.upper_sets(), full=True)


def generate_algebra(generators: Iterable, P) -> HeytingAlgebra:
    """Close the generators (upper sets or masks) under meet and join."""
    P = as_poset(P)
    gens = set()
    for g in generators:
        mask = g.mask if isinstance(g, UpperSet) else int(g)
        if not P.is_upper(mask):
            raise ForeignElement(f"generator {mask} is not an upper set")
        gens.add(mask)
    carrier = set(gens)
    frontier = set(gens)
    while frontier:
        new = set()
        for a in frontier:
            for b in list(carrier):
                for c in (a & b, a | b):
                    if c not in carrier:
                        new.add(c)
        carrier |= new
        frontier = new
    return HeytingAlgebra(P, carrier)


def gamma_iso_check(P, cap: int = 16) -> bool:
    """Compatible sieve families correspond one-to-one with upper sets.

    Families are enumerated independently of the upper-set side by
    backtracking from the top of the poset down.
    """
    P = as_poset(P)
    if len(P) > cap:
        raise ValueError(f"poset of size {len(P)} is above the exhaustive cap {cap}")
    sieves = {i: [s.mask for s in sieves_at(P, P.elements[i])] for i in range(len(P))}
    order = P.top_down
    families = []

    def rec(pos, chosen):
        if pos == len(order):
            families.append(tuple(chosen[i] for i in range(len(P))))
            return
        i = order[pos]
        above = _bits(P.up[i] & ~(1 << i))
        for s in sieves[i]:
            if all(s & P.up[q] == chosen[q] for q in above):
                chosen[i] = s
                rec(pos + 1, chosen)
        chosen.pop(i, None)

    rec(0, {})
    from_upper = {tuple(U & P.up[i] for i in range(len(P))) for U in P.upper_sets()}
    if len(from_upper) != len(P.upper_sets()):
        return False
    if set(families) != from_upper or len(families) != len(from_upper):
        return False
    # the inverse map: a family is recovered as the union of its sieves
    for fam in families:
        U = 0
        for s in fam:
            U |= s
        if tuple(U & P.up[i] for i in range(len(P))) != fam:
            return False
    return True


# -- theory instantiations --------------------------------------------------------

def _parts(P) -> tuple[Partition, ...]:
    if isinstance(P, FinitePoset):
        return tuple(P.elements)
    return tuple(P)


def _check_theory(theory: HistoriesTheory, parts):
    for p in parts:
        if p.n != theory.n:
            raise SpaceMismatch("poset partitions and theory have different sample spaces")


def valuation_varying_set(theory: HistoriesTheory, P) -> VaryingSet:
    """Stage at a partition: its homomorphisms; arrows: restriction to coarsenings."""
    parts = _parts(P)
    _check_theory(theory, parts)
    poset = as_poset(parts)

    def arrow(i, j, phi):
        return restrict_hom(phi, poset.elements[j])

    return VaryingSet(poset, [homs(p) for p in poset.elements], arrow, name="valuations")


def event_varying_set(theory: HistoriesTheory, P) -> VaryingSet:
    """The constant varying set of all events."""
    parts = _parts(P)
    _check_theory(theory, parts)
    vs = constant_varying_set(as_poset(parts), range(theory.full + 1))
    vs.name = "events"
    return vs


def accessible_subobject(theory: HistoriesTheory, P, F: VaryingSet | None = None) -> Subobject:
    """Events belonging to the algebra of some member of ``P`` refining the stage."""
    F = event_varying_set(theory, P) if F is None else F
    poset = F.poset
    stages = []
    for i in range(len(poset)):
        acc = set()
        for j in _bits(poset.down[i]):
            acc |= poset.elements[j].events
        stages.append(frozenset(acc))
    return Subobject(F, tuple(stages), name="accessible")


def valuation_subobject(theory: HistoriesTheory, P, Q=None, F: VaryingSet | None = None) -> Subobject:
    """Restrictions to each stage of valuations living on generator partitions below it.

    ``Q`` defaults to ``P``; since every partition refines itself, that choice
    makes every stage the full stage of the valuation varying set.
    """
    F = valuation_varying_set(theory, P) if F is None else F
    poset = F.poset
    gens = poset.elements if Q is None else _parts(Q)
    _check_theory(theory, gens)
    refine = refinement_matrix(list(gens) + list(poset.elements)) if gens else None
    k = len(gens)
    stages = []
    for i, target in enumerate(poset.elements):
        got = set()
        for g in range(k):
            if refine[g, k + i]:
                got.update(restrict_hom(phi, target) for phi in homs(gens[g]))
        stages.append(frozenset(got))
    return Subobject(F, tuple(stages), name="restricted valuations")


def global_element_event(theory: HistoriesTheory, P, A: int,
                         S: Subobject | None = None) -> UpperSet:
    """Stages from which event ``A`` is accessible."""
    theory.check_event(A)
    S = accessible_subobject(theory, P) if S is None else S
    poset = S.parent.poset
    mask = sum(1 << i for i, s in enumerate(S.stages) if A in s)
    if mask == 0:
        raise NotAccessibleAnywhere(f"{theory.fmt(A)} is in no algebra of the poset")
    return upper_set(poset, mask)


def global_element_valuation(theory: HistoriesTheory, P, phi: HomValuation, Q=None,
                             S: Subobject | None = None) -> UpperSet:
    """Stages above phi's home partition at which phi's restriction lies in the subobject."""
    S = valuation_subobject(theory, P, Q) if S is None else S
    F = S.parent
    poset = F.poset
    if phi.partition not in poset.index:
        raise HomeNotInPoset("the valuation's home partition is not in the poset")
    home = poset.index[phi.partition]
    return upper_set(poset, characteristic(F, S, home, phi).mask)


@dataclass(frozen=True, eq=False)
class ValuationEmbedding:
    """The map sending each pooled valuation to its global element."""

    poset: FinitePoset
    subobject: Subobject
    valuations: tuple[HomValuation, ...]
    images: dict
    algebra: HeytingAlgebra

    @property
    def degenerate(self) -> bool:
        return self.subobject.degenerate

    def collisions(self) -> list[tuple[int, tuple[HomValuation, ...]]]:
        groups: dict[int, list] = {}
        for phi in self.valuations:
            groups.setdefault(self.images[phi].mask, []).append(phi)
        return [(m, tuple(g)) for m, g in sorted(groups.items()) if len(g) > 1]

    @property
    def injective(self) -> bool:
        return not self.collisions()


def h_map(theory: HistoriesTheory, P, Q=None) -> ValuationEmbedding:
    parts = _parts(P)
    S = valuation_subobject(theory, parts, Q)
    poset = S.parent.poset
    vals = tuple(phi for p in poset.elements for phi in homs(p))
    images = {phi: global_element_valuation(theory, parts, phi, S=S) for phi in vals}
    algebra = generate_algebra(images.values(), poset)
    return ValuationEmbedding(poset, S, vals, images, algebra)


@dataclass(frozen=True, eq=False)
class EventEmbedding:
    """Global elements for every event lying in some algebra of the poset."""

    poset: FinitePoset
    subobject: Subobject
    images: dict
    algebra: HeytingAlgebra


def event_embedding(theory: HistoriesTheory, P) -> EventEmbedding:
    parts = _parts(P)
    S = accessible_subobject(theory, parts)
    reachable = set()
    for p in parts:
        reachable |= p.events
    images = {A: global_element_event(theory, parts, A, S=S) for A in sorted(reachable)}
    return EventEmbedding(S.parent.poset, S, images, generate_algebra(images.values(), S.parent.poset))
