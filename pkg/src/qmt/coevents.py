"""Coevents: nonzero Z2-valued maps on the full event algebra.

A general coevent is stored by its support (the events sent to 1).  A
multiplicative coevent is a principal filter and is stored by its dual
event, the generator ``A`` of the filter ``{B : A <= B}``.

Minimality has two readings.  ``"primitive"`` (default) keeps coevents whose
dual is inclusion-minimal, the reading under which the multiplicative
scheme reduces to the classical homomorphisms for probability measures.
``"literal"`` applies the domination order word for word: ``phi`` dominates
``psi`` iff ``supp(phi) <= supp(psi)``, and a coevent is minimal when no
other member dominates it, which selects inclusion-maximal duals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import EmptyDual, ForeignEvent, NotMultiplicative, SpaceMismatch
from .grainings import GrainingPoset, Partition, build_poset, is_decoherent
from .measure import HistoriesTheory, event_sort_key
from .valuations import HomValuation, cl

MODES = ("primitive", "literal")
READINGS = ("literal", "loose")


@dataclass(frozen=True)
class Coevent:
    n: int
    support: frozenset[int]

    def __post_init__(self):
        if not self.support:
            raise ValueError("the zero map is not a coevent")
        full = (1 << self.n) - 1
        if any(B < 0 or B > full for B in self.support):
            raise ForeignEvent("support contains events outside the algebra")


@dataclass(frozen=True, order=True)
class MultiplicativeCoevent:
    """The coevent ``A*``: ``A*(B) = 1`` iff ``A`` is a subset of ``B``."""

    n: int
    dual: int

    def __post_init__(self):
        if self.dual == 0:
            raise EmptyDual("the dual of a multiplicative coevent is nonempty")
        if self.dual > (1 << self.n) - 1:
            raise ForeignEvent(f"dual {self.dual} is outside the algebra")

    @property
    def support(self) -> frozenset[int]:
        full = (1 << self.n) - 1
        rest = full & ~self.dual
        out = []
        S = rest
        while True:
            out.append(self.dual | S)
            if S == 0:
                break
            S = (S - 1) & rest
        return frozenset(out)

    def to_coevent(self) -> Coevent:
        return Coevent(self.n, self.support)


def _support(phi) -> frozenset[int]:
    return phi.support


def eval(phi, B: int) -> int:  # noqa: A001 - mirrors the operation name
    full = (1 << phi.n) - 1
    if B < 0 or B > full:
        raise ForeignEvent(f"event {B} is outside the algebra")
    if isinstance(phi, MultiplicativeCoevent):
        return int(phi.dual & ~B == 0)
    return int(B in phi.support)


def multiplicative_witness(phi):
    """A pair ``(A, B)`` with phi(A & B) != phi(A) & phi(B), or ``None``."""
    if isinstance(phi, MultiplicativeCoevent):
        return None
    full = (1 << phi.n) - 1
    supp = phi.support
    for A in range(full + 1):
        for B in range(A, full + 1):
            if ((A & B) in supp) != (A in supp and B in supp):
                return A, B
    return None


def is_filter(support: Iterable[int], full: int) -> bool:
    """Nonempty, upward closed and closed under intersection."""
    supp = frozenset(support)
    if not supp:
        return False
    principal = full
    for A in supp:
        principal &= A
    # a filter on a finite Boolean lattice is exactly the principal up-set
    return principal in supp and len(supp) == 1 << bin(full & ~principal).count("1") and all(
        principal & ~A == 0 for A in supp
    )


def is_multiplicative(phi) -> bool:
    """Pairwise meet rule and the filter test, which must agree."""
    pairwise = multiplicative_witness(phi) is None
    filt = is_filter(phi.support, (1 << phi.n) - 1)
    if pairwise != filt:
        raise AssertionError("multiplicativity tests disagree")  # pragma: no cover
    return pairwise


def dual(phi) -> int:
    if isinstance(phi, MultiplicativeCoevent):
        return phi.dual
    if not is_multiplicative(phi):
        raise NotMultiplicative("coevent support is not a filter",
                                witness=list(multiplicative_witness(phi)))
    principal = (1 << phi.n) - 1
    for A in phi.support:
        principal &= A
    if principal == 0:
        raise EmptyDual("the constant-one coevent has an empty dual")
    return principal


def co_dual(n: int, A: int) -> MultiplicativeCoevent:
    if A == 0:
        raise EmptyDual("the empty event has no multiplicative coevent")
    return MultiplicativeCoevent(n, A)


def _check_space(theory: HistoriesTheory, phi):
    if phi.n != theory.n:
        raise SpaceMismatch("coevent and theory have different sample spaces")


def is_preclusive(theory: HistoriesTheory, phi) -> bool:
    """No null event is valued true."""
    _check_space(theory, phi)
    if isinstance(phi, MultiplicativeCoevent):
        return not any(phi.dual & ~Z == 0 for Z in theory.null_events())
    return not any(theory.is_null(B) for B in phi.support)


def dominates(phi, psi) -> bool:
    """phi(A)=1 implies psi(A)=1 for every event A."""
    if phi.n != psi.n:
        raise SpaceMismatch("coevents over different sample spaces")
    if isinstance(phi, MultiplicativeCoevent) and isinstance(psi, MultiplicativeCoevent):
        return psi.dual & ~phi.dual == 0
    return _support(phi) <= _support(psi)


def is_classical_on(phi, partition: Partition) -> bool:
    """Exactly one block of the partition is valued true."""
    if phi.n != partition.n:
        raise SpaceMismatch("coevent and partition have different sample spaces")
    if isinstance(phi, MultiplicativeCoevent):
        return partition.block_containing(phi.dual) is not None
    return sum(b in phi.support for b in partition.blocks) == 1


def minimal_duals(duals: Iterable[int], mode: str = "primitive") -> list[int]:
    """Members not strictly beaten under the chosen minimality reading."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    duals = sorted(set(duals), key=event_sort_key)
    if mode == "primitive":
        return [A for A in duals if not any(B != A and B & ~A == 0 for B in duals)]
    return [A for A in duals if not any(B != A and A & ~B == 0 for B in duals)]


@dataclass(frozen=True)
class SchemeResult:
    name: str
    coevents: tuple[MultiplicativeCoevent, ...]
    mode: str | None = None
    reading: str | None = None
    b_d: tuple[Partition, ...] = ()
    classicality: dict = field(default_factory=dict)

    @property
    def duals(self) -> tuple[int, ...]:
        return tuple(c.dual for c in self.coevents)

    @property
    def empty(self) -> bool:
        return not self.coevents

    def __len__(self):
        return len(self.coevents)

    def __iter__(self):
        return iter(self.coevents)


def _poset(theory, poset):
    return build_poset(theory) if poset is None else poset


def _result(name, theory, duals, poset, mode=None, reading=None) -> SchemeResult:
    b_d = poset.tagged("D")
    coevents = tuple(MultiplicativeCoevent(theory.n, A) for A in sorted(duals, key=event_sort_key))
    table = {c.dual: tuple(is_classical_on(c, p) for p in b_d) for c in coevents}
    return SchemeResult(name, coevents, mode, reading, b_d, table)


def preclusive_duals(theory: HistoriesTheory) -> list[int]:
    nulls = theory.null_events()
    return [A for A in range(1, theory.full + 1) if not any(A & ~Z == 0 for Z in nulls)]


def multiplicative_scheme(theory: HistoriesTheory, mode: str = "primitive",
                          poset: GrainingPoset | None = None) -> SchemeResult:
    """M(H): minimal preclusive multiplicative coevents."""
    duals = minimal_duals(preclusive_duals(theory), mode)
    return _result("M", theory, duals, _poset(theory, poset), mode=mode)


def m_pc(theory: HistoriesTheory, poset: GrainingPoset | None = None) -> tuple[MultiplicativeCoevent, ...]:
    """Preclusive multiplicative coevents classical on every decoherent partition."""
    b_d = _poset(theory, poset).tagged("D")
    keep = [A for A in preclusive_duals(theory)
            if all(p.block_containing(A) is not None for p in b_d)]
    return tuple(MultiplicativeCoevent(theory.n, A) for A in sorted(keep, key=event_sort_key))


def cons_m(theory: HistoriesTheory, mode: str = "primitive",
           poset: GrainingPoset | None = None) -> SchemeResult:
    poset = _poset(theory, poset)
    duals = minimal_duals((c.dual for c in m_pc(theory, poset)), mode)
    return _result("Cons_M", theory, duals, poset, mode=mode)


def lambda_a(n: int, A: int) -> Partition:
    """``{A}`` together with the singletons outside ``A``."""
    full = (1 << n) - 1
    rest = full & ~A
    return Partition(n, (A,) + tuple(1 << i for i in range(n) if rest >> i & 1))


def _cons(theory, poset, reading, preclusive_only):
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}")
    duals = []
    if reading == "literal":
        # supp(A*) inside E_L forces L = lambda_a(A)
        for A in range(1, theory.full + 1):
            p = lambda_a(theory.n, A)
            if not is_decoherent(theory, p):
                continue
            if preclusive_only and HomValuation(p, A) not in cl(theory, p):
                continue
            duals.append(A)
    else:
        seen = set()
        for p in poset.tagged("D"):
            allowed = {v.block for v in cl(theory, p)} if preclusive_only else set(p.blocks)
            seen.update(allowed)
        duals = sorted(seen)
    return duals


def cons_d(theory: HistoriesTheory, reading: str = "literal",
           poset: GrainingPoset | None = None) -> SchemeResult:
    poset = _poset(theory, poset)
    return _result("Cons_D", theory, _cons(theory, poset, reading, False), poset, reading=reading)


def cons_c(theory: HistoriesTheory, reading: str = "literal",
           poset: GrainingPoset | None = None) -> SchemeResult:
    poset = _poset(theory, poset)
    return _result("Cons_C", theory, _cons(theory, poset, reading, True), poset, reading=reading)


SCHEMES = {
    "m": multiplicative_scheme,
    "cons-d": cons_d,
    "cons-c": cons_c,
    "cons-m": cons_m,
}
