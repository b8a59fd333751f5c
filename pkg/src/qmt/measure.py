"""Finite histories theories built from a decoherence matrix.

Events are plain ``int`` bitmasks over the history indices: bit ``i`` set
means history ``i`` is in the event.  The full algebra is ``range(2**n)``.
"""

from __future__ import annotations

import os
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    CapExceeded,
    DimensionMismatch,
    ForeignEvent,
    NegativeMeasure,
    NonHermitian,
    NotASublattice,
    NotNormalized,
    NotUnitTotal,
    RepresentationError,
)

DEFAULT_CAP = 10
DEFAULT_EPS = 1e-9
MODES = ("exact", "float")


def max_histories() -> int:
    """History cap, overridable through ``QMT_MAX_HISTORIES``."""
    value = os.environ.get("QMT_MAX_HISTORIES")
    if value is None:
        return DEFAULT_CAP
    try:
        cap = int(value)
    except ValueError:
        raise CapExceeded(f"QMT_MAX_HISTORIES={value!r} is not an integer") from None
    return max(cap, 1)


# -- events -----------------------------------------------------------------

def members(A: int) -> list[int]:
    """Indices contained in event ``A``, ascending."""
    out = []
    i = 0
    while A:
        if A & 1:
            out.append(i)
        A >>= 1
        i += 1
    return out


def event(indices: Iterable[int]) -> int:
    A = 0
    for i in indices:
        A |= 1 << i
    return A


def submasks(A: int) -> Iterator[int]:
    """All subsets of ``A`` (including ``0`` and ``A``), descending."""
    S = A
    while True:
        yield S
        if S == 0:
            return
        S = (S - 1) & A


def event_sort_key(A: int) -> tuple:
    # size first, then lexicographic on member indices
    return (bin(A).count("1"), members(A))


def format_event(A: int, labels: Sequence[str]) -> str:
    return "{" + ",".join(labels[i] for i in members(A)) + "}"


# -- scalars ----------------------------------------------------------------

def to_scalar(x, mode: str):
    """Coerce ``x`` to the arithmetic of ``mode``.

    Exact mode accepts ints, Fractions and rational strings ("p/q", "0.25");
    floats are refused because they would silently round.
    """
    if mode == "exact":
        if isinstance(x, bool):
            raise RepresentationError(f"boolean {x!r} is not a scalar")
        if isinstance(x, (int, Rational)):
            return Fraction(x)
        if isinstance(x, str):
            try:
                return Fraction(x.strip())
            except (ValueError, ZeroDivisionError):
                raise RepresentationError(f"{x!r} is not a rational number") from None
        raise RepresentationError(
            f"{x!r} cannot be represented exactly; use a rational string or float mode"
        )
    if mode == "float":
        if isinstance(x, str):
            try:
                return float(Fraction(x.strip()))
            except (ValueError, ZeroDivisionError):
                raise RepresentationError(f"{x!r} is not a number") from None
        return float(x)
    raise ValueError(f"unknown arithmetic mode {mode!r}")


# -- theory -----------------------------------------------------------------

class HistoriesTheory:
    """Sample space, decoherence matrix and the cached quantum measure.

    ``re[a][b] + i*im[a][b]`` is D({a},{b}); D extends bilinearly and
    mu(A) = D(A, A).  Construct through :func:`new_theory` or
    :func:`from_amplitudes`, which validate the axioms.
    """

    __slots__ = ("labels", "n", "full", "re", "im", "mode", "eps", "_mu", "_null")

    def __init__(self, labels, re, im, mode, eps, mu_table):
        self.labels = tuple(labels)
        self.n = len(self.labels)
        self.full = (1 << self.n) - 1
        self.re = re
        self.im = im
        self.mode = mode
        self.eps = eps
        self._mu = mu_table
        self._null = None

    def __repr__(self):
        return f"HistoriesTheory(labels={list(self.labels)}, mode={self.mode!r})"

    # zero tests live here so that float mode is the only place tolerance appears
    def is_zero(self, x) -> bool:
        if self.mode == "exact":
            return x == 0
        return abs(x) <= self.eps

    def close(self, x, y) -> bool:
        return self.is_zero(x - y)

    def check_event(self, A: int) -> int:
        if not isinstance(A, int) or A < 0 or A > self.full:
            raise ForeignEvent(f"event {A!r} is not over {self.n} histories", event=A)
        return A

    def mu(self, A: int):
        return self._mu[self.check_event(A)]

    @property
    def mu_table(self) -> tuple:
        return self._mu

    def is_null(self, A: int) -> bool:
        return self.is_zero(self._mu[A])

    def decoherence(self, A: int, B: int) -> tuple:
        """D(A, B) as a ``(re, im)`` pair."""
        self.check_event(A)
        self.check_event(B)
        zero = self.re[0][0] * 0
        r, i = zero, zero
        for a in members(A):
            for b in members(B):
                r += self.re[a][b]
                i += self.im[a][b]
        return r, i

    def event(self, *labels: str) -> int:
        """Event from history labels, e.g. ``theory.event("a", "c")``."""
        try:
            return event(self.labels.index(x) for x in labels)
        except ValueError:
            raise ForeignEvent(f"unknown history label in {labels!r}") from None

    def fmt(self, A: int) -> str:
        return format_event(A, self.labels)

    def null_events(self) -> tuple[int, ...]:
        if self._null is None:
            nulls = [A for A in range(self.full + 1) if self.is_null(A)]
            self._null = tuple(sorted(nulls, key=event_sort_key))
        return self._null


def _check_labels(labels, cap):
    labels = [str(x) for x in labels]
    if not labels:
        raise CapExceeded("a sample space needs at least one history")
    if len(labels) > cap:
        raise CapExceeded(f"{len(labels)} histories exceeds the cap of {cap}", n=len(labels), cap=cap)
    if any(not x for x in labels):
        raise DimensionMismatch("history labels must be nonempty")
    if len(set(labels)) != len(labels):
        raise DimensionMismatch("history labels must be distinct")
    return labels


def _measure_table(re, n):
    """mu over all 2**n events, built one history at a time."""
    mu = [re[0][0] * 0] * (1 << n)
    for A in range(1, 1 << n):
        k = A.bit_length() - 1
        rest = A ^ (1 << k)
        cross = sum((re[k][b] for b in members(rest)), re[0][0] * 0)
        mu[A] = mu[rest] + re[k][k] + 2 * cross
    return tuple(mu)


def new_theory(labels, re, im=None, mode: str = "exact", eps: float = DEFAULT_EPS,
               cap: int | None = None) -> HistoriesTheory:
    """Validate a decoherence matrix and return the histories theory.

    ``re``/``im`` are n x n nested sequences (``im`` defaults to zero).
    Raises DimensionMismatch, NonHermitian, NotUnitTotal or NegativeMeasure.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    labels = _check_labels(labels, max_histories() if cap is None else cap)
    n = len(labels)
    if im is None:
        im = [[0] * n for _ in range(n)]
    for name, m in (("re", re), ("im", im)):
        if len(m) != n or any(len(row) != n for row in m):
            raise DimensionMismatch(f"decoherence.{name} must be {n}x{n}", n=n)
    re = tuple(tuple(to_scalar(x, mode) for x in row) for row in re)
    im = tuple(tuple(to_scalar(x, mode) for x in row) for row in im)
    zero_test = (lambda x: x == 0) if mode == "exact" else (lambda x: abs(x) <= eps)

    for a in range(n):
        for b in range(a, n):
            if not (zero_test(re[a][b] - re[b][a]) and zero_test(im[a][b] + im[b][a])):
                raise NonHermitian(
                    f"D({labels[a]},{labels[b]}) is not the conjugate of D({labels[b]},{labels[a]})",
                    pair=[labels[a], labels[b]],
                )
    mu = _measure_table(re, n)
    if not zero_test(mu[-1] - 1):
        raise NotUnitTotal(f"D(Omega,Omega) = {mu[-1]}, expected 1", total=str(mu[-1]))
    for A, value in enumerate(mu):
        if value < 0 and not zero_test(value):
            raise NegativeMeasure(
                f"mu({format_event(A, labels)}) = {value} < 0",
                event=format_event(A, labels), value=str(value),
            )
    return HistoriesTheory(labels, re, im, mode, eps, mu)


def from_amplitudes(labels, v_re, v_im=None, mode: str = "exact", eps: float = DEFAULT_EPS,
                    cap: int | None = None) -> HistoriesTheory:
    """Rank-one theory with D({a},{b}) = v_a * conj(v_b).

    Then mu(A) = |sum of v over A|**2, so the amplitudes must sum to a unit
    complex number.
    """
    n = len(v_re)
    if v_im is None:
        v_im = [0] * n
    if len(v_im) != n or len(labels) != n:
        raise DimensionMismatch("amplitude vectors and labels differ in length")
    vr = [to_scalar(x, mode) for x in v_re]
    vi = [to_scalar(x, mode) for x in v_im]
    total = sum(vr) ** 2 + sum(vi) ** 2
    ok = total == 1 if mode == "exact" else abs(total - 1) <= eps
    if not ok:
        raise NotNormalized(f"|sum of amplitudes|^2 = {total}, expected 1", total=str(total))
    re = [[vr[a] * vr[b] + vi[a] * vi[b] for b in range(n)] for a in range(n)]
    im = [[vi[a] * vr[b] - vr[a] * vi[b] for b in range(n)] for a in range(n)]
    return new_theory(labels, re, im, mode=mode, eps=eps, cap=cap)


def mu(theory: HistoriesTheory, A: int):
    return theory.mu(A)


def null_events(theory: HistoriesTheory) -> tuple[int, ...]:
    """All measure-zero events, canonically sorted; always starts with the empty event."""
    return theory.null_events()


def is_boolean_sublattice(algebra: Iterable[int], full: int) -> bool:
    events = set(algebra)
    if 0 not in events or full not in events:
        return False
    for A in events:
        if full ^ A not in events:
            return False
        for B in events:
            if A | B not in events:
                return False
    return True


def kolmogorov_violation(theory: HistoriesTheory, algebra: Iterable[int] | None = None):
    """First disjoint pair ``(A, B)`` breaking additivity, or ``None``."""
    if algebra is None:
        events = range(theory.full + 1)
    else:
        events = sorted(set(algebra))
        for A in events:
            theory.check_event(A)
        if not is_boolean_sublattice(events, theory.full):
            raise NotASublattice("algebra is not a Boolean sublattice of the event algebra")
    m = theory.mu_table
    for A in events:
        for B in events:
            if A < B and not A & B and A and B:
                if not theory.close(m[A | B], m[A] + m[B]):
                    return A, B
    return None


def kolmogorov_holds(theory: HistoriesTheory, algebra: Iterable[int] | None = None) -> bool:
    return kolmogorov_violation(theory, algebra) is None


def quantum_sum_rule_check(theory, n: int | None = None) -> list[tuple[int, int, int]]:
    """Unordered pairwise-disjoint nonempty triples violating the quantum sum rule.

    ``theory`` is a HistoriesTheory or a raw measure table indexed by event
    mask (then ``n`` is inferred from its length and equality is exact).
    """
    if isinstance(theory, HistoriesTheory):
        m, full, close = theory.mu_table, theory.full, theory.close
    else:
        m = list(theory)
        full = len(m) - 1
        if n is not None and full != (1 << n) - 1:
            raise DimensionMismatch("measure table length does not match n")
        close = lambda x, y: x == y  # noqa: E731
    bad = []
    for A in range(1, full + 1):
        restA = full & ~A
        for B in submasks(restA):
            if B <= A:
                continue
            restB = restA & ~B
            for C in submasks(restB):
                if C <= B:
                    continue
                lhs = m[A | B | C]
                rhs = m[A | B] + m[B | C] + m[A | C] - m[A] - m[B] - m[C]
                if not close(lhs, rhs):
                    bad.append((A, B, C))
    return bad


def psd_diagnostic(theory: HistoriesTheory, tol: float = 1e-9) -> dict:
    """Whether the decoherence matrix is positive semidefinite (diagnostic only)."""
    mat = np.array([[complex(float(theory.re[a][b]), float(theory.im[a][b]))
                     for b in range(theory.n)] for a in range(theory.n)])
    eig = np.linalg.eigvalsh(mat)
    return {"psd": bool(eig.min() >= -tol), "min_eigenvalue": float(eig.min())}
