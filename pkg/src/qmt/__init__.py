"""Quantum measure theory, coevents and consistent-histories valuations on finite sample spaces."""

from .coevents import (
    Coevent,
    MultiplicativeCoevent,
    SchemeResult,
    co_dual,
    cons_c,
    cons_d,
    cons_m,
    dominates,
    dual,
    is_classical_on,
    is_multiplicative,
    is_preclusive,
    m_pc,
    multiplicative_scheme,
)
from .errors import InputError, InternalError, QMTError
from .grainings import (
    GrainingPoset,
    Partition,
    PosetTag,
    build_poset,
    coarse_grain,
    designate_upper,
    enumerate_partitions,
    is_decoherent,
    is_preclusively_separable,
    refines,
    sub_poset,
    sublattice,
)
from .measure import (
    HistoriesTheory,
    from_amplitudes,
    kolmogorov_holds,
    kolmogorov_violation,
    mu,
    new_theory,
    null_events,
    quantum_sum_rule_check,
)
from .topos import (
    FinitePoset,
    HeytingAlgebra,
    UpperSet,
    VaryingSet,
    accessible_subobject,
    characteristic,
    constant_varying_set,
    gamma_iso_check,
    generate_algebra,
    global_element_event,
    global_element_valuation,
    h_map,
    heyting_ops,
    sieves_at,
    valuation_subobject,
    valuation_varying_set,
)
from .valuations import (
    HomValuation,
    LogicalFramework,
    ValuationSet,
    cl,
    eval_hom,
    homs,
    logical_framework,
    pooled,
    restrict_hom,
    support_relation_check,
)

__version__ = "0.1.0"
