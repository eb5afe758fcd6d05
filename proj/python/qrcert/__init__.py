"""Device-independent min-entropy bounds from Bell-operator constraints."""

from ._qrcert import (  # noqa: F401
    BellOperator,
    QrcertError,
    Scenario,
    canonical_form,
    catalog,
    catalog_names,
    certificate_names,
    classical_bound,
    entropy,
    evaluate_operator,
    generate_table,
    isomorphic,
    quantum_max,
    search,
    singlet_correlators,
    sweep,
    t3max_given_C,
    table_names,
    tune,
)

__version__ = "0.1.0"
