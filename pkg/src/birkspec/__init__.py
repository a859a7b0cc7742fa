"""Birkhoff spectra of locally constant potentials on the binary full shift."""

from .shift_core import (
    NumericalError,
    PccFunction,
    PeriodicPoint,
    PreconditionError,
    ProceduralFunction,
    evaluate,
    finite_birkhoff_average,
    indicator,
    integrate,
    periodic_birkhoff_average,
    refine,
)
from .debruijn import (
    build_graph,
    endpoints,
    max_mean_cycle,
    subgraph_entropy,
    tight_subgraph,
)
from .thermo import (
    endpoint_dimension,
    gibbs_measure,
    is_spectrum_continuous,
    norm_continuity_check,
    one_sided_slopes,
    pressure,
    spectrum_at,
    spectrum_curve,
)
from .dimension import BlockAlphabet, eggleston_dimension, moran_dimension

__version__ = "0.1.0"
