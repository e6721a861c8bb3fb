"""Exact reduced dynamics of a qubit in a boson bath with periodic form
factors: survival amplitudes by four independent backends, the induced
amplitude-damping channel, and the semigroup-defect witness that certifies
how long the evolution stays indistinguishable from a Markovian one.
"""

from .amplitude import (
    AmplitudeTrace,
    Backend,
    LaplaceDiagnostics,
    TimeGrid,
    amplitude_laplace,
    amplitude_series,
    amplitude_volterra,
)
from .channel import (
    DensityMatrix,
    LINDBLAD_DISSIPATOR,
    QUBIT_COMMUTATOR,
    RateFunctions,
    channel_superoperator,
    choi_matrix,
    evolve,
    extract_rates,
    gkls_generator,
    is_trace_preserving,
    master_residual,
)
from .combinatorics import (
    DelayPolynomialTable,
    composition_weight,
    compositions,
    delay_polynomial,
)
from .config import (
    BackendOptions,
    ExperimentConfig,
    OutputOptions,
    load_config,
    parse_config,
    serialize_config,
)
from .coupling import (
    CouplingKind,
    CouplingSpec,
    ModelParams,
    ValidatedCoupling,
    custom_fourier,
    exp_comb,
    flat,
    reconstruct_density,
    self_energy,
    sinusoidal,
    spectral_density,
    validate_coupling,
)
from .csvio import OutputRow, rows_from_trace, write_csv
from .markovianity import (
    BoundStateReport,
    DefectReport,
    bound_state_check,
    hidden_horizon,
    semigroup_defect,
    semigroup_defect_report,
)
from .modes import (
    DiscreteModeSystem,
    ModesResult,
    amplitude_modes,
    build_discrete_modes,
)
from . import errors

__version__ = "0.1.0"
