"""Pseudo-spectral Navier-Stokes on the periodic box with an exact helical calculus."""
from .errors import *  # noqa: F401,F403
from .helical import (
    HelicalBasis,
    HelicalDecomposition,
    SpectralInterval,
    abs_curl_pow,
    band_project,
    decompose,
    helical_basis,
    mirror,
    negative_part,
    positive_part,
    recompose,
    spectral_moment,
)
from .io import (
    RunConfig,
    load_run_config,
    load_snapshot,
    parse_run_config,
    read_diagnostics_csv,
    read_snapshot,
    write_diagnostics_csv,
    write_snapshot,
)
from .monitor import (
    BandReport,
    ConstantProbeReport,
    DiagnosticsRecord,
    DiagnosticsRecorder,
    EnsembleSpec,
    Schedule,
    attach_envelope,
    band_inequality_suite,
    cancellation_residual,
    criterion_integrands,
    diagnostics_record,
    energy_identity_residual,
    energy_inequality_residuals,
    gronwall_envelope,
    holder_chain_check,
    monitor_fields,
    probe_constants,
)
from .solver import (
    SolverConfig,
    SolverState,
    Trajectory,
    abc_flow,
    random_divfree,
    random_helical,
    simulate,
    step,
    taylor_green,
)
from .spectral import (
    GridSpec,
    SpectralScalarField,
    SpectralVectorField,
    curl,
    dealias_truncate,
    grad_norm_sq,
    inner_product,
    l2_norm,
    l3_norm,
    leray_project,
    neg_laplacian_pow,
    pointwise_cross,
)

__version__ = "0.1.0"
