"""Level-spacing statistics of steady states of boundary-driven spin chains."""

from .spinops import (
    ChainSpec,
    antiunitary_conjugator,
    build_hamiltonian,
    parity_operator,
    site_operator,
    staggered_field,
    total_up_count_operator,
)
from .lindblad import (
    BathSpec,
    ChainModel,
    SectorBasis,
    apply_liouvillian,
    build_jump_operators,
    build_superoperator_sector,
    check_weak_symmetry,
    full_superoperator,
    magnetization_block,
)
from .eigen import (
    DensityOperator,
    Spectrum,
    block_spectrum,
    dense_null_space_oracle,
    find_decay_modes,
    find_ness,
)
from .rmtstats import (
    ENSEMBLES,
    SpacingSample,
    UnfoldedSpectrum,
    classify,
    generate_synthetic,
    ks_statistic,
    number_variance,
    pool_samples,
    spacing_histogram,
    spacing_sample,
    surmise_cdf,
    surmise_pdf,
    unfold,
)
from .experiments import (
    ExperimentConfig,
    ResultBundle,
    emit_figure_data,
    list_presets,
    preset_configs,
    run_experiment,
)
from .exceptions import (
    ConfigError,
    ConvergenceError,
    DegeneracyError,
    EmptySpectrumError,
    NesstatError,
    PartialResultError,
    SampleSizeError,
)

__version__ = "0.1.0"
