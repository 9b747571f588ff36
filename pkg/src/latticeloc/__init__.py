"""Time-frequency localization operators on the integer lattice Z^n."""
from .lattice import (
    BandIndicator,
    GridSamples,
    LatticeBox,
    Signal,
    TorusGrid,
    band_moment,
    default_grid,
    dft_lattice_to_torus,
    dft_torus_to_lattice,
    tf_atom,
    torus_function_from_dict,
)
from .localization import (
    BandRegionSymbol,
    FreqOnlySymbol,
    GridSymbol,
    OperatorMatrix,
    SeparableSymbol,
    TimeOnlySymbol,
    loc_apply,
    loc_bilinear,
    loc_kernel,
    symbol_from_dict,
)
from .phase_space import (
    NormReport,
    lp_norm_field,
    modulation_norm_field,
    modulation_norm_lattice,
    ps_convolve,
)
from .spectral import (
    BoundReport,
    SingularSpectrum,
    berezin_symbol,
    bounds_report,
    schatten_norm,
    singular_values,
    trace,
)
from .stft import PhaseSpaceField, stft, stft_adjoint, stft_convolution
from .structured import (
    FrequencyKernel,
    LpsComparison,
    apply_multiplier,
    ball_window,
    band_composition_residual,
    band_project,
    lps_compare,
    lps_weight_profile,
    multiplier_symbol,
    paracommutator_form,
    paracommutator_kernel,
    paraproduct,
    time_truncate,
)
from .verify import run_verify_suite

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
