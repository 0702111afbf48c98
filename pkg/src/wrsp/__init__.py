"""Exact computational engine and verification harness for a tower of
finite 2-groups: packed normal-form arithmetic, subgroup algebra over an
induced-generating-sequence chain, the standard filtration series, and
exact logarithmic-density data."""

from .engine import (
    Element,
    GroupContext,
    NamedCommutator,
    WreathElement,
    commutator,
    conjugate,
    get_context,
    inverse,
    multiply,
    parse_element,
    power,
    project_to_wreath,
    resolve,
)
from .subgroup import (
    LayerShape,
    Subgroup,
    UnsupportedExactIntersection,
    agemo_mod_derived,
    base_and_centre_subgroup,
    centre_block_subgroup,
    close,
    commutator_subgroup,
    commutator_with_group,
    full_group,
    intersect,
    join,
    layer_shape,
    membership,
    normal_closure,
    pair_block_subgroup,
    trivial_subgroup,
)
from .series import (
    GammaScaffold,
    SandwichOnly,
    SandwichReport,
    SeriesKind,
    SeriesTable,
    commutator_identity_checks,
    exact_power_subgroup,
    gamma_n_subgroups,
    lcs_generator_check,
    power_series,
    projection_kernel,
    projection_map,
    series,
    stated_gamma_generators,
    expected_gamma_layer,
)
from .spectra import (
    DensityPoint,
    DensitySequence,
    InvariantSubspace,
    complement_density,
    density_sequence,
    invariant_subspace,
    spectrum_sweep,
)
from .claims import CLAIMS, VerificationResult, run_claims, select_claims

__version__ = "0.1.0"
