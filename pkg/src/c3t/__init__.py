"""Constant curvature curve tube (C3T) analog error-correcting codes.

One continuous source symbol is mapped to an n-dimensional channel vector
along a constant curvature curve whose tube packing inside the unit sphere
is optimized for noise insulation.  The package covers the full pipeline:
curve geometry and Frenet frames, circumradius/tube-packing metrics, SPSA
parameter optimization, AWGN channel simulation with several decoders
(grid-search posterior, torus projection, angles-only, trained perceptron),
finite-blocklength digital baselines, and a reproduction harness for the
published parameter and block-length tables.
"""

from .bounds import (
    DigitalComparison,
    gaussian_q_inverse,
    opta_sdr_bound,
    polyanskiy_block_length,
    quantizer_rate,
    required_source_samples,
)
from .codec import (
    ChannelSpec,
    FeatureMode,
    FeatureVector,
    angles_features,
    angles_likelihood_approx,
    angles_log_likelihood,
    angles_map_decode,
    awgn_channel,
    encode,
    map_decode,
    repetition_code,
    stretch,
    torus_projection,
    unstretch,
)
from .curves import (
    CurvatureVector,
    FrenetFrame,
    curve_derivative,
    evaluate_curve,
    frenet_frame,
    generalized_curvatures,
    path_length,
)
from .errors import (
    DegenerateCurveError,
    GeometricDegeneracyError,
    ProfileError,
    TrainingError,
)
from .harness import (
    ExperimentConfig,
    SweepRecord,
    export_tube_geometry,
    reproduce_tables,
    run_sweep,
)
from .mlp import (
    MlpArchitecture,
    TrainingConfig,
    default_architecture,
    generate_training_set,
    mlp_forward,
    mlp_train,
)
from .profiles import CodeProfile, StretchMode, default_frequencies, unit_radii
from .spsa import (
    OptimizationTrace,
    SpsaConfig,
    optimize_radii,
    optimize_radii_multistart,
    spsa_gradient_estimate,
)
from .tube import (
    CircumradiusProfile,
    TubeMetrics,
    circumradius_profile,
    circumradius_sq_delta,
    circumradius_tangent_point,
    global_circumradius,
    packing_density,
    packing_objective,
    sphere_volume_coeff,
    tube_metrics,
)

__version__ = "0.1.0"
