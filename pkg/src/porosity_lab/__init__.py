"""Weak porosity, hole functions and A1 distance weights on finite quasi-metric spaces."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .generators import (  # noqa: E402
    GeneratorSpec,
    build_space,
    gen_cantor,
    gen_grid,
    gen_lacunary,
    load_augmented_space,
    snowflake_space,
    write_space,
)
from .holes import hole_doubling_constant, hole_profile, hole_radius, hole_sweep, lemma33_constant  # noqa: E402
from .msdist import MSParams, ms_distance, ms_membership  # noqa: E402
from .muckenhoupt import (  # noqa: E402
    a1_constant,
    alpha_star,
    decay_profile,
    distance_weight,
    neighborhood_measure,
    resolution_sweep,
    theoretical_constants,
)
from .porosity import (  # noqa: E402
    certify_porosity,
    check_certificate,
    exact_packing_oracle,
    free_ball_packing,
    porosity_from_a1,
)
from .qspace import (  # noqa: E402
    AugmentedSpace,
    CanonicalBall,
    canonical_balls,
    doubling_constant,
    equivalence_constants,
    validate_quasi_metric,
)
from .whitney import verify_cover, whitney_cover  # noqa: E402
