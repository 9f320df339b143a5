"""Growth invariants of exponential polynomials and good-model connections at a pole."""

import sys

from .angles import AngleExpr
from .exppoly import (
    ExpPolynomial,
    ExpressionSyntaxError,
    format_exppoly,
    katz_slope,
    parse_exppoly,
    positive_proportionality,
    ramify,
    twist_add,
)
from .gaussian import QI, parse_qi
from .growth import (
    Arc,
    ArcSet,
    Direction,
    HypothesisError,
    Verdict,
    Witness,
    classify_direction,
    concentrated_region,
    distinguishing_witness,
    sector_verdict,
    stokes_directions,
    support_arcs,
    twisted_witness,
)
from .models import (
    FullyFaithfulResult,
    GoodModel,
    IsoDecision,
    OperatorSpec,
    RegularPart,
    SchemaError,
    fully_faithful_check,
    graded_stalk_equal,
    newton_polygon_katz,
    ray_partition,
    regular_hom_dim,
    regular_iso,
    tempered_hom_dim,
    tempered_iso_good_models,
    tempered_iso_twisted,
    underlying_local_system,
)
from .oracle import GrowthFit, OracleConfig, OracleReport, growth_fit, oracle_verdict, sample_region
from .puiseux import (
    PowerSeries,
    Polyline,
    TracerWarning,
    eta_residual,
    level_curve_branches,
    series_arith,
    sigma_solve,
)
from .regions import BallComplement, EtaImage, ParabolicU1, ParabolicU2, Polygon, RegionSpec, Sector, Sublevel

__version__ = "0.1.0"

__all__ = [name for name, obj in dict(globals()).items()
           if not name.startswith("_") and not isinstance(obj, type(sys))]
del sys
