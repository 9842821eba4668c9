"""Poisson processes time-changed by compound Poisson-Gamma subordinators.

Closed-form pmfs, hitting and first-passage laws, iterated Bessel transforms,
and the Monte Carlo / ODE machinery that cross-checks them.
"""

from .iterate import (
    ExpMixture,
    IterChain,
    Stage,
    UnsupportedRegime,
    bessel_transform_levy,
    chain_characterization,
    collapse_chain,
    compose_bernstein,
    iter_bernstein,
    iter_levy_density,
    ode_coefficients,
)
from .models import (
    FIG1,
    FIG2,
    FIG3,
    FIG4,
    Family,
    LevyCharacterization,
    ModelParams,
    characterize,
    density_ena,
    density_gna,
    dist_gn_with_atom,
    moments,
)
from .passage import (
    JumpDistribution,
    fpt_cdf,
    fpt_density,
    hit_density_n1en,
    hit_density_n1gn,
    hit_prob_alpha2,
    hit_prob_n1en,
    hit_prob_n1gn,
    hit_prob_renewal,
    jump_distribution,
)
from .pmf import PmfTable, TailMassError, build_table, pgf, pmf, pmf_via_pgf
from .specfun import SeriesControl, TruncationError

__version__ = "0.1.0"
