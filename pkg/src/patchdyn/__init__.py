"""Two-patch population dynamics with an Allee effect and dispersal.

Library layout:

- :mod:`patchdyn.params` / :mod:`patchdyn.model` — parameter blocks,
  right-hand sides, Jacobians, nullcline maps, Dulac divergence.
- :mod:`patchdyn.equilibria` — thresholds, closed-form equilibria,
  stability classification, regime reports for both dispersal models.
- :mod:`patchdyn.bifurcation` — saddle-node certificates, Allee-constant
  sweeps, abundance sensitivity.
- :mod:`patchdyn.ode_sim` — adaptive trajectory integration, phase
  portraits, basin maps.
- :mod:`patchdyn.pde` — 1-D reaction-diffusion solver with patchwise
  coefficients and monitoring functionals.
- :mod:`patchdyn.cli` — the ``patchdyn`` command.
"""

__version__ = "0.1.0"

from .bifurcation import (
    BifurcationDiagram,
    SensitivityReport,
    SotomayorReport,
    abundance_sensitivity,
    sotomayor_check,
    sweep_allee,
)
from .equilibria import (
    DerivedQuantities,
    Equilibrium,
    EquilibriumKind,
    GlobalVerdict,
    LinearReport,
    RegimeReport,
    Stability,
    boundary_equilibria,
    classify_equilibrium,
    derived_thresholds,
    linear_equilibria,
    positive_equilibria,
    regime_report,
)
from .errors import (
    DomainError,
    InternalConsistencyError,
    NumericError,
    PatchdynError,
    PreconditionError,
    ValidationError,
)
from .model import (
    Matrix2,
    dulac_divergence,
    h1,
    h2,
    jacobian_linear,
    jacobian_nonlinear,
    rhs_linear,
    rhs_nonlinear,
)
from .ode_sim import (
    BasinMap,
    GridSpec,
    PortraitData,
    TerminalEvent,
    Trajectory,
    basin_map,
    integrate_ode,
    known_equilibria,
    phase_portrait,
)
from .params import OdeParams, OriginalParams, nondimensionalize
from .pde import (
    CoefficientProfile,
    DiscretizedProblem,
    PdeConfig,
    PdeFunctionals,
    PdeSeries,
    build_pde_problem,
    initial_data,
    integrate_pde,
    pde_functionals,
)
from .presets import PRESETS, Preset, get_preset

__all__ = [name for name in dir() if not name.startswith("_")]
