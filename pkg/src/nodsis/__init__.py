"""Coupled opinion and SIS infection dynamics: simulation, equilibria and bifurcations of the NOD-SIS model."""

__version__ = "0.1.0"

from .bifurcation import BifurcationDiagram, Branch, SweepConfig, export_diagram, sweep
from .equilibria import (
    Equilibrium,
    EquilibriumClass,
    Regime,
    RegimeReport,
    Stability,
    beta_star,
    classify_stability,
    find_beta0,
    find_equilibria,
    infection_ordering,
    iee_infection,
    regime,
)
from .integrator import (
    BasinSample,
    IntegrationConfig,
    Trajectory,
    basin_experiment,
    check_sign_invariance,
    integrate,
    integrate_many,
)
from .model import (
    Derivative,
    Jacobian2x2,
    ModelParams,
    State,
    analytic_jacobian,
    f1,
    f2,
    nodsis_vector_field,
    sis_vector_field,
    urgency,
)
from .network import (
    ConsensusReport,
    NetworkModel,
    NetworkState,
    consensus_report,
    load_edge_list,
    network_integrate,
    network_sis_baseline,
    network_vector_field,
)
