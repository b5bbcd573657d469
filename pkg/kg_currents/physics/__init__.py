from kg_currents.physics.currents import (
    FourField,
    continuity_residual,
    covariance_experiment,
    current_J,
    current_J_script,
    decompose_J_grid,
    density_views,
    divergence_field,
    nonrel_limit_scan,
    probability_identity,
)
from kg_currents.physics.em_background import (
    DenseOperator,
    EMConfig,
    ScalarPotential,
    build_Dq,
    dq_power_apply,
    evolve_magnetic,
    gauge_factor,
    ip_a_magnetic,
)
from kg_currents.physics.gauge_symmetry import (
    GaugeElement,
    IrrationalParam,
    RationalParam,
    classify_group,
    gauge_apply,
    generator_check,
    group_matrix,
)
from kg_currents.physics.hilbert_space import (
    TwoComponentVector,
    WaveFunction,
    charge_Q,
    ip_a,
    ip_kg,
    ip_plain,
    map_U_a,
    map_U_inverse,
    probability_in_region,
    rho_a,
    total_probability,
    transport,
    wavefunction,
)
from kg_currents.physics.localization import (
    LocalizedStateSpec,
    apply_momentum,
    apply_position,
    localized_basis_grid,
    nw_closed_form,
    nw_quadrature,
)
from kg_currents.physics.mode_engine import (
    FourVector,
    LorentzBoost,
    ModeField,
    ModeSpec,
    SpacetimePoint,
    boost,
    charge_conjugate,
    div_J,
    div_J_script,
    energy_project,
    eval_field,
    eval_J,
    eval_J_script,
)
from kg_currents.physics.params import InnerParams
from kg_currents.physics.spectral_grid import GridState, Lattice, apply_D_power, evolve, kg_residual, sample
from kg_currents.physics.special import bessel_K

__all__ = [
    "DenseOperator",
    "EMConfig",
    "FourField",
    "FourVector",
    "GaugeElement",
    "GridState",
    "InnerParams",
    "IrrationalParam",
    "Lattice",
    "LocalizedStateSpec",
    "LorentzBoost",
    "ModeField",
    "ModeSpec",
    "RationalParam",
    "ScalarPotential",
    "SpacetimePoint",
    "TwoComponentVector",
    "WaveFunction",
    "apply_D_power",
    "apply_momentum",
    "apply_position",
    "bessel_K",
    "boost",
    "build_Dq",
    "charge_Q",
    "charge_conjugate",
    "classify_group",
    "continuity_residual",
    "covariance_experiment",
    "current_J",
    "current_J_script",
    "decompose_J_grid",
    "density_views",
    "div_J",
    "div_J_script",
    "divergence_field",
    "dq_power_apply",
    "energy_project",
    "eval_J",
    "eval_J_script",
    "eval_field",
    "evolve",
    "evolve_magnetic",
    "gauge_apply",
    "gauge_factor",
    "generator_check",
    "group_matrix",
    "ip_a",
    "ip_a_magnetic",
    "ip_kg",
    "ip_plain",
    "kg_residual",
    "localized_basis_grid",
    "map_U_a",
    "map_U_inverse",
    "nonrel_limit_scan",
    "nw_closed_form",
    "nw_quadrature",
    "probability_identity",
    "probability_in_region",
    "rho_a",
    "sample",
    "total_probability",
    "transport",
    "wavefunction",
]
