"""Python bindings for the coopgen equilibrium engine."""

from ._core import (
    CompetitionMatrix,
    ConfigError,
    DomainError,
    Error,
    GameInstance,
    InstanceError,
    MechanismParams,
    OrganizationProfile,
    PreconditionError,
    SamplingSpec,
    ScalingLaw,
    SolverSettings,
    brute_force_oracle,
    check_ir,
    find_preset,
    fit_power_law,
    global_error,
    instance_from_json,
    local_error,
    potential,
    potential_gradient,
    preset_names,
    run_round,
    sample_instance,
    settle,
    social_welfare,
    solve,
    utilities,
    validate_instance,
    weight_z,
)

__all__ = [name for name in dir() if not name.startswith("_")]
