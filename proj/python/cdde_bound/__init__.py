"""Certified componentwise bounds for positive coupled differential-difference systems."""

from ._core import (
    BoundCertificate,
    CddeError,
    Problem,
    SimulationScenario,
    SystemSpec,
    Trajectory,
    alpha_max,
    check_joint_condition,
    compute_certificate,
    demo_scenario,
    demo_system,
    extreme_scenario,
    finite_time,
    gamma_component,
    is_metzler_hurwitz,
    is_schur_nonneg,
    load_problem,
    parse_problem,
    simulate,
    staircase,
    time_to_threshold,
    ultimate_bound,
    validate_structure,
    verify_domination,
)

__all__ = [name for name in dir() if not name.startswith("_")]
