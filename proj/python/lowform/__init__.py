"""Polynomials that depend on a few linear forms: detection, reduction, approximation."""

from ._lowform import (
    ConvergenceError,
    CubatureRule,
    CutLoopResult,
    DetectionReport,
    DimensionError,
    Error,
    InfeasibleError,
    LiftedPolynomial,
    Polynomial,
    QSolution,
    SolveResult,
    SpectrumSplit,
    ball_moment,
    build_cubature,
    conditional_expectation_cubature,
    conditional_expectation_exact,
    cut_loop,
    detect_exact,
    detect_randomized,
    expectation_ball,
    extract_sparse_form,
    generate_instance,
    hhat_eval,
    lift_minimizer,
    minimize_ball,
    minimize_polytope,
    minimize_sphere,
    reduce_box,
    reduce_simplex,
    reduce_sphere,
    solve_Q,
    split_spectrum,
)

__all__ = [name for name in dir() if not name.startswith("_")]
