"""Tolerances and numerical defaults shared by every solver module."""

from dataclasses import dataclass, replace
from typing import Optional

__all__ = ("DEFAULT_SETTINGS", "Settings", "resolve_settings")


@dataclass(frozen=True)
class Settings:
    """Immutable record holding every tolerance and default used by the
    solvers. Derive modified copies with `replace()`.
    """

    ####################################################################
    # Input validation

    symmetry_tolerance: float = 1e-12
    """Relative asymmetry (with respect to the max-norm) above which a matrix
    is rejected as non-symmetric."""

    unit_norm_tolerance: float = 1e-12
    """Deviation of ``|z|`` from 1 that is tolerated without renormalizing."""

    normalization_warning_threshold: float = 1e-9
    """Deviation of ``|z|`` from 1 above which problem files emit a warning
    when normalizing the coupling vector."""

    max_dimension: int = 64
    """Largest matrix dimension accepted by the characteristic polynomial."""

    ####################################################################
    # Dense kernel

    jacobi_tolerance: float = 1e-13
    """Off-diagonal Frobenius norm, relative to the Frobenius norm of the
    input, at which the Jacobi iteration stops."""

    jacobi_max_sweeps: int = 100

    root_step_tolerance: float = 1e-12
    """Relative step size at which the Durand-Kerner iteration stops."""

    root_max_iterations: int = 500

    root_merge_radius: float = 1e-6
    """Roots closer than this are merged into one multiplicity cluster."""

    pivot_tolerance: float = 1e-300
    """Pivots smaller than this in magnitude make the determinant zero."""

    ####################################################################
    # Spectral classification

    cluster_factor: float = 1e-8
    """Eigenvalues closer than ``cluster_factor * (1 + diameter)`` belong to
    the same cluster."""

    zero_weight: float = 1e-10
    """Total coupling weight below which an eigenspace is orthogonal to z."""

    degeneracy_band: float = 1e3
    """Classifications closer than this factor to a threshold are reported
    as near-degenerate."""

    ####################################################################
    # Resolvent and secular equation

    pole_factor: float = 1e-9
    """Radius of the pole exclusion zone, relative to ``1 + diameter``."""

    resolvent_zero: float = 1e-12
    """|R_A(alpha)| below which no finite beta-root exists."""

    bisection_tolerance: float = 1e-12
    """Relative bracket width at which the secular bisection stops."""

    bisection_max_iterations: int = 200

    ####################################################################
    # Curve tracing

    blowup_factor: float = 1e6
    """|beta| above ``blowup_factor * (1 + diameter)`` counts as a blow-up."""

    grid_samples: int = 2000
    refinement_radius: float = 1e-2
    refinement_per_decade: int = 10

    on_curve_tolerance: float = 1e-8
    """Characteristic residual accepted for points passed in by callers."""

    limit_margin: float = 0.05
    """Margin, relative to ``1 + diameter``, removed around the limiting
    lines in limit sweeps."""

    ####################################################################
    # Non-self-adjoint problem

    real_snap: float = 1e-8
    """|Im lambda| below which an eigenvalue is treated as real."""

    newton_polish_steps: int = 8

    collision_tolerance: float = 1e-8
    """Width of the gamma-bracket at which collision bisection stops."""

    collision_slope_tolerance: float = 1e-4
    """Accepted deviation of d(beta)/d(alpha) from -1 at a collision."""

    ####################################################################
    # Oracles

    membership_tolerance: float = 1e-8

    ####################################################################
    # Execution

    max_workers: Optional[int] = None
    """Upper bound on the worker threads used by parameter sweeps; `None`
    lets trio pick its default."""

    def replace(self, **changes) -> "Settings":
        """Returns a copy of this record with the given fields changed."""
        return replace(self, **changes)


DEFAULT_SETTINGS = Settings()
"""Default settings used by every operation that is not given any."""


def resolve_settings(settings: Optional[Settings]) -> Settings:
    """Returns the given settings or the defaults when `None`."""
    return DEFAULT_SETTINGS if settings is None else settings
