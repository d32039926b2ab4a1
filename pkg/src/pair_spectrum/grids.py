"""Sampling grids for curve tracing and parameter sweeps."""

from math import ceil, log10
from typing import Optional, Sequence

import numpy as np

from .config import Settings, resolve_settings
from .errors import InvalidInputError

__all__ = ("create_alpha_grid", "create_parameter_grid", "refinement_offsets")


def refinement_offsets(inner: float, outer: float, per_decade: int) -> np.ndarray:
    """Geometrically spaced distances from `outer` down to `inner`, with the
    given number of points per decade.
    """
    if inner <= 0 or outer <= inner:
        return np.zeros(0)
    count = int(ceil(log10(outer / inner) * per_decade)) + 1
    return np.geomspace(outer, inner, count)


def create_alpha_grid(
    alpha_min: float,
    alpha_max: float,
    samples: Optional[int] = None,
    poles: Sequence[float] = (),
    exclusion_radius: float = 0.0,
    *,
    settings: Optional[Settings] = None,
) -> np.ndarray:
    """Creates a sorted grid on [alpha_min, alpha_max] that is uniform apart
    from a geometric refinement towards each pole.

    Points inside the exclusion zone of a pole are left out; the innermost
    refinement points sit just outside the exclusion zone, at 1.01 times its
    radius.

    Parameters:
        alpha_min: left end of the grid
        alpha_max: right end of the grid
        samples: number of uniform samples; defaults to the configured value
        poles: points towards which the grid is refined
        exclusion_radius: radius of the excluded neighbourhood of each pole
    """
    settings = resolve_settings(settings)
    samples = settings.grid_samples if samples is None else int(samples)
    if samples < 2:
        raise InvalidInputError("a grid needs at least two samples")
    if not (np.isfinite(alpha_min) and np.isfinite(alpha_max)) or alpha_min >= alpha_max:
        raise InvalidInputError(f"invalid grid range [{alpha_min!r}, {alpha_max!r}]")

    parts = [np.linspace(alpha_min, alpha_max, samples)]
    offsets = refinement_offsets(
        1.01 * exclusion_radius, settings.refinement_radius, settings.refinement_per_decade
    )
    for pole in poles:
        parts.append(pole - offsets)
        parts.append(pole + offsets)

    grid = np.unique(np.concatenate(parts))
    grid = grid[(grid >= alpha_min) & (grid <= alpha_max)]

    if len(poles) and exclusion_radius > 0:
        distances = np.min(np.abs(grid[:, None] - np.asarray(poles)[None, :]), axis=1)
        grid = grid[distances > exclusion_radius]

    return grid


def create_parameter_grid(start: float, stop: float, samples: int) -> np.ndarray:
    """Uniform grid from `start` to `stop` (in this order, which may be
    descending) with the given number of samples.
    """
    if samples < 2:
        raise InvalidInputError("a parameter grid needs at least two samples")
    if not (np.isfinite(start) and np.isfinite(stop)) or start == stop:
        raise InvalidInputError(f"invalid parameter range [{start!r}, {stop!r}]")
    return np.linspace(start, stop, samples)
