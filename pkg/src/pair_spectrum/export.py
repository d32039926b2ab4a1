"""CSV and SVG output of computed spectra.

Output is deterministic: identical input produces byte-identical files.
"""

from csv import writer
from io import StringIO
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from matplotlib import rc_context
from matplotlib.figure import Figure
from matplotlib.patches import Rectangle as RectanglePatch
from trio import to_thread

from .errors import InvalidInputError
from .nsa import CollisionRecord, NsaSpectrum
from .structure import MeshOrigin
from .tracer import CurveBranch, PairSpectrum
from .utils import write_text_async

__all__ = (
    "BRANCH_COLUMNS",
    "COLLISION_COLUMNS",
    "NSA_COLUMNS",
    "branches_to_csv",
    "collisions_to_csv",
    "default_plot_window",
    "emit_svg",
    "emit_svg_async",
    "nsa_to_csv",
    "render_svg",
)

BRANCH_COLUMNS = ("branch_id", "alpha", "beta", "dbeta_dalpha", "rect_p", "rect_q")
NSA_COLUMNS = ("re", "im", "from_line")
COLLISION_COLUMNS = (
    "gamma_star",
    "lambda_re",
    "lambda_im",
    "type",
    "dbeta_dalpha",
    "alpha_star",
    "beta_star",
    "verified",
)

PlotWindow = Tuple[float, float, float, float]


def _number(value: float) -> str:
    return format(float(value), ".17g")


def _to_csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buffer = StringIO()
    output = writer(buffer, lineterminator="\n")
    output.writerow(header)
    output.writerows(rows)
    return buffer.getvalue()


def branches_to_csv(branches: Sequence[CurveBranch]) -> str:
    """Formats the sampled points of curve branches as CSV, one row per
    point, in branch order.
    """
    return _to_csv(
        BRANCH_COLUMNS,
        (
            (branch.branch_id, _number(a), _number(b), _number(s), int(p), int(q))
            for branch in branches
            for a, b, s, p, q in zip(
                branch.alphas, branch.betas, branch.slopes, branch.rect_p, branch.rect_q
            )
        ),
    )


def nsa_to_csv(spectrum: NsaSpectrum) -> str:
    """Formats the eigenvalues of the non-self-adjoint problem as CSV."""
    return _to_csv(
        NSA_COLUMNS,
        (
            (_number(value.real), _number(value.imag), int(line))
            for value, line in zip(spectrum.eigenvalues, spectrum.from_line)
        ),
    )


def collisions_to_csv(records: Sequence[CollisionRecord]) -> str:
    """Formats collision records as CSV."""
    return _to_csv(
        COLLISION_COLUMNS,
        (
            (
                _number(record.gamma_star),
                _number(record.lambda_star.real),
                _number(record.lambda_star.imag),
                record.type.value,
                _number(record.dbeta_dalpha_at),
                _number(record.alpha_star),
                _number(record.beta_star),
                int(record.verified),
            )
            for record in records
        ),
    )


def default_plot_window(spectrum: PairSpectrum) -> PlotWindow:
    """The mesh of the spectrum extended by one unit in every direction, as
    (alpha_min, alpha_max, beta_min, beta_max).
    """
    x_min, x_max, y_min, y_max = spectrum.mesh.span()
    return x_min - 1, x_max + 1, y_min - 1, y_max + 1


_MESH_STYLES = {
    MeshOrigin.SPECTRUM: ":",
    MeshOrigin.COMPRESSED: "-.",
    MeshOrigin.BOTH: "--",
}

_SVG_PARAMS = {
    "svg.fonttype": "none",
    "svg.hashsalt": "pair-spectrum",
    "path.simplify": False,
}


def _cells(points: np.ndarray, lo: float, hi: float):
    """Yields the one-based index and extent of every mesh interval that
    meets [lo, hi].
    """
    edges = np.concatenate([[lo], points[(points > lo) & (points < hi)], [hi]])
    first = 1 + int(np.count_nonzero(points <= lo))
    for offset, (start, end) in enumerate(zip(edges[:-1], edges[1:])):
        yield first + offset, float(start), float(end)


def render_svg(spectrum: PairSpectrum, window: Optional[PlotWindow] = None) -> str:
    """Draws a pair spectrum and returns the SVG document.

    Mesh lines are dotted (eigenvalues), dash-dotted (eigenvalues of the
    compression) or dashed (both); even rectangles of the mesh are shaded;
    curves are solid thin lines and straight-line components are solid thick
    lines. Curve data outside the window is left out and coordinates are
    rounded to six decimals.

    Raises:
        InvalidInputError: if the window is not finite or empty
    """
    window = default_plot_window(spectrum) if window is None else window
    alpha_min, alpha_max, beta_min, beta_max = (float(value) for value in window)
    if not np.all(np.isfinite(window)) or alpha_min >= alpha_max or beta_min >= beta_max:
        raise InvalidInputError(f"invalid plot window: {window!r}")

    mesh = spectrum.mesh
    height = beta_max - beta_min

    with rc_context(_SVG_PARAMS):
        figure = Figure(figsize=(6, 6))
        axes = figure.add_subplot()
        axes.set_xlim(alpha_min, alpha_max)
        axes.set_ylim(beta_min, beta_max)
        axes.set_xlabel("alpha")
        axes.set_ylabel("beta")

        for p, x0, x1 in _cells(mesh.xs, alpha_min, alpha_max):
            for q, y0, y1 in _cells(mesh.ys, beta_min, beta_max):
                if (p + q) % 2 == 0:
                    cell = RectanglePatch(
                        (round(x0, 6), round(y0, 6)),
                        round(x1 - x0, 6),
                        round(y1 - y0, 6),
                        facecolor="0.92",
                        edgecolor="none",
                        zorder=0,
                    )
                    cell.set_gid(f"cell-{p}-{q}")
                    axes.add_patch(cell)

        for index, point in enumerate(mesh.x_points):
            line = axes.axvline(
                round(point.value, 6), color="0.4", lw=0.8, ls=_MESH_STYLES[point.origin]
            )
            line.set_gid(f"mesh-x-{index}")
        for index, point in enumerate(mesh.y_points):
            line = axes.axhline(
                round(point.value, 6), color="0.4", lw=0.8, ls=_MESH_STYLES[point.origin]
            )
            line.set_gid(f"mesh-y-{index}")

        for branch in spectrum.branches:
            keep = (branch.betas >= beta_min - height) & (branch.betas <= beta_max + height)
            keep &= (branch.alphas >= alpha_min) & (branch.alphas <= alpha_max)
            if not np.any(keep):
                continue
            (curve,) = axes.plot(
                np.round(branch.alphas[keep], 6),
                np.round(branch.betas[keep], 6),
                color="tab:blue",
                lw=1.2,
            )
            curve.set_gid(f"curve-{branch.branch_id}")

        for index, value in enumerate(spectrum.vertical_lines):
            line = axes.axvline(round(value, 6), color="tab:red", lw=2)
            line.set_gid(f"line-v-{index}")
        for index, value in enumerate(spectrum.horizontal_lines):
            line = axes.axhline(round(value, 6), color="tab:red", lw=2)
            line.set_gid(f"line-h-{index}")

        corners = [
            (round(x, 6), round(y, 6))
            for x, y in spectrum.corner_points
            if alpha_min <= x <= alpha_max and beta_min <= y <= beta_max
        ]
        if corners:
            (markers,) = axes.plot(*zip(*corners), "o", color="black", ms=3)
            markers.set_gid("corners")

        buffer = StringIO()
        figure.savefig(buffer, format="svg", metadata={"Date": None})

    return buffer.getvalue()


def emit_svg(
    spectrum: PairSpectrum, window: Optional[PlotWindow], path: Union[str, Path]
) -> None:
    """Draws a pair spectrum into an SVG file; see `render_svg()`."""
    with open(path, "w", encoding="utf-8", newline="") as fp:
        fp.write(render_svg(spectrum, window))


async def emit_svg_async(
    spectrum: PairSpectrum, window: Optional[PlotWindow], path: Union[str, Path]
) -> None:
    """Asynchronous version of `emit_svg()`. Rendering runs in a worker
    thread.
    """
    text = await to_thread.run_sync(render_svg, spectrum, window)
    await write_text_async(path, text)
