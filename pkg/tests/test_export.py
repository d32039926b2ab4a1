from functools import partial

import trio

from pytest import fixture, mark, raises

from pair_spectrum.errors import InvalidInputError
from pair_spectrum.export import (
    BRANCH_COLUMNS,
    COLLISION_COLUMNS,
    NSA_COLUMNS,
    branches_to_csv,
    collisions_to_csv,
    default_plot_window,
    emit_svg,
    emit_svg_async,
    nsa_to_csv,
    render_svg,
)
from pair_spectrum.nsa import find_collisions, nsa_spectrum
from pair_spectrum.tracer import assemble_spectrum


@fixture
def spectrum2(example2):
    return assemble_spectrum(example2, samples=200)


class TestCsv:
    def test_branches(self, spectrum2):
        text = branches_to_csv(spectrum2.branches)
        lines = text.split("\n")

        assert "\r" not in text
        assert text.endswith("\n")
        assert lines[0] == ",".join(BRANCH_COLUMNS)
        assert len(lines) - 2 == sum(len(branch) for branch in spectrum2.branches)

        branch_id, alpha, beta, slope, p, q = lines[1].split(",")
        assert branch_id == "0"
        assert float(alpha) == -2.0
        assert float(slope) < 0
        assert (int(p) + int(q)) % 2 == 0

    def test_branches_are_deterministic(self, example2):
        first = branches_to_csv(assemble_spectrum(example2, samples=100).branches)
        second = branches_to_csv(assemble_spectrum(example2, samples=100).branches)
        assert first == second

    def test_nsa(self, scalar_problem):
        header, *rows = nsa_to_csv(nsa_spectrum(scalar_problem, 0.0)).splitlines()
        assert header == ",".join(NSA_COLUMNS)
        values = [tuple(float(value) for value in row.split(",")) for row in rows]
        assert len(values) == 2
        for (re, im, line), expected in zip(values, (-1.0, 1.0)):
            assert abs(re) < 1e-12
            assert abs(im - expected) < 1e-12
            assert line == 0

    def test_collisions(self, scalar_problem):
        text = collisions_to_csv(find_collisions(scalar_problem, (-2.0, 2.0), samples=40))
        header, first, second, end = text.split("\n")

        assert header == ",".join(COLLISION_COLUMNS)
        assert first.split(",")[3] == "A"
        assert second.split(",")[3] == "B"
        assert first.endswith(",1") and second.endswith(",1")
        assert end == ""

    def test_empty(self):
        assert branches_to_csv([]) == ",".join(BRANCH_COLUMNS) + "\n"
        assert collisions_to_csv([]) == ",".join(COLLISION_COLUMNS) + "\n"


class TestSvg:
    def test_example2(self, spectrum2):
        svg = render_svg(spectrum2)
        assert svg.lstrip().startswith("<?xml")
        assert svg.count('id="mesh-x-') == 3
        assert svg.count('id="mesh-y-') == 3
        assert svg.count('id="curve-') == 6
        assert 'id="corners"' in svg
        assert 'id="line-' not in svg

    def test_straight_lines(self, example4):
        svg = render_svg(assemble_spectrum(example4, samples=100))
        assert svg.count('id="line-v-') == 2
        assert svg.count('id="line-h-') == 2

    def test_even_cells_are_shaded(self, spectrum2):
        svg = render_svg(spectrum2, (-2.0, 2.0, 0.0, 4.0))
        # A 4 x 4 grid of cells, half of them even
        assert svg.count('id="cell-') == 8
        assert 'id="cell-1-1"' in svg
        assert 'id="cell-1-2"' not in svg

    def test_deterministic(self, spectrum2):
        assert render_svg(spectrum2) == render_svg(spectrum2)

    def test_window_without_curves(self, spectrum2):
        svg = render_svg(spectrum2, (100.0, 101.0, 100.0, 101.0))
        assert 'id="curve-' not in svg
        assert 'id="corners"' not in svg

    @mark.parametrize(
        "window",
        [(1.0, 0.0, 0.0, 1.0), (0.0, 1.0, 2.0, 2.0), (0.0, float("inf"), 0.0, 1.0)],
    )
    def test_invalid_window(self, spectrum2, window):
        with raises(InvalidInputError):
            render_svg(spectrum2, window)

    def test_default_window(self, spectrum2):
        assert default_plot_window(spectrum2) == (-2.0, 2.0, 0.0, 4.0)

    def test_emit(self, spectrum2, tmp_path):
        path = tmp_path / "spectrum.svg"
        emit_svg(spectrum2, None, path)
        assert path.read_bytes() == render_svg(spectrum2).encode("utf-8")

    def test_emit_async(self, spectrum2, tmp_path):
        path = tmp_path / "spectrum.svg"
        trio.run(partial(emit_svg_async, spectrum2, None, path))
        assert path.read_text(encoding="utf-8") == render_svg(spectrum2)
