from pytest import fixture, mark

from pair_spectrum.cli.main import main
from pair_spectrum.export import BRANCH_COLUMNS, COLLISION_COLUMNS


@fixture
def example2_file(tmp_path):
    path = tmp_path / "example2.txt"
    assert main(["example", "2", "-o", str(path)]) == 0
    return path


@fixture
def scalar_file(tmp_path):
    path = tmp_path / "scalar.txt"
    path.write_text("n = 1\nA = 0\nB = 0\nz = 1\nkappa = 1\n")
    return path


def test_example_to_stdout(capsys):
    assert main(["example", "3"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# Example 3: ")
    assert "kappa = 0.5\n" in out


def test_spectra(example2_file, capsys):
    assert main(["spectra", str(example2_file)]) == 0
    lines = capsys.readouterr().out.splitlines()

    assert lines[0].split() == ["A", "Spec", "-1", "1"]
    assert lines[1].split() == ["A", "Compressed", "-0.6"]
    assert lines[2].split() == ["A", "Gamma", "-"]
    assert ["B", "Compressed", "1.4"] in [line.split() for line in lines]


def test_mesh(example2_file, capsys):
    assert main(["mesh", str(example2_file)]) == 0
    rows = [line.split() for line in capsys.readouterr().out.splitlines()]
    assert rows == [
        ["x", "1", "-1", "Spec"],
        ["x", "2", "-0.6", "Compressed"],
        ["x", "3", "1", "Spec"],
        ["y", "1", "1", "Spec"],
        ["y", "2", "1.4", "Compressed"],
        ["y", "3", "3", "Spec"],
    ]


def test_trace_csv_has_even_parity(tmp_path, capsys):
    problem = tmp_path / "example1.txt"
    out = tmp_path / "curves.csv"
    assert main(["example", "1", "--n", "4", "-o", str(problem)]) == 0
    assert main(["trace", str(problem), "--samples", "300", "-o", str(out)]) == 0

    header, *rows = out.read_text().splitlines()
    assert header == ",".join(BRANCH_COLUMNS)
    assert rows
    for row in rows:
        *_, p, q = row.split(",")
        assert (int(p) + int(q)) % 2 == 0
    assert capsys.readouterr().out == ""


def test_trace_svg_is_deterministic(example2_file, tmp_path):
    first, second = tmp_path / "first.svg", tmp_path / "second.svg"
    for svg in (first, second):
        args = ["trace", str(example2_file), "--samples", "100", "--svg", str(svg)]
        assert main(args + ["-o", str(tmp_path / "curves.csv")]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_trace_window(example2_file, capsys):
    args = ["trace", str(example2_file), "--alpha-min", "0", "--alpha-max", "0.5"]
    assert main(args + ["--samples", "11"]) == 0
    rows = capsys.readouterr().out.splitlines()[1:]
    alphas = sorted({float(row.split(",")[1]) for row in rows})
    assert alphas[0] == 0.0 and alphas[-1] == 0.5


def test_nsa(scalar_file, capsys):
    assert main(["nsa", str(scalar_file), "--gamma", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3
    values = sorted(float(line.split(",")[0]) for line in lines[1:])
    assert abs(values[0] + 3**0.5) < 1e-9
    assert abs(values[1] - 3**0.5) < 1e-9


def test_collisions(scalar_file, tmp_path):
    out = tmp_path / "collisions.csv"
    args = ["collisions", str(scalar_file), "--gamma-min", "-2", "--gamma-max", "2"]
    assert main(args + ["--samples", "40", "-o", str(out)]) == 0

    header, *rows = out.read_text().splitlines()
    assert header == ",".join(COLLISION_COLUMNS)
    assert [row.split(",")[3] for row in rows] == ["A", "B"]


def test_limits(example2_file, capsys):
    args = ["limits", str(example2_file), "--kappa", "0.001", "0.01", "0.1"]
    assert main(args + ["--samples", "200"]) == 0
    out = capsys.readouterr().out
    assert "small-kappa limit: converges" in out
    assert len(out.splitlines()) == 6


def test_verify(example2_file, capsys):
    assert main(["verify", str(example2_file), "--samples", "300"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 8
    assert all(line.startswith("PASS") for line in lines)


@mark.parametrize(
    "args",
    [
        [],
        ["frobnicate"],
        ["example", "9"],
        ["nsa", "problem.txt"],
        ["collisions", "problem.txt", "--gamma-min", "0"],
    ],
)
def test_usage_errors(args, capsys):
    assert main(args) == 2


def test_missing_file(tmp_path):
    assert main(["spectra", str(tmp_path / "missing.txt")]) == 2


def test_malformed_file(tmp_path, caplog):
    path = tmp_path / "asymmetric.txt"
    path.write_text("n = 2\nA = 1 2\n    3 4\nB = 1 0 0 1\nz = 1 0\nkappa = 1\n")
    assert main(["spectra", str(path)]) == 2
    assert "asymmetric-matrix" in caplog.text


def test_empty_alpha_window(example2_file):
    args = ["trace", str(example2_file), "--alpha-min", "1", "--alpha-max", "0"]
    assert main(args) == 2


def test_straight_lines_have_no_limit_sweep(tmp_path):
    path = tmp_path / "example3.txt"
    assert main(["example", "3", "-o", str(path)]) == 0
    assert main(["limits", str(path), "--kappa", "1"]) == 2
