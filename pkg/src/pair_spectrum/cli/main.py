"""Command-line interface entrypoint for the pair spectrum solver."""

import logging
import sys

from argparse import ArgumentParser, RawDescriptionHelpFormatter
from functools import partial
from pathlib import Path
from typing import List, Optional, Sequence

from trio import Path as AsyncPath, run as run_async, to_thread

from pair_spectrum.catalog import EXAMPLES, create_example
from pair_spectrum.errors import InvalidInputError, SpectralError
from pair_spectrum.export import (
    BRANCH_COLUMNS,
    COLLISION_COLUMNS,
    NSA_COLUMNS,
    branches_to_csv,
    collisions_to_csv,
    emit_svg_async,
    nsa_to_csv,
)
from pair_spectrum.nsa import find_collisions_async, nsa_spectrum
from pair_spectrum.oracle import run_verification_suite
from pair_spectrum.problem_file import format_problem, parse_problem
from pair_spectrum.structure import ProblemDef, analyze_problem, build_mesh
from pair_spectrum.tracer import assemble_spectrum, default_window, limit_sweep_async
from pair_spectrum.utils import write_text_async
from pair_spectrum.version import __version__

log = logging.getLogger("pair_spectrum.cli")


def create_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="pair-spectrum",
        description="Solves two-parameter eigenvalue problems with rank-one coupling.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        default=False,
        help="log debugging information to the standard error stream",
    )

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def add_command(name: str, help: str, epilog: Optional[str] = None) -> ArgumentParser:
        return subparsers.add_parser(
            name,
            help=help,
            description=help,
            epilog=epilog,
            formatter_class=RawDescriptionHelpFormatter,
        )

    def add_problem(command: ArgumentParser) -> None:
        command.add_argument(
            "file", type=Path, metavar="FILE", help="problem definition file to read"
        )

    def add_output(command: ArgumentParser, what: str) -> None:
        command.add_argument(
            "-o",
            "--out",
            type=Path,
            default=None,
            metavar="FILE",
            help=f"write {what} to FILE instead of the standard output",
        )

    command = add_command(
        "spectra", "print the eigenvalues of A and B, their compressions and exceptional sets"
    )
    add_problem(command)

    command = add_command("mesh", "print the dividing points of the chess-board mesh")
    add_problem(command)

    command = add_command(
        "trace",
        "trace the curves of the real pair spectrum",
        epilog="CSV columns: " + ", ".join(BRANCH_COLUMNS),
    )
    add_problem(command)
    command.add_argument("--alpha-min", type=float, default=None, metavar="ALPHA")
    command.add_argument("--alpha-max", type=float, default=None, metavar="ALPHA")
    command.add_argument(
        "--samples", type=int, default=None, metavar="COUNT", help="number of uniform samples"
    )
    add_output(command, "the curve points as CSV")
    command.add_argument(
        "--svg", type=Path, default=None, metavar="FILE", help="draw the spectrum into FILE"
    )

    command = add_command(
        "nsa",
        "compute the eigenvalues of the associated non-self-adjoint problem",
        epilog="CSV columns: " + ", ".join(NSA_COLUMNS),
    )
    add_problem(command)
    command.add_argument("--gamma", type=float, required=True)
    add_output(command, "the eigenvalues as CSV")

    command = add_command(
        "collisions",
        "locate the eigenvalue collisions of the non-self-adjoint problem",
        epilog="CSV columns: " + ", ".join(COLLISION_COLUMNS),
    )
    add_problem(command)
    command.add_argument("--gamma-min", type=float, required=True, metavar="GAMMA")
    command.add_argument("--gamma-max", type=float, required=True, metavar="GAMMA")
    command.add_argument("--samples", type=int, default=100, metavar="COUNT")
    add_output(command, "the collisions as CSV")

    command = add_command(
        "limits", "measure the distance of the curves from their limits in kappa"
    )
    add_problem(command)
    command.add_argument(
        "--kappa",
        type=float,
        nargs="+",
        required=True,
        metavar="KAPPA",
        help="coupling constants to evaluate",
    )
    command.add_argument("--samples", type=int, default=None, metavar="COUNT")

    command = add_command("verify", "run every consistency check on a problem")
    add_problem(command)
    command.add_argument("--samples", type=int, default=None, metavar="COUNT")

    command = add_command("example", "write one of the built-in examples as a problem file")
    command.add_argument("number", type=int, choices=sorted(EXAMPLES), metavar="NUMBER")
    command.add_argument("--kappa", type=float, default=None)
    command.add_argument("--n", type=int, default=None, help="dimension of example 1")
    add_output(command, "the problem file")

    return parser


async def read_problem(file: Path) -> ProblemDef:
    try:
        text = await AsyncPath(file).read_text(encoding="utf-8")
    except OSError as ex:
        raise InvalidInputError(f"cannot read {str(file)!r}: {ex.strerror}") from None
    return parse_problem(text)


async def emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        await write_text_async(out, text)
        log.info("Written %s", out)


def _format_values(values: Sequence[float]) -> str:
    return " ".join(format(float(value), ".10g") for value in values) or "-"


async def show_spectra(file: Path) -> int:
    problem = await read_problem(file)
    sa, sb = await to_thread.run_sync(analyze_problem, problem)

    lines: List[str] = []
    for name, structure in (("A", sa), ("B", sb)):
        for label, values in (
            ("Spec", structure.eigenvalues),
            ("Compressed", structure.compressed_eigenvalues),
            ("Gamma", structure.gamma),
            ("Gamma~", structure.gamma_tilde),
            ("Delta", structure.delta),
        ):
            lines.append(f"{name:<3}{label:<12}{_format_values(values)}")
        lines.extend(f"{name:<3}{'warning':<12}{note}" for note in structure.warnings)

    await emit("\n".join(lines) + "\n", None)
    return 0


async def show_mesh(file: Path) -> int:
    problem = await read_problem(file)
    sa, sb = await to_thread.run_sync(analyze_problem, problem)
    mesh = build_mesh(sa, sb)

    lines = [
        f"{axis:<3}{index:<4}{point.value:<22.10g}{point.origin.value}"
        for axis, points in (("x", mesh.x_points), ("y", mesh.y_points))
        for index, point in enumerate(points, 1)
    ]
    await emit("\n".join(lines) + "\n", None)
    return 0


async def trace(
    file: Path,
    alpha_min: Optional[float],
    alpha_max: Optional[float],
    samples: Optional[int],
    out: Optional[Path],
    svg: Optional[Path],
) -> int:
    problem = await read_problem(file)

    if alpha_min is None or alpha_max is None:
        sa, sb = await to_thread.run_sync(analyze_problem, problem)
        default_min, default_max = default_window(build_mesh(sa, sb))
        alpha_min = default_min if alpha_min is None else alpha_min
        alpha_max = default_max if alpha_max is None else alpha_max
    if alpha_min >= alpha_max:
        raise InvalidInputError("--alpha-min must be smaller than --alpha-max")

    spectrum = await to_thread.run_sync(
        partial(assemble_spectrum, problem, window=(alpha_min, alpha_max), samples=samples)
    )
    for note in spectrum.warnings:
        log.warning(note)
    log.info(
        "Traced %d branches with %d points",
        len(spectrum.branches),
        sum(len(branch) for branch in spectrum.branches),
    )

    await emit(branches_to_csv(spectrum.branches), out)
    if svg is not None:
        _, _, beta_min, beta_max = spectrum.mesh.span()
        await emit_svg_async(spectrum, (alpha_min, alpha_max, beta_min - 1, beta_max + 1), svg)
    return 0


async def nsa(file: Path, gamma: float, out: Optional[Path]) -> int:
    problem = await read_problem(file)
    spectrum = await to_thread.run_sync(nsa_spectrum, problem, gamma)
    log.info("%d of %d eigenvalues are real", spectrum.real_count, len(spectrum.eigenvalues))
    await emit(nsa_to_csv(spectrum), out)
    return 0


async def collisions(
    file: Path, gamma_min: float, gamma_max: float, samples: int, out: Optional[Path]
) -> int:
    problem = await read_problem(file)
    records = await find_collisions_async(problem, (gamma_min, gamma_max), samples)
    log.info("Found %d collisions", len(records))
    await emit(collisions_to_csv(records), out)
    return 0


async def limits(file: Path, kappa: Sequence[float], samples: Optional[int]) -> int:
    problem = await read_problem(file)
    report = await limit_sweep_async(problem, kappa, samples=samples)

    lines = [f"{'kappa':<14}{'d_small':<14}{'d_large':<14}"]
    lines.extend(
        f"{k:<14.6g}{small:<14.6g}{large:<14.6g}"
        for k, small, large in zip(report.kappas, report.d_small, report.d_large)
    )
    lines.append(f"small-kappa limit: {'converges' if report.small_kappa_converges else 'no'}")
    lines.append(f"large-kappa limit: {'converges' if report.large_kappa_converges else 'no'}")
    await emit("\n".join(lines) + "\n", None)
    return 0


async def verify(file: Path, samples: Optional[int]) -> int:
    problem = await read_problem(file)
    results = await to_thread.run_sync(
        partial(run_verification_suite, problem, samples=samples)
    )

    lines = [
        f"{'PASS' if result.passed else 'FAIL'}  {result.name:<26}{result.detail}"
        for result in results
    ]
    await emit("\n".join(lines) + "\n", None)
    return 0 if all(result.passed for result in results) else 1


async def example(
    number: int, kappa: Optional[float], n: Optional[int], out: Optional[Path]
) -> int:
    problem = create_example(number, kappa, n)
    await emit(format_problem(problem, title=f"Example {number}: {EXAMPLES[number].title}"), out)
    return 0


COMMANDS = {
    "spectra": show_spectra,
    "mesh": show_mesh,
    "trace": trace,
    "nsa": nsa,
    "collisions": collisions,
    "limits": limits,
    "verify": verify,
    "example": example,
}


async def run(command: str, verbose: bool = False, **options) -> int:
    return await COMMANDS[command](**options)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Runs the command line interface with the given arguments and returns
    the exit code: 0 on success, 1 on numerical failures and failed checks,
    2 on invalid input and usage errors.
    """
    parser = create_parser()
    try:
        options = parser.parse_args(argv)
    except SystemExit as ex:
        return ex.code if isinstance(ex.code, int) else 2

    logging.basicConfig(
        level=logging.DEBUG if options.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.captureWarnings(True)

    try:
        return run_async(partial(run, **vars(options)))
    except InvalidInputError as ex:
        log.error("%s", ex)
        return 2
    except (SpectralError, OSError) as ex:
        log.error("%s", ex)
        return 1
    except KeyboardInterrupt:
        return 0


def start():
    sys.exit(main())
