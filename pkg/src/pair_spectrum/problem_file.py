"""Parsing and formatting of problem definition files.

A problem file assigns values to the fields ``n``, ``A``, ``B``, ``z`` and
``kappa``, one field per ``name = values`` line. The values of a field may
continue on the following lines until the next assignment; matrices are
usually written one row per line. Numbers may be given as decimals or as
fractions like ``2/3``. Everything after a ``#`` is a comment::

    # Example 2
    n = 2
    A =
      -1 0
       0 1
    B = 1 0
        0 3
    z = 0.4472135954999579 0.8944271909999159
    kappa = 2/3
"""

from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional
from warnings import warn

import numpy as np

from .config import Settings, resolve_settings
from .errors import InvalidInputError, ProblemFileWarning, ProblemParseError
from .structure import ProblemDef

__all__ = ("FIELDS", "format_problem", "parse_problem")


FIELDS = ("n", "A", "B", "z", "kappa")
"""Names of the fields of a problem file, in the order they are written."""


class _Token(NamedTuple):
    text: str
    line: int
    column: int


class _Field(NamedTuple):
    line: int
    column: int
    tokens: List[_Token]


def _tokenize(text: str) -> Dict[str, _Field]:
    fields: Dict[str, _Field] = {}
    current: Optional[_Field] = None

    for line_number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        offset = 0

        name, sep, rest = line.partition("=")
        if sep:
            key = name.strip()
            column = len(name) - len(name.lstrip()) + 1
            if key not in FIELDS:
                raise ProblemParseError(
                    "unknown-field", f"unknown field {key!r}", line_number, column
                )
            if key in fields:
                raise ProblemParseError(
                    "duplicate-field",
                    f"field {key!r} is already defined on line {fields[key].line}",
                    line_number,
                    column,
                )
            current = fields[key] = _Field(line_number, column, [])
            offset = len(name) + 1
            line = rest

        start = None
        for index, char in enumerate(line + " "):
            if char.isspace():
                if start is not None:
                    if current is None:
                        raise ProblemParseError(
                            "unknown-field",
                            "values appear before any field name",
                            line_number,
                            offset + start + 1,
                        )
                    current.tokens.append(
                        _Token(line[start:index], line_number, offset + start + 1)
                    )
                    start = None
            elif start is None:
                start = index

    return fields


def _number(token: _Token) -> float:
    try:
        value = float(token.text)
    except ValueError:
        try:
            value = float(Fraction(token.text))
        except (ValueError, ZeroDivisionError):
            value = float("nan")

    if not np.isfinite(value):
        raise ProblemParseError(
            "bad-number", f"{token.text!r} is not a finite number", token.line, token.column
        )
    return value


def _values(fields: Dict[str, _Field], key: str, count: int) -> List[float]:
    field = fields[key]
    if not field.tokens:
        raise ProblemParseError(
            "missing-values", f"field {key!r} has no values", field.line, field.column
        )

    values = [_number(token) for token in field.tokens]
    if len(values) != count:
        token = field.tokens[count if len(values) > count else -1]
        raise ProblemParseError(
            "dimension-mismatch",
            f"field {key!r} needs {count} values, got {len(values)}",
            token.line,
            token.column,
        )
    return values


def _matrix(fields: Dict[str, _Field], key: str, n: int, settings: Settings) -> np.ndarray:
    matrix = np.array(_values(fields, key, n * n)).reshape(n, n)

    scale = max(float(np.max(np.abs(matrix))), 1.0)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(matrix[i, j] - matrix[j, i]) > settings.symmetry_tolerance * scale:
                token = fields[key].tokens[j * n + i]
                raise ProblemParseError(
                    "asymmetric-matrix",
                    f"{key}[{j + 1}][{i + 1}] = {matrix[j, i]!r} differs from "
                    f"{key}[{i + 1}][{j + 1}] = {matrix[i, j]!r}",
                    token.line,
                    token.column,
                )
    return matrix


def parse_problem(text: str, *, settings: Optional[Settings] = None) -> ProblemDef:
    """Parses the contents of a problem definition file.

    A coupling vector whose norm deviates from one is normalized; a
    `ProblemFileWarning` is emitted if the deviation is larger than the
    normalization warning threshold.

    Raises:
        ProblemParseError: if the file is malformed; the error carries the
            line and column of the offending token and an error code
    """
    settings = resolve_settings(settings)
    fields = _tokenize(text)

    for key in FIELDS:
        if key not in fields:
            raise ProblemParseError("missing-field", f"field {key!r} is missing", 0, 0)

    size_token = fields["n"].tokens[0] if fields["n"].tokens else None
    n = _values(fields, "n", 1)[0]
    if n != int(n) or n < 1:
        raise ProblemParseError(
            "bad-number", f"{size_token.text!r} is not a positive integer", *size_token[1:]
        )
    n = int(n)

    A = _matrix(fields, "A", n, settings)
    B = _matrix(fields, "B", n, settings)
    z = np.array(_values(fields, "z", n))
    kappa = _values(fields, "kappa", 1)[0]

    norm = float(np.linalg.norm(z))
    if norm == 0:
        field = fields["z"]
        raise ProblemParseError("zero-vector", "the coupling vector is zero", field.line, field.column)
    if abs(norm - 1) > settings.normalization_warning_threshold:
        warn(
            f"coupling vector has norm {norm!r}; it was normalized",
            ProblemFileWarning,
            stacklevel=2,
        )

    try:
        return ProblemDef(A, B, z, kappa)
    except InvalidInputError as ex:
        raise ProblemParseError("bad-number", str(ex), 0, 0) from ex


def _format_number(value: float) -> str:
    return repr(float(value))


def format_problem(problem: ProblemDef, *, title: Optional[str] = None) -> str:
    """Returns the problem definition file of a problem. Numbers are written
    with their shortest exact representation, so parsing the result gives
    back the same problem.
    """
    lines = []
    if title:
        lines.extend(f"# {line}".rstrip() for line in title.splitlines())

    lines.append(f"n = {problem.n}")
    for key, matrix in (("A", problem.A), ("B", problem.B)):
        lines.append(f"{key} =")
        lines.extend(
            "  " + " ".join(_format_number(value) for value in row) for row in matrix
        )
    lines.append("z = " + " ".join(_format_number(value) for value in problem.z))
    lines.append(f"kappa = {_format_number(problem.kappa)}")

    return "\n".join(lines) + "\n"
