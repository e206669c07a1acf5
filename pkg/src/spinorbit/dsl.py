"""Line-oriented text format describing an optical bench.

One statement per line; `#` starts a comment; blank lines are ignored.

    space lmax=<int>
    prepare polarizer <H|V>
    prepare hologram oam=<int>[,<int>...]
    qplate q=<rational> [eta=<float>]
    hwp theta=<float> [aperture=<all|l0>] [crosstalk=<float>]
    dove [angle=<float>]
    lens
    measure <pbs|oam_sorter>

`space`, the two `prepare` forms and `measure` may each appear at most once;
element statements may repeat and their order is the application order.
Rationals accept `p/q` or decimal form; 2q-integrality is checked on the
exact rational at compile time.  Floats are rendered with 17 significant
digits so render/parse round-trips are lossless.

Parsing is total: every invalid line yields exactly one positioned error and
parsing continues, so a single pass reports every problem in the file.
Compilation then runs the semantic checks, most importantly a symbolic trace
of which |pol, l> modes the prepared light can occupy at each element, which
rejects chains that would push amplitude outside the truncation and names the
offending element.
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import elements as el
from .errors import BenchParseError, CompileError
from .state import LEFT, RIGHT, ElementOp, ModeSpace, PhotonState, make_space

DEFAULT_L_MAX = 6
MEASURE_PBS = "pbs"
MEASURE_OAM_SORTER = "oam_sorter"
MEASURE_KINDS = (MEASURE_PBS, MEASURE_OAM_SORTER)

_APERTURE_WORDS = {"all": el.APERTURE_FULL, "l0": el.APERTURE_L0}
_APERTURE_NAMES = {v: k for k, v in _APERTURE_WORDS.items()}


def _fmt(x: float) -> str:
    return format(x, ".17g")


@dataclass(frozen=True)
class ParseError:
    line: int
    column: int
    message: str
    token: str

    def __str__(self) -> str:
        return f"line {self.line}, col {self.column}: {self.message} (got {self.token!r})"


@dataclass(frozen=True)
class QPlateStmt:
    q: Fraction
    eta: float = 1.0
    line: int = field(default=0, compare=False)

    keyword = "qplate"

    def render(self) -> str:
        text = f"qplate q={self.q}"
        if self.eta != 1.0:
            text += f" eta={_fmt(self.eta)}"
        return text


@dataclass(frozen=True)
class HwpStmt:
    theta: float
    aperture: str = el.APERTURE_FULL
    crosstalk: float = 0.0
    line: int = field(default=0, compare=False)

    keyword = "hwp"

    def render(self) -> str:
        text = f"hwp theta={_fmt(self.theta)}"
        if self.aperture != el.APERTURE_FULL:
            text += f" aperture={_APERTURE_NAMES[self.aperture]}"
        if self.crosstalk != 0.0:
            text += f" crosstalk={_fmt(self.crosstalk)}"
        return text


@dataclass(frozen=True)
class DoveStmt:
    angle: float = 0.0
    line: int = field(default=0, compare=False)

    keyword = "dove"

    def render(self) -> str:
        return "dove" if self.angle == 0.0 else f"dove angle={_fmt(self.angle)}"


@dataclass(frozen=True)
class LensStmt:
    line: int = field(default=0, compare=False)

    keyword = "lens"

    def render(self) -> str:
        return "lens"


ElementStmt = QPlateStmt | HwpStmt | DoveStmt | LensStmt


@dataclass(frozen=True)
class BenchFile:
    """Parsed bench description; fields are None where the file omits a directive."""

    l_max: int | None = None
    polarizer: str | None = None
    hologram: tuple[int, ...] | None = None
    elements: tuple[ElementStmt, ...] = ()
    measure: str | None = None


# --- parsing ---------------------------------------------------------------


def _tokens(code: str) -> list[tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", code)]


def _split_kv(token: str) -> tuple[str, str] | None:
    key, sep, value = token.partition("=")
    if not sep or not key:
        return None
    return key, value


def _parse_int(value: str) -> int:
    return int(value, 10)


def _parse_float(value: str) -> float:
    out = float(value)
    if not math.isfinite(out):
        raise ValueError("non-finite")
    return out


def _parse_rational(value: str) -> Fraction:
    return Fraction(value)


def _parse_int_list(value: str) -> tuple[int, ...]:
    return tuple(_parse_int(part) for part in value.split(","))


_VALUE_PARSERS = {
    "int": _parse_int,
    "float": _parse_float,
    "rational": _parse_rational,
    "int list": _parse_int_list,
}


class _LineError(Exception):
    def __init__(self, column: int, message: str, token: str):
        self.column = column
        self.message = message
        self.token = token


def _take_kv(
    tokens: list[tuple[str, int]],
    spec: dict[str, str],
    required: tuple[str, ...],
    keyword_col: int = 1,
) -> dict:
    """Parse `key=value` tokens against {key: value-kind}; raise on the first problem."""
    seen: dict = {}
    for token, col in tokens:
        kv = _split_kv(token)
        if kv is None:
            raise _LineError(col, "expected key=value", token)
        key, raw = kv
        if key not in spec:
            raise _LineError(col, f"unknown key {key!r}", token)
        if key in seen:
            raise _LineError(col, f"duplicate key {key!r}", token)
        kind = spec[key]
        try:
            seen[key] = _VALUE_PARSERS[kind](raw)
        except (ValueError, ZeroDivisionError):
            raise _LineError(col, f"invalid {kind} for {key!r}", token) from None
    for key in required:
        if key not in seen:
            col = tokens[0][1] if tokens else keyword_col
            raise _LineError(col, f"missing required key {key!r}", key)
    return seen


def _parse_statement(tokens: list[tuple[str, int]]):
    keyword, col = tokens[0]
    rest = tokens[1:]
    if keyword == "space":
        values = _take_kv(rest, {"lmax": "int"}, ("lmax",), col)
        return "space", values["lmax"]
    if keyword == "prepare":
        if not rest:
            raise _LineError(col, "expected 'polarizer' or 'hologram'", keyword)
        sub, sub_col = rest[0]
        if sub == "polarizer":
            if len(rest) != 2 or rest[1][0] not in ("H", "V"):
                bad = rest[1] if len(rest) > 1 else (sub, sub_col)
                raise _LineError(bad[1], "expected polarizer axis 'H' or 'V'", bad[0])
            return "polarizer", rest[1][0]
        if sub == "hologram":
            values = _take_kv(rest[1:], {"oam": "int list"}, ("oam",), sub_col)
            return "hologram", values["oam"]
        raise _LineError(sub_col, "expected 'polarizer' or 'hologram'", sub)
    if keyword == "qplate":
        values = _take_kv(rest, {"q": "rational", "eta": "float"}, ("q",), col)
        return "element", QPlateStmt(values["q"], values.get("eta", 1.0))
    if keyword == "hwp":
        values = _take_kv(
            rest,
            {"theta": "float", "aperture": "aperture", "crosstalk": "float"},
            ("theta",),
            col,
        )
        return "element", HwpStmt(
            values["theta"],
            values.get("aperture", el.APERTURE_FULL),
            values.get("crosstalk", 0.0),
        )
    if keyword == "dove":
        values = _take_kv(rest, {"angle": "float"}, (), col)
        return "element", DoveStmt(values.get("angle", 0.0))
    if keyword == "lens":
        if rest:
            raise _LineError(rest[0][1], "lens takes no parameters", rest[0][0])
        return "element", LensStmt()
    if keyword == "measure":
        if len(rest) != 1 or rest[0][0] not in MEASURE_KINDS:
            bad = rest[0] if rest else (keyword, col)
            raise _LineError(bad[1], "expected measurement 'pbs' or 'oam_sorter'", bad[0])
        return "measure", rest[0][0]
    raise _LineError(col, "unknown statement", keyword)


def _parse_aperture(value: str) -> str:
    if value not in _APERTURE_WORDS:
        raise ValueError("bad aperture")
    return _APERTURE_WORDS[value]


_VALUE_PARSERS["aperture"] = _parse_aperture


def parse_with_errors(text: str) -> tuple[BenchFile, list[ParseError]]:
    """Parse every line, collecting one positioned error per invalid line.

    Returns the bench assembled from the valid lines plus the error list, so
    diagnostics can show everything wrong with a file in one pass.
    """
    errors: list[ParseError] = []
    l_max: int | None = None
    pol: str | None = None
    holo: tuple[int, ...] | None = None
    measure: str | None = None
    chain: list[ElementStmt] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        code = raw.split("#", 1)[0]
        tokens = _tokens(code)
        if not tokens:
            continue
        try:
            kind, value = _parse_statement(tokens)
        except _LineError as exc:
            errors.append(ParseError(lineno, exc.column, exc.message, exc.token))
            continue
        col = tokens[0][1]
        token = tokens[0][0]
        if kind == "space":
            if l_max is not None:
                errors.append(ParseError(lineno, col, "duplicate 'space' directive", token))
            else:
                l_max = value
        elif kind == "polarizer":
            if pol is not None:
                errors.append(
                    ParseError(lineno, col, "duplicate 'prepare polarizer' directive", token)
                )
            else:
                pol = value
        elif kind == "hologram":
            if holo is not None:
                errors.append(
                    ParseError(lineno, col, "duplicate 'prepare hologram' directive", token)
                )
            else:
                holo = value
        elif kind == "measure":
            if measure is not None:
                errors.append(ParseError(lineno, col, "duplicate 'measure' directive", token))
            else:
                measure = value
        else:
            chain.append(dataclasses.replace(value, line=lineno))
    bench = BenchFile(
        l_max=l_max,
        polarizer=pol,
        hologram=holo,
        elements=tuple(chain),
        measure=measure,
    )
    return bench, errors


def parse(text: str) -> BenchFile:
    """Parse a bench description; raises BenchParseError carrying every error."""
    bench, errors = parse_with_errors(text)
    if errors:
        raise BenchParseError(errors)
    return bench


def render(bench: BenchFile) -> str:
    """Canonical text form: space, prepare directives, elements, measure."""
    lines = []
    if bench.l_max is not None:
        lines.append(f"space lmax={bench.l_max}")
    if bench.polarizer is not None:
        lines.append(f"prepare polarizer {bench.polarizer}")
    if bench.hologram is not None:
        lines.append("prepare hologram oam=" + ",".join(f"{l:+d}" for l in bench.hologram))
    for stmt in bench.elements:
        lines.append(stmt.render())
    if bench.measure is not None:
        lines.append(f"measure {bench.measure}")
    return "\n".join(lines) + "\n"


# --- compilation -----------------------------------------------------------


@dataclass(frozen=True)
class Preparation:
    """Initial-state recipe: linear polarizer axis plus hologram OAM content."""

    axis: str = "V"
    oams: tuple[int, ...] = (0,)

    def initial_state(self, space: ModeSpace) -> PhotonState:
        """Polarization vector (in circular coordinates) tensor uniform OAM superposition.

        V preparation uses (|L> - |R>)/sqrt(2), i.e. i|V>, so prepared states
        carry the same overall phase the analytic input/output states use.
        """
        if self.axis == "V":
            pair = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)
        else:
            pair = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
        weight = 1.0 / math.sqrt(len(self.oams))
        amps = np.zeros(space.dimension, dtype=complex)
        for l in self.oams:
            amps[space.index(LEFT, l)] = pair[0] * weight
            amps[space.index(RIGHT, l)] = pair[1] * weight
        return PhotonState(space, amps)


@dataclass(frozen=True, eq=False)
class CompiledBench:
    space: ModeSpace
    preparation: Preparation
    elements: tuple[ElementOp, ...]
    measure: str | None


def _element_name(index: int, stmt: ElementStmt) -> str:
    where = f" (line {stmt.line})" if stmt.line else ""
    return f"element {index} '{stmt.keyword}'{where}"


def _trace_support(
    bench: BenchFile, prep: Preparation, l_max: int
) -> None:
    """Symbolically propagate the set of occupiable |pol, l> modes through the chain.

    Raises CompileError naming the first element whose action would move an
    occupiable mode outside |l| <= l_max.
    """
    support = {(pol, l) for pol in (LEFT, RIGHT) for l in prep.oams}
    for index, stmt in enumerate(bench.elements, start=1):
        if isinstance(stmt, QPlateStmt):
            shift = int(2 * stmt.q)
            new_support = set()
            for pol, l in sorted(support):
                target = l + shift if pol == LEFT else l - shift
                flipped = RIGHT if pol == LEFT else LEFT
                if abs(target) > l_max:
                    raise CompileError(
                        f"truncation overflow at {_element_name(index, stmt)}: "
                        f"|{pol},{l:+d}> -> |{flipped},{target:+d}> leaves "
                        f"|l| <= {l_max}"
                    )
                new_support.add((flipped, target))
            support = new_support
        elif isinstance(stmt, HwpStmt):
            new_support = set()
            for pol, l in support:
                flipped = RIGHT if pol == LEFT else LEFT
                if stmt.aperture == el.APERTURE_FULL or l == 0:
                    new_support.add((flipped, l))
                elif stmt.crosstalk == 0.0:
                    new_support.add((pol, l))
                elif stmt.crosstalk == 1.0:
                    new_support.add((flipped, l))
                else:
                    new_support.add((pol, l))
                    new_support.add((flipped, l))
            support = new_support
        elif isinstance(stmt, DoveStmt):
            support = {(pol, -l) for pol, l in support}
        # lens: no effect on mode content


def _build_element(space: ModeSpace, index: int, stmt: ElementStmt) -> ElementOp:
    name = f"{stmt.keyword}[{index}]"
    if isinstance(stmt, QPlateStmt):
        return el.qplate(space, el.QPlateSpec(stmt.q, stmt.eta), label=name)
    if isinstance(stmt, HwpStmt):
        return el.hwp(
            space, el.WaveplateSpec(stmt.theta, stmt.aperture, stmt.crosstalk), label=name
        )
    if isinstance(stmt, DoveStmt):
        return el.dove_prism(space, el.DovePrismSpec(stmt.angle), label=name)
    return el.lens(space, label=name)


def compile_bench(bench: BenchFile, space: ModeSpace | None = None) -> CompiledBench:
    """Semantic validation plus construction of the executable chain."""
    l_max = space.l_max if space is not None else (
        bench.l_max if bench.l_max is not None else DEFAULT_L_MAX
    )
    prep = Preparation(
        axis=bench.polarizer if bench.polarizer is not None else "V",
        oams=bench.hologram if bench.hologram is not None else (0,),
    )
    if not prep.oams:
        raise CompileError("hologram needs at least one OAM value")
    if len(set(prep.oams)) != len(prep.oams):
        raise CompileError(f"hologram lists duplicate OAM values: {prep.oams}")
    for l in prep.oams:
        if abs(l) > l_max:
            raise CompileError(
                f"prepared OAM l={l:+d} exceeds the truncation |l| <= {l_max}"
            )
    # Validate element parameters before tracing, so range errors name elements.
    for index, stmt in enumerate(bench.elements, start=1):
        try:
            if isinstance(stmt, QPlateStmt):
                el.QPlateSpec(stmt.q, stmt.eta)
            elif isinstance(stmt, HwpStmt):
                el.WaveplateSpec(stmt.theta, stmt.aperture, stmt.crosstalk)
            elif isinstance(stmt, DoveStmt):
                el.DovePrismSpec(stmt.angle)
        except ValueError as exc:
            raise CompileError(f"{_element_name(index, stmt)}: {exc}") from exc
    _trace_support(bench, prep, l_max)
    mode_space = space if space is not None else make_space(l_max)
    ops = tuple(
        _build_element(mode_space, index, stmt)
        for index, stmt in enumerate(bench.elements, start=1)
    )
    return CompiledBench(mode_space, prep, ops, bench.measure)
