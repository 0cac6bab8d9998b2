"""
Coefficient config files and run settings.

A config is plain ``key = value`` text, one setting per line (several settings
may share a line when separated by commas, e.g. ``K11 = 1 + x1, K22 = 1 + x1``).
``#`` starts a comment. Recognized keys::

    name      = my-field
    dimension = 2
    domain    = disk | square | box -0.5:0.5 -0.5:0.5
    K11       = 1 + 1/2*x1^2          # polynomial entries, rational literals
    K12       = 0                     # missing off-diagonals are 0, K21 mirrors K12
    bounds    = 1/2, 3                # ellipticity bounds (default: 1e-10, inf)
    y         = 0, 0                  # optional run settings, overridden by flags
    l         = 1
    grid      = 129

Polynomials accept + - * / ^, parentheses, integer/decimal/rational literals
and the variables x1..xn; division is only by constants.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .parametrix import PRESETS, CoefficientSpec, Domain, preset
from .symbolic import GradedFunction, format_scalar, mul_poly

RUN_KEYS = ("y", "l", "grid", "backend", "tol")
COMMANDS = ("expand", "green", "robin", "verify", "selftest")
BACKENDS = ("auto", "exact", "float")
MIN_GRID = 33


class ConfigError(ValueError):
    """Problem in a config file or run setting; ``line``/``column`` are 1-based."""

    def __init__(self, message, line=None, column=None):
        self.line, self.column = line, column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


# --------------------------------------------------------------------------
# polynomial parser
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<var>x\d+)|(?P<op>[-+*/^()]))")


class _PolyParser:
    """Recursive descent: expr := term (+|- term)*; term := unary (*|/ unary)*;
    unary := (+|-) unary | power; power := atom (^ int)?; atom := num | var | (expr)."""

    def __init__(self, text, dim, line=1, col0=1):
        self.text, self.dim, self.line, self.col0 = text, dim, line, col0
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                bad = len(text[:pos]) + len(text[pos:]) - len(text[pos:].lstrip())
                raise self._error(f"unexpected character {text[bad]!r}", bad)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def _error(self, msg, offset=None):
        if offset is None:
            offset = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
        return ConfigError(msg, self.line, self.col0 + offset)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise self._error("empty polynomial")
        out = self.expr()
        if self.i != len(self.tokens):
            raise self._error(f"unexpected {self.peek()[1]!r}")
        return out

    def expr(self):
        out = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.unary()
        while self.peek()[1] in ("*", "/"):
            _, op, where = self.take()
            rhs = self.unary()
            if op == "*":
                out = mul_poly(out, rhs)
            else:
                if len(rhs) > 1 or (rhs and rhs.max_order() > 0) or not rhs:
                    raise self._error("division only by a nonzero constant", where)
                out = out.scale(1 / Fraction(rhs.coeff((0,) * self.dim)))
        return out

    def unary(self):
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            val = self.unary()
            return -val if op == "-" else val
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, val, where = self.take()
            if kind != "num" or not val.isdigit():
                raise self._error("exponent must be a non-negative integer", where)
            out = GradedFunction.constant(self.dim)
            for _ in range(int(val)):
                out = mul_poly(base, out)
            return out
        return base

    def atom(self):
        kind, val, where = self.take()
        if kind == "num":
            return GradedFunction.constant(self.dim, Fraction(val))
        if kind == "var":
            k = int(val[1:])
            if not 1 <= k <= self.dim:
                raise self._error(f"variable {val} outside x1..x{self.dim}", where)
            return GradedFunction.variable(self.dim, k - 1)
        if val == "(":
            out = self.expr()
            if self.take()[1] != ")":
                raise self._error("missing ')'")
            return out
        if kind is None:
            raise self._error("unexpected end of polynomial")
        raise self._error(f"unexpected {val!r}", where)


def parse_polynomial(text, dim, line=1, column=1) -> GradedFunction:
    return _PolyParser(text, dim, line, column).parse()


def format_polynomial(p: GradedFunction) -> str:
    """Canonical text of a polynomial, inverse of :func:`parse_polynomial`."""
    p = p.expand_radial()
    if not p:
        return "0"
    parts = []
    for t in sorted(p, key=lambda t: (t.order, tuple(-a for a in t.alpha))):
        c = Fraction(t.coeff)
        mono = "*".join((f"x{k + 1}" if a == 1 else f"x{k + 1}^{a}")
                        for k, a in enumerate(t.alpha) if a)
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{format_scalar(mag)}*{mono}"
        else:
            body = format_scalar(mag)
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


# --------------------------------------------------------------------------
# config files
# --------------------------------------------------------------------------

@dataclass
class RunConfig:
    command: str = "expand"
    spec_path: Optional[str] = None
    preset: Optional[str] = None
    y: Optional[tuple] = None
    l: int = 1
    grid: int = 129
    out: str = "greenexp-out"
    backend: str = "auto"
    tol: float = 1e-10
    suite: str = "all"
    dimension: int = 2

    def validate(self, spec: CoefficientSpec = None, need_y=False):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.l < 0:
            raise ConfigError(f"order l must be >= 0, got {self.l}")
        if self.grid < MIN_GRID:
            raise ConfigError(f"grid resolution must be >= {MIN_GRID}, got {self.grid}")
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}")
        if not self.tol > 0:
            raise ConfigError("tolerance must be positive")
        if need_y:
            if self.y is None:
                raise ConfigError("a base point --y is required")
            if spec is not None:
                if len(self.y) != spec.dim:
                    raise ConfigError(f"--y has {len(self.y)} coordinates, expected {spec.dim}")
                import numpy as np
                if not spec.domain.contains(np.array([[float(v) for v in self.y]]))[0]:
                    raise ConfigError(f"base point {self.y_text()} is outside the domain")
        return self

    def y_text(self):
        return "(" + ", ".join(format_scalar(v) for v in self.y) + ")" if self.y else "-"


def parse_point(text, line=None, column=None):
    try:
        return tuple(Fraction(v.strip()) for v in str(text).split(","))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad point {text!r}", line, column) from None


def _parse_domain(text, dim, line, col):
    words = text.split()
    if not words:
        raise ConfigError("empty domain", line, col)
    kind = words[0].lower()
    if kind == "disk" and len(words) == 1:
        return Domain.unit_disk(dim)
    if kind == "square" and len(words) == 1:
        return Domain.unit_square(dim)
    if kind == "box" and len(words) == dim + 1:
        try:
            pairs = [tuple(float(Fraction(v)) for v in w.split(":")) for w in words[1:]]
            return Domain.box([a for a, _ in pairs], [b for _, b in pairs])
        except ValueError as exc:
            raise ConfigError(f"bad box bounds: {exc}", line, col) from None
    raise ConfigError(f"domain must be 'disk', 'square' or 'box a:b ...' ({dim} ranges)",
                      line, col)


def _parse_bounds(text, line, col):
    vals = [v.strip() for v in text.split(",")]
    if len(vals) != 2:
        raise ConfigError("bounds need two values", line, col)
    try:
        lo, hi = (math.inf if v.lower() == "inf" else float(Fraction(v)) for v in vals)
    except ValueError:
        raise ConfigError(f"bad bounds {text!r}", line, col) from None
    if not 0 < lo <= hi:
        raise ConfigError("bounds must satisfy 0 < lower <= upper", line, col)
    return lo, hi


_SPLIT = re.compile(r",(?=\s*[A-Za-z_]\w*\s*=)")
_ENTRY = re.compile(r"^K(\d)(\d)$")


def _statements(text):
    """(key, value, line, value_column) for every setting."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        offset = 0
        for chunk in _SPLIT.split(body):
            start = offset
            offset += len(chunk) + 1
            if not chunk.strip():
                continue
            if "=" not in chunk:
                col = start + len(chunk) - len(chunk.lstrip()) + 1
                raise ConfigError("expected 'key = value'", lineno, col)
            key, value = chunk.split("=", 1)
            vcol = start + len(key) + 1 + (len(value) - len(value.lstrip())) + 1
            yield key.strip(), value.strip(), lineno, vcol


def parse_config(text, validate=True):
    """Parse config text into (CoefficientSpec, run settings dict)."""
    stmts = list(_statements(text))
    seen = {}
    for key, value, line, col in stmts:
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", line, 1)
        seen[key] = (value, line, col)
    if "dimension" in seen:
        value, line, col = seen["dimension"]
        try:
            dim = int(value)
        except ValueError:
            raise ConfigError(f"dimension must be an integer, got {value!r}", line, col) from None
    else:
        dim = 2
    if not 2 <= dim <= 8:
        raise ConfigError(f"dimension {dim} outside 2..8")
    domain = Domain.unit_disk(dim)
    if "domain" in seen:
        domain = _parse_domain(*seen["domain"][:1], dim, *seen["domain"][1:])
    bounds = (1e-10, math.inf)
    if "bounds" in seen:
        bounds = _parse_bounds(*seen["bounds"])
    name = seen.get("name", ("custom",))[0]

    entries = [[None] * dim for _ in range(dim)]
    run = {}
    for key, value, line, col in stmts:
        m = _ENTRY.match(key)
        if m:
            i, j = int(m.group(1)) - 1, int(m.group(2)) - 1
            if not (0 <= i < dim and 0 <= j < dim):
                raise ConfigError(f"entry {key} outside a {dim}x{dim} matrix", line, 1)
            entries[i][j] = (parse_polynomial(value, dim, line, col), line)
        elif key in RUN_KEYS:
            run[key] = _parse_run_value(key, value, line, col)
        elif key not in ("dimension", "domain", "bounds", "name"):
            raise ConfigError(f"unknown key {key!r}", line, 1)

    zero = GradedFunction.zero(dim)
    K = [[zero] * dim for _ in range(dim)]
    for i in range(dim):
        if entries[i][i] is None:
            raise ConfigError(f"missing diagonal entry K{i + 1}{i + 1}")
        K[i][i] = entries[i][i][0]
        for j in range(i + 1, dim):
            a, b = entries[i][j], entries[j][i]
            if a and b and not a[0].equals(b[0]):
                raise ConfigError(f"K is not symmetric: K{i + 1}{j + 1} != K{j + 1}{i + 1}",
                                  b[1], 1)
            val = (a or b or (zero,))[0]
            K[i][j] = K[j][i] = val
    spec = CoefficientSpec(dim, tuple(tuple(r) for r in K), domain, bounds, name)
    if validate:
        spec.validate()
    return spec, run


def _parse_run_value(key, value, line, col):
    try:
        if key == "y":
            return parse_point(value, line, col)
        if key in ("l", "grid"):
            return int(value)
        if key == "tol":
            return float(value)
        if key == "backend":
            if value not in BACKENDS:
                raise ValueError
            return value
    except ValueError:
        raise ConfigError(f"bad value {value!r} for {key}", line, col) from None
    raise ConfigError(f"unknown key {key!r}", line, 1)


def serialize_spec(spec: CoefficientSpec) -> str:
    """Config text for a spec (upper triangle of K); stable under round trip."""
    lines = [f"name = {spec.name}", f"dimension = {spec.dim}",
             f"domain = {spec.domain.describe()}"]
    lo, hi = spec.bounds
    lines.append(f"bounds = {_num_text(lo)}, {_num_text(hi)}")
    for i in range(spec.dim):
        for j in range(i, spec.dim):
            if i == j or spec.entries[i][j]:
                lines.append(f"K{i + 1}{j + 1} = {format_polynomial(spec.entries[i][j])}")
    return "\n".join(lines) + "\n"


def _num_text(v):
    if math.isinf(v):
        return "inf"
    return format_scalar(Fraction(repr(float(v))))


def load_spec(path=None, preset_name=None, dim=2, validate=True):
    """Spec from a config file or a preset name; returns (spec, run settings)."""
    if (path is None) == (preset_name is None):
        raise ConfigError("give exactly one of --spec or --preset")
    if preset_name is not None:
        if preset_name not in PRESETS:
            raise ConfigError(f"unknown preset {preset_name!r}; choose from {', '.join(PRESETS)}")
        spec = preset(preset_name, dim)
        return (spec.validate() if validate else spec), {}
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, validate)
