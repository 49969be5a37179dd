"""Strict key=value experiment configuration.

Text is a sequence of ``key=value`` tokens separated by blanks or newlines.
``# ...`` starts a comment and ``[name]`` opens a section.  Top-level keys are
either global (command, seed, out, tol_scale, jobs) or belong to the section of
the chosen command.  A ``[tolerances]`` section overrides named tolerances of
the acceptance checks.  Anything unknown is an error.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from fractions import Fraction

COMMANDS = ("profile", "sim", "verify", "collapse", "cusp", "report")


class ConfigError(ValueError):
    """Bad configuration; the message names the key and the line."""


def _where(line):
    return "command line" if line == 0 else f"line {line}"


# ---------------------------------------------------------------------------
# value types


def _int(text):
    return int(text)


def _float(text):
    v = float(text)
    if v != v:
        raise ValueError("nan is not allowed")
    return v


def _floats(text):
    return tuple(_float(t) for t in text.split(",") if t.strip())


def _ints(text):
    return tuple(int(t) for t in text.split(",") if t.strip())


def _bool(text):
    t = text.lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected true or false")


def _str(text):
    return text


def _unit_fraction(text) -> int:
    """'1/3', '0.5' or '1' -> the integer n with alpha = 1/n."""
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError("alpha must be 1/n for an integer n >= 1") from None
    if q > 0 and q.numerator == 1:
        return q.denominator
    if q > 0:
        inv = 1 / float(q)
        if abs(inv - round(inv)) < 1e-9 and round(inv) >= 1:
            return int(round(inv))
    raise ValueError(f"alpha must be 1/n for an integer n >= 1 (got {text})")


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    return parse


def _positive(parse):
    def check(text):
        v = parse(text)
        vals = v if isinstance(v, tuple) else (v,)
        if not all(x > 0 for x in vals):
            raise ValueError("must be positive")
        return v
    return check


# ---------------------------------------------------------------------------
# schemas: key -> (parser, default)

GLOBAL = {
    "command": (_choice(*COMMANDS), None),
    "seed": (_int, 0),
    "out": (_str, "out"),
    "tol_scale": (_positive(_float), 1.0),
    "jobs": (_positive(_int), 1),
}

SECTIONS = {
    "profile": {
        "branch": (_choice("smooth", "holder"), "smooth"),
        "n": (_positive(_int), 1),
        "alpha": (_unit_fraction, None),
        "terms": (_positive(_int), 8),
        "a": (_floats, (0.0,)),
        "N": (_positive(_int), 256),
        "map_scale": (_positive(_float), 1.0),
        "points": (_positive(_int), 401),
        "z_max": (_positive(_float), 10.0),
    },
    "sim": {
        "initial": (_choice("special", "toy_bump", "sine", "profile"), "special"),
        "wavenumber": (_positive(_int), 1),
        "a": (_floats, (0.0,)),
        "domain": (_choice("line", "circle"), "line"),
        "basis": (_choice("fourier", "chebyshev"), "fourier"),
        "model": (_choice("full", "toy"), "full"),
        "mode_count": (_positive(_int), 512),
        "map_scale": (_positive(_float), 1.0),
        "dt_initial": (_positive(_float), 1.0),
        "dt_controller": (_choice("fixed", "cfl"), "cfl"),
        "safety": (_positive(_float), 0.05),
        "t_max": (_positive(_float), 2.0),
        "blowup_threshold": (_positive(_float), None),
        "dealias_fraction": (_positive(_float), 2.0 / 3.0),
        "snapshot_times": (_floats, ()),
        "remap": (_bool, True),
        "terms": (_positive(_int), 8),
    },
    "verify": {
        "suite": (_choice("all", "identities", "exact", "series", "sim", "fast"), "all"),
        "criteria": (_ints, ()),
    },
    "collapse": {
        "a": (_floats, (0.05, -0.05)),
        "terms": (_positive(_int), 8),
        "N": (_positive(_int), 512),
        "reference_terms": (_positive(_int), 10),
        "reference_N": (_positive(_int), 768),
        "mode_count": (_positive(_int), 512),
        "safety": (_positive(_float), 0.01),
        "t_max": (_positive(_float), 0.9),
        "samples": (_positive(_int), 10),
    },
    "cusp": {
        "a": (_floats, (1.0, 1.5, 1.9)),
        "alpha": (_unit_fraction, 1),
        "mode_count": (_positive(_int), 256),
        "t_max": (_positive(_float), 1.0),
        "dt_initial": (_positive(_float), 0.01),
        "modes": (_positive(_int), 3),
        "amplitude": (_positive(_float), 0.3),
    },
    "report": {
        "input": (_str, None),
    },
}


@dataclass
class ExperimentConfig:
    command: str
    params: dict
    out: str = "out"
    seed: int = 0
    tol_scale: float = 1.0
    jobs: int = 1
    tolerances: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        """Every setting after defaults, as written to the manifest."""
        def plain(v):
            return list(v) if isinstance(v, tuple) else v
        return {"command": self.command, "out": self.out, "seed": self.seed,
                "tol_scale": self.tol_scale, "jobs": self.jobs,
                "params": {k: plain(v) for k, v in sorted(self.params.items())},
                "tolerances": dict(sorted(self.tolerances.items()))}


def _tokens(text, first_line=1):
    """Yield (line number, token) with comments removed; sections come back as '[name]'."""
    for k, raw in enumerate(text.splitlines(), first_line):
        lex = shlex.shlex(raw, posix=True)
        lex.whitespace_split = True
        lex.commenters = "#"
        try:
            for tok in lex:
                yield k, tok
        except ValueError as exc:
            raise ConfigError(f"{_where(k)}: {exc}") from None


def _raw_entries(text, first_line=1):
    section = None
    for line, tok in _tokens(text, first_line):
        if tok.startswith("[") and tok.endswith("]"):
            section = tok[1:-1].strip()
            if section not in SECTIONS and section != "tolerances":
                raise ConfigError(f"{_where(line)}: unknown section [{section}]")
            continue
        if "=" not in tok:
            raise ConfigError(f"{_where(line)}: expected key=value, got {tok!r}")
        key, value = tok.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"{_where(line)}: empty key")
        yield section, key, value.strip(), line


def parse_config(text: str, overrides=(), tolerance_names=None) -> ExperimentConfig:
    """Validate `text` (then `overrides`, a list of (key, value, line) tuples) into a config.

    tolerance_names, when given, is the set of keys allowed in [tolerances].
    """
    if tolerance_names is None:
        from .checks import TOLERANCES
        tolerance_names = TOLERANCES
    entries = list(_raw_entries(text))
    entries += [(sec, k, v, ln) for sec, k, v, ln in overrides]
    glob, sect, tols = {}, {}, {}
    for section, key, value, line in entries:
        if section is None and key in GLOBAL:
            glob[key] = (value, line)
        elif section == "tolerances":
            if key not in tolerance_names:
                raise ConfigError(f"{_where(line)}: unknown tolerance {key!r}")
            tols[key] = (value, line)
        else:
            sect[(section, key)] = (value, line)

    command = None
    if "command" in glob:
        value, line = glob["command"]
        try:
            command = GLOBAL["command"][0](value)
        except ValueError as exc:
            raise ConfigError(f"{_where(line)}: key 'command': {exc}") from None
    if command is None:
        raise ConfigError("no command given (profile, sim, verify, collapse, cusp or report)")

    out = {}
    for key, (parse, default) in GLOBAL.items():
        if key == "command":
            continue
        if key in glob:
            value, line = glob[key]
            try:
                out[key] = parse(value)
            except ValueError as exc:
                raise ConfigError(f"{_where(line)}: key {key!r}: {exc}") from None
        else:
            out[key] = default

    schema = SECTIONS[command]
    params = {k: d for k, (_, d) in schema.items()}
    for (section, key), (value, line) in sect.items():
        if section not in (None, command):
            raise ConfigError(f"{_where(line)}: section [{section}] does not apply to "
                              f"command {command!r}")
        if key not in schema:
            raise ConfigError(f"{_where(line)}: unknown key {key!r} for command {command!r}")
        try:
            params[key] = schema[key][0](value)
        except ValueError as exc:
            raise ConfigError(f"{_where(line)}: key {key!r}: {exc}") from None

    tolerances = {}
    for key, (value, line) in tols.items():
        try:
            tolerances[key] = _positive(_float)(value)
        except ValueError as exc:
            raise ConfigError(f"{_where(line)}: tolerance {key!r}: {exc}") from None

    _cross_check(command, params, sect)
    return ExperimentConfig(command, params, tolerances=tolerances, **out)


def _line_of(sect, key):
    for (_, k), (_, line) in sect.items():
        if k == key:
            return line
    return 0


def _cross_check(command, p, sect):
    if command == "profile":
        if p["alpha"] is not None:
            if any(k == "n" for _, k in sect) and p["n"] != p["alpha"]:
                raise ConfigError(f"{_where(_line_of(sect, 'alpha'))}: alpha and n disagree")
            p["n"] = p["alpha"]
        p.pop("alpha")
        if p["branch"] == "smooth" and p["n"] != 1:
            if any(k == "branch" for _, k in sect):
                raise ConfigError(f"{_where(_line_of(sect, 'n'))}: the smooth branch has n = 1")
            p["branch"] = "holder"
        if p["branch"] == "holder" and p["n"] < 2:
            raise ConfigError(f"{_where(_line_of(sect, 'n'))}: the Hoelder branch needs n >= 2")
    if command == "sim":
        if p["domain"] == "circle" and p["initial"] not in ("sine",):
            raise ConfigError(f"{_where(_line_of(sect, 'initial'))}: circle runs use initial=sine")
        if p["domain"] == "line" and p["initial"] == "sine":
            raise ConfigError(f"{_where(_line_of(sect, 'initial'))}: initial=sine needs domain=circle")
        if not 0 < p["dealias_fraction"] <= 1:
            raise ConfigError(f"{_where(_line_of(sect, 'dealias_fraction'))}: key 'dealias_fraction' "
                              "must lie in (0, 1]")
        if not 0 < p["safety"] <= 1:
            raise ConfigError(f"{_where(_line_of(sect, 'safety'))}: key 'safety' must lie in (0, 1]")
        if p["mode_count"] % 2 or p["mode_count"] < 8:
            raise ConfigError(f"{_where(_line_of(sect, 'mode_count'))}: key 'mode_count' must be "
                              "even and at least 8")
    if command == "cusp":
        n = p["alpha"]
        if any(a * (1.0 / n) / 2 >= 1 or a >= 2 for a in p["a"]):
            raise ConfigError(f"{_where(_line_of(sect, 'a'))}: cusp runs need a < 2")
    if command == "collapse":
        if not p["t_max"] < 1:
            raise ConfigError(f"{_where(_line_of(sect, 't_max'))}: key 't_max' must be below "
                              "the blow-up time 1")
    if command == "report" and not p["input"]:
        raise ConfigError("report needs input=<directory of a previous run>")
