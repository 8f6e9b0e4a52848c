"""Family files: ``key = value`` lines describing a hypersurface and the eigencomponent to study.

Example::

    # Fermat sextic fourfold, anti-invariant part under x0, x1 -> -x0, -x1
    vars = 6
    degree = 6
    f = x0^6 + x1^6 + x2^6 + x3^6 + x4^6 + x5^6
    group_order = 2
    weights = 1,1,0,0,0,0
    character = 1

Leading ``#`` lines are kept as a header; other comments and blank lines are
dropped. :func:`serialize` writes keys in a fixed order, so a file already in
canonical form survives a parse/serialize round trip byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .equivariant import DiagonalAction
from .errors import HodgeCertError, ParseError
from .hodge import FamilySpec
from .linalg import CertPolicy
from .poly import format_polynomial, parse_polynomial

KEY_ORDER = ("vars", "degree", "f", "group_order", "weights", "character", "residue_twist", "k",
             "tangent_degree", "tangent_character", "seed", "primes", "exact_fallback")
REQUIRED = ("vars", "degree", "f")
INT_KEYS = ("vars", "degree", "group_order", "character", "residue_twist", "k",
            "tangent_degree", "tangent_character", "seed", "primes")


@dataclass
class FamilyFile:
    num_vars: int
    degree: int
    f: object
    group_order: int = 1
    weights: tuple | None = None
    character: int = 0
    residue_twist: int = 0
    k: int | None = None
    tangent_degree: int | None = None
    tangent_character: int = 0
    seed: int = 0
    primes: int = 2
    exact_fallback: bool = True
    header: list = field(default_factory=list)
    present: tuple = ()
    name: str = ""

    def action(self):
        if self.weights is None:
            return DiagonalAction.trivial(self.num_vars)
        return DiagonalAction(self.group_order, self.weights)

    def to_spec(self, **overrides):
        """Build the :class:`FamilySpec`; ``None`` overrides are ignored."""
        kw = dict(f=self.f, action=self.action(), character=self.character, k=self.k,
                  residue_twist=self.residue_twist, tangent_degree=self.tangent_degree,
                  tangent_character=self.tangent_character, name=self.name)
        kw.update({key: v for key, v in overrides.items() if v is not None})
        return FamilySpec(**kw)

    def policy(self, **overrides):
        kw = dict(num_primes=self.primes, exact_fallback=self.exact_fallback, seed=self.seed)
        kw.update({key: v for key, v in overrides.items() if v is not None})
        return CertPolicy(**kw)


def _int(key, value):
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"{key}: expected an integer, got {value!r}", key) from None


def _bool(key, value):
    low = value.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ParseError(f"{key}: expected true or false, got {value!r}", key)


def parse(text, name=""):
    """Parse family-file text; errors name the offending key."""
    raw, header, seen_body = {}, [], False
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if stripped.startswith("#"):
            if not seen_body:
                header.append(stripped)
            continue
        if not stripped:
            continue
        seen_body = True
        if "=" not in stripped:
            raise ParseError(f"line {lineno}: expected 'key = value'", None)
        key, value = (s.strip() for s in stripped.split("=", 1))
        if key not in KEY_ORDER:
            raise ParseError(f"line {lineno}: unknown key {key!r}", key)
        if key in raw:
            raise ParseError(f"line {lineno}: duplicate key {key!r}", key)
        if not value:
            raise ParseError(f"{key}: empty value", key)
        raw[key] = value
    for key in REQUIRED:
        if key not in raw:
            raise ParseError(f"missing required key {key!r}", key)

    vals = {key: _int(key, raw[key]) for key in INT_KEYS if key in raw}
    if vals["vars"] < 2:
        raise ParseError("vars: need at least 2 variables", "vars")
    if vals["degree"] < 2:
        raise ParseError("degree: need degree at least 2", "degree")
    try:
        f = parse_polynomial(raw["f"], vals["vars"])
    except HodgeCertError as exc:
        raise ParseError(f"f: {exc}", "f") from None
    if f.is_zero() or not f.is_homogeneous() or f.degree != vals["degree"]:
        raise ParseError(f"f: not a nonzero form of degree {vals['degree']}", "f")

    weights = None
    if "weights" in raw:
        try:
            weights = tuple(int(w) for w in raw["weights"].split(","))
        except ValueError:
            raise ParseError(f"weights: expected a comma list of integers, got {raw['weights']!r}",
                             "weights") from None
        if len(weights) != vals["vars"]:
            raise ParseError(f"weights: {len(weights)} weights for {vals['vars']} variables", "weights")
    order = vals.get("group_order", 1)
    if order < 1:
        raise ParseError("group_order: must be positive", "group_order")
    if order > 1 and weights is None:
        raise ParseError("weights: required when group_order > 1", "weights")
    if vals.get("primes", 2) < 1:
        raise ParseError("primes: must be positive", "primes")
    ff = FamilyFile(
        num_vars=vals["vars"], degree=vals["degree"], f=f, group_order=order, weights=weights,
        character=vals.get("character", 0), residue_twist=vals.get("residue_twist", 0),
        k=vals.get("k"), tangent_degree=vals.get("tangent_degree"),
        tangent_character=vals.get("tangent_character", 0), seed=vals.get("seed", 0),
        primes=vals.get("primes", 2),
        exact_fallback=_bool("exact_fallback", raw["exact_fallback"]) if "exact_fallback" in raw else True,
        header=header, present=tuple(k for k in KEY_ORDER if k in raw), name=name)
    try:
        ff.to_spec()
    except ValueError as exc:
        raise ParseError(f"k: {exc}", "k") from None
    return ff


def serialize(ff):
    out = list(ff.header)
    values = {
        "vars": ff.num_vars, "degree": ff.degree, "f": format_polynomial(ff.f),
        "group_order": ff.group_order,
        "weights": ",".join(str(w) for w in ff.weights) if ff.weights is not None else None,
        "character": ff.character, "residue_twist": ff.residue_twist, "k": ff.k,
        "tangent_degree": ff.tangent_degree, "tangent_character": ff.tangent_character,
        "seed": ff.seed, "primes": ff.primes,
        "exact_fallback": "true" if ff.exact_fallback else "false",
    }
    keys = set(ff.present) | set(REQUIRED)
    if ff.weights is not None:
        keys |= {"group_order", "weights"}
    for key in KEY_ORDER:
        if key in keys and values[key] is not None:
            out.append(f"{key} = {values[key]}")
    return "\n".join(out) + "\n"


def load(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", None) from None
    return parse(text, name=path.stem)


def bundled_names():
    root = resources.files("hodgecert") / "families"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".fam"))


def bundled_text(name):
    name = name[:-4] if name.endswith(".fam") else name
    return (resources.files("hodgecert") / "families" / f"{name}.fam").read_text()


def load_bundled(name):
    name = name[:-4] if name.endswith(".fam") else name
    return parse(bundled_text(name), name=name)


def resolve(path_or_name):
    """A filesystem path, or the name of a bundled family."""
    p = Path(path_or_name)
    if p.exists():
        return load(p)
    stem = p.name[:-4] if p.name.endswith(".fam") else p.name
    if stem in bundled_names():
        return load_bundled(stem)
    raise ParseError(f"no such family file: {path_or_name}", None)
