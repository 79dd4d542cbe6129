"""Built-in models, the text model format, pairs and invariant schemas.

Model format, one statement per line, ``#`` starts a comment::

    model s4
    truncate 8
    gen a 4 1        # name, degree, optional weight
    gen b 7 2
    d b = a^2

Generators are listed in introduction order; ``d`` lines may appear
anywhere after the generators they mention.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from .algebra import DEFAULT_TRUNCATION, Element, FreeCDGA, Generator, check_cdga
from .errors import ParseError, UnknownSchema, ValidationError
from .homotopy import DGAMap

TRUNCATION_ENV = "CDGAMAPS_TRUNCATION"


def default_truncation() -> int:
    raw = os.environ.get(TRUNCATION_ENV)
    if raw is None:
        return DEFAULT_TRUNCATION
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"{TRUNCATION_ENV} must be an integer, got {raw!r}")
    if value < 1:
        raise ValidationError(f"{TRUNCATION_ENV} must be positive")
    return value


@dataclass
class NamedModel:
    identifier: str
    algebra: FreeCDGA
    note: str = ""

    @property
    def stages(self) -> List[List[str]]:
        return self.algebra.stages()

    @property
    def weights(self) -> Dict[str, Optional[int]]:
        return {g.name: g.weight for g in self.algebra.generators}

    def to_dict(self) -> dict:
        alg = self.algebra
        return {
            "id": self.identifier,
            "truncation": alg.truncation,
            "generators": [{"name": g.name, "degree": g.degree, "weight": g.weight}
                           for g in alg.generators],
            "differential": {g.name: str(alg.d_gen(g.name)) for g in alg.generators
                             if alg.raw_diff(g.name)},
            "stages": self.stages,
            "note": self.note,
        }


# -- text format ------------------------------------------------------------------------

def load_model(text: str, identifier: Optional[str] = None) -> NamedModel:
    name = identifier
    truncation = None
    minimal = False
    gens: List[Generator] = []
    diffs: Dict[str, Tuple[str, int]] = {}
    note_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if raw.strip().startswith("#") and raw.strip()[1:].strip():
            note_lines.append(raw.strip()[1:].strip())
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "model":
            if not rest or " " in rest:
                raise ParseError("expected 'model <id>'", lineno)
            name = name or rest
        elif head == "truncate":
            try:
                truncation = int(rest)
            except ValueError:
                raise ParseError(f"bad truncation {rest!r}", lineno)
            if truncation < 1:
                raise ValidationError(f"line {lineno}: truncation must be positive")
        elif head == "minimal":
            minimal = True
        elif head == "gen":
            parts = rest.split()
            if len(parts) not in (2, 3):
                raise ParseError("expected 'gen <name> <degree> [weight]'", lineno)
            try:
                deg = int(parts[1])
                weight = int(parts[2]) if len(parts) == 3 else None
            except ValueError:
                raise ParseError(f"non-integer degree or weight in {rest!r}", lineno)
            try:
                gens.append(Generator(parts[0], deg, weight))
            except ValidationError as exc:
                raise ValidationError(f"line {lineno}: {exc}") from None
        elif head == "d":
            lhs, eq, rhs = rest.partition("=")
            lhs = lhs.strip()
            if not eq or not lhs or not rhs.strip():
                raise ParseError("expected 'd <name> = <polynomial>'", lineno)
            if lhs in diffs:
                raise ParseError(f"second differential for {lhs}", lineno)
            diffs[lhs] = (rhs.strip(), lineno)
        else:
            raise ParseError(f"unknown statement {head!r}", lineno)
    if not name:
        raise ParseError("missing 'model <id>' line")
    if truncation is None:
        truncation = default_truncation()
    names = {g.name for g in gens}
    if len(names) != len(gens):
        raise ValidationError("duplicate generator names")
    shell = FreeCDGA(gens, {}, truncation=truncation, validate=False)
    parsed = {}
    from .algebra import parse_terms
    for lhs, (rhs, lineno) in diffs.items():
        if lhs not in names:
            raise ParseError(f"differential for unknown generator {lhs!r}", lineno)
        try:
            parsed[lhs] = parse_terms(shell, rhs)
        except ParseError as exc:
            raise ParseError(str(exc), lineno) from None
    alg = FreeCDGA(gens, parsed, truncation=truncation, minimal=minimal, validate=False, name=name)
    problems = check_cdga(alg)
    if problems:
        raise ValidationError("; ".join(problems))
    return NamedModel(name, alg, " ".join(note_lines))


def dump_model(model: NamedModel) -> str:
    alg = model.algebra
    lines = [f"model {model.identifier}", f"truncate {alg.truncation}"]
    if alg.minimal:
        lines.append("minimal")
    for g in alg.generators:
        lines.append(f"gen {g.name} {g.degree}" + (f" {g.weight}" if g.weight is not None else ""))
    for g in alg.generators:
        raw = alg.raw_diff(g.name)
        if raw:
            lines.append(f"d {g.name} = {Element._make(alg, raw)}")
    return "\n".join(lines) + "\n"


# -- built-ins ----------------------------------------------------------------------------

_SOURCES = {
    "s3": """model s3
truncate 8
gen x 3 1
""",
    "s4": """model s4
truncate 8
gen a 4 1
gen b 7 2
d b = a^2
""",
    "s7": """model s7
truncate 8
gen v 7 1
""",
    "s2": """model s2
truncate 8
gen a 2 1
gen b 3 2
d b = a^2
""",
    "s3xs4": """model s3xs4
truncate 8
gen x 3 1
gen y 4 1
gen z 7 2
d z = y^2
""",
    # higher-degree generators of the wedge only matter above degree 8
    "s3x(s4vs4)": """model s3x(s4vs4)
truncate 8
gen x 3 1
gen y1 4 1
gen y2 4 1
gen z11 7 2
gen z12 7 2
gen z22 7 2
d z11 = y1^2
d z12 = y1*y2
d z22 = y2^2
""",
}

_NOTES = {
    "s3": "3-sphere",
    "s4": "4-sphere",
    "s7": "7-sphere",
    "s2": "2-sphere",
    "s3xs4": "product of a 3-sphere and a 4-sphere",
    "s3x(s4vs4)": "3-sphere times a wedge of two 4-spheres, through degree 8",
}

_CACHE: Dict[str, NamedModel] = {}


def model(identifier: str) -> NamedModel:
    if identifier not in _SOURCES:
        raise KeyError(f"unknown model {identifier!r}; known: {sorted(_SOURCES)}")
    hit = _CACHE.get(identifier)
    if hit is None:
        hit = load_model(_SOURCES[identifier])
        hit.note = _NOTES[identifier]
        _CACHE[identifier] = hit
    return hit


def model_source(identifier: str) -> str:
    return _SOURCES[identifier]


def model_ids() -> List[str]:
    return list(_SOURCES)


def fattened(alg: FreeCDGA, degrees=(3, 6)) -> FreeCDGA:
    """alg with acyclic pairs u_n, w_(n+1), du = w, appended (same homotopy type)."""
    gens = []
    diff = {}
    for n in degrees:
        w, u = f"w{n + 1}", f"u{n}"
        if w in alg.index or u in alg.index:
            raise ValidationError(f"names {u}, {w} already used")
        gens += [Generator(w, n + 1), Generator(u, n)]
        diff[u] = w
    return alg.extend(gens, diff)


# -- pairs and schemas -------------------------------------------------------------------

@dataclass
class MappingClassSchema:
    name: str
    invariants: List[str]
    modulus: Callable
    description: str = ""
    realizable: Callable = field(default=lambda inv: True)

    def canonical(self, inv: Tuple[int, ...]) -> Tuple[int, ...]:
        m = self.modulus(inv)
        if not m:
            return tuple(inv)
        return tuple(inv[:-1]) + (inv[-1] % m,)


def _hopf_modulus(inv):
    d = inv[0]
    return 2 * abs(d) if d else None


def _cs2_modulus(inv):
    d1, d2 = inv[0], inv[1]
    g = math.gcd(d1, d2)
    return 2 * g if g else None


SCHEMAS: Dict[str, MappingClassSchema] = {
    "s4->s3xs4": MappingClassSchema(
        "s4->s3xs4", ["d", "h"], _hopf_modulus,
        "degree on the 4-sphere factor and Hopf invariant, h taken modulo 2|d| when d != 0"),
    "s4->s3x(s4vs4)": MappingClassSchema(
        "s4->s3x(s4vs4)", ["alpha1", "alpha2", "beta1", "beta2"], lambda inv: None,
        "degrees alpha on the two 4-spheres and the degree-7 coefficients beta; beta is "
        "identified along the line spanned by alpha"),
    "hopf-pair": MappingClassSchema(
        "hopf-pair", ["h"], lambda inv: None, "Hopf invariant of a map from the 3-sphere to the 2-sphere"),
    "s4->s4": MappingClassSchema("s4->s4", ["d"], lambda inv: None, "degree"),
    "s3->s3xs4": MappingClassSchema("s3->s3xs4", ["d"], lambda inv: None, "degree on the 3-sphere factor"),
    "s7->s3xs4": MappingClassSchema("s7->s3xs4", ["d"], lambda inv: None, "degree on the top cell"),
    "cs2-schema": MappingClassSchema(
        "cs2-schema", ["d1", "d2", "h"], _cs2_modulus,
        "maps from the connected sum of two copies of S3xS4 to S4: degrees d1, d2 on the two "
        "4-dimensional classes and a Hopf invariant h modulo 2 gcd(d1, d2)"),
}


@dataclass
class ModelPair:
    """DGA maps from the model of Y (source) to the model of X (target)."""

    identifier: str
    source_id: str
    target_id: str
    readout: List[Tuple[str, int]]  # (generator, harmonic index) per invariant

    @property
    def source(self) -> FreeCDGA:
        return model(self.source_id).algebra

    @property
    def target(self) -> FreeCDGA:
        return model(self.target_id).algebra

    @property
    def schema(self) -> MappingClassSchema:
        return SCHEMAS[self.identifier]


PAIRS: Dict[str, ModelPair] = {
    "s4->s3xs4": ModelPair("s4->s3xs4", "s4", "s3xs4", [("a", 0), ("b", 0)]),
    "s4->s3x(s4vs4)": ModelPair("s4->s3x(s4vs4)", "s4", "s3x(s4vs4)",
                                [("a", 0), ("a", 1), ("b", 0), ("b", 1)]),
    "hopf-pair": ModelPair("hopf-pair", "s2", "s3", [("b", 0)]),
    "s4->s4": ModelPair("s4->s4", "s4", "s4", [("a", 0)]),
    "s3->s3xs4": ModelPair("s3->s3xs4", "s3", "s3xs4", [("x", 0)]),
    "s7->s3xs4": ModelPair("s7->s3xs4", "s7", "s3xs4", [("v", 0)]),
}


def pair(identifier: str) -> ModelPair:
    if identifier not in PAIRS:
        raise UnknownSchema(f"unknown model pair {identifier!r}; known: {sorted(PAIRS)}")
    return PAIRS[identifier]


def classify_map(pair_id: str, phi: DGAMap, W=None) -> Dict[str, Fraction]:
    """Invariants of phi read off from its homotopic representative in Q[W]."""
    from .obstruction import construct_W, homotope_into_W, w_coordinates

    if pair_id not in PAIRS:
        raise UnknownSchema(f"no schema for {pair_id!r}")
    P = PAIRS[pair_id]
    if W is None:
        W = construct_W(phi.target, phi.source)
    psi, _, _ = homotope_into_W(phi, W)
    stage_of = {name: k for k, names in enumerate(psi.source.stages()) for name in names}
    out = {}
    for inv, (gen, idx) in zip(P.schema.invariants, P.readout):
        st = W.stages[stage_of[gen]]
        harmonic = w_coordinates(st, psi.images[gen])[len(st.S):]
        out[inv] = harmonic[idx] if idx < len(harmonic) else Fraction(0)
    return out


def example2_map(target: FreeCDGA, alpha, beta) -> DGAMap:
    """a -> alpha.y, b -> sum alpha_i alpha_j z_ij + beta.(x y) on the S3x(S4vS4) model."""
    S4 = model("s4").algebra
    a1, a2 = alpha
    b1, b2 = beta
    y1, y2 = target.gen("y1"), target.gen("y2")
    x = target.gen("x")
    img_a = y1.scale(a1) + y2.scale(a2)
    img_b = (target.gen("z11").scale(a1 * a1) + target.gen("z12").scale(2 * a1 * a2)
             + target.gen("z22").scale(a2 * a2) + (x * y1).scale(b1) + (x * y2).scale(b2))
    return DGAMap(S4, target, {"a": img_a, "b": img_b})


def example1_map(d: int, h: int) -> DGAMap:
    """a -> d y, b -> d^2 z + h x y on the S3xS4 model."""
    S4 = model("s4").algebra
    X = model("s3xs4").algebra
    return DGAMap(S4, X, {"a": X.gen("y").scale(d),
                          "b": X.gen("z").scale(d * d) + (X.gen("x") * X.gen("y")).scale(h)})
