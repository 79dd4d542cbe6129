"""Free graded-commutative algebras over Q with a differential.

Monomials are dense exponent tuples indexed by generator position, so an
algebra on the first ``m`` generators of another embeds by zero padding.
Signs follow the Koszul rule with generators ordered by introduction, and
``d`` is a left derivation: d(uv) = du.v + (-1)^|u| u.dv.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import (
    DegreeOutOfRange,
    MissingWeights,
    MixedAlgebra,
    ParseError,
    ValidationError,
    WeightInhomogeneousDifferential,
)

Monomial = tuple  # tuple[int, ...], one exponent per generator
Scalar = Union[int, Fraction]

DEFAULT_TRUNCATION = 8


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    weight: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.degree, int) or self.degree < 1:
            raise ValidationError(f"generator {self.name!r} has degree {self.degree}; need >= 1")
        if self.weight is not None and self.weight < 1:
            raise ValidationError(f"generator {self.name!r} has non-positive weight {self.weight}")
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", self.name):
            raise ValidationError(f"bad generator name {self.name!r}")


class FreeCDGA:
    """Finitely generated free CDGA, truncated above ``truncation``.

    ``diff`` maps generator names to polynomials (strings, Elements or raw
    ``{monomial: coefficient}`` dicts); absent names are closed.
    """

    def __init__(
        self,
        generators: Sequence[Generator],
        diff: Optional[Mapping[str, object]] = None,
        truncation: int = DEFAULT_TRUNCATION,
        minimal: bool = False,
        validate: bool = True,
        name: Optional[str] = None,
    ):
        self.generators = tuple(generators)
        self.name = name
        self.truncation = int(truncation)
        self.minimal = minimal
        if self.truncation < 0:
            raise ValidationError("truncation degree must be nonnegative")
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate generator names in {names}")
        self.index = {g.name: i for i, g in enumerate(self.generators)}
        self.degrees = tuple(g.degree for g in self.generators)
        self.odd = tuple(i for i, g in enumerate(self.generators) if g.degree % 2)
        self._oddmask = tuple(g.degree % 2 == 1 for g in self.generators)
        self._mul_cache = {}
        self._d_cache = {}
        self._basis_cache = {}
        self._variants = {}
        raw = []
        diff = dict(diff or {})
        unknown = set(diff) - set(names)
        if unknown:
            raise ValidationError(f"differential given for unknown generators {sorted(unknown)}")
        for g in self.generators:
            raw.append(self._raw_terms(diff.get(g.name)))
        self._diff = tuple(raw)
        self._key = (
            tuple((g.name, g.degree, g.weight) for g in self.generators),
            tuple(tuple(sorted(t.items())) for t in self._diff),
            self.truncation,
        )
        self._hash = hash(self._key)
        if validate:
            problems = check_cdga(self)
            if problems:
                raise ValidationError("; ".join(problems))

    # -- identity -------------------------------------------------------
    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FreeCDGA):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        gens = ", ".join(f"{g.name}^({g.degree})" for g in self.generators)
        label = f"{self.name}: " if self.name else ""
        return f"<FreeCDGA {label}<{gens}> trunc={self.truncation}>"

    @property
    def ngens(self) -> int:
        return len(self.generators)

    # -- monomial arithmetic --------------------------------------------
    def mono_degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def unit_monomial(self) -> Monomial:
        return (0,) * self.ngens

    def gen_monomial(self, name: str) -> Monomial:
        i = self.index[name]
        return tuple(1 if j == i else 0 for j in range(self.ngens))

    def mono_mul(self, m1: Monomial, m2: Monomial):
        """Return (sign, product) with sign 0 when the product vanishes."""
        key = (m1, m2)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        odd = self._oddmask
        sign = 1
        # moving each odd factor of m2 left past the odd factors of m1 with larger index
        later = 0
        for i in range(self.ngens - 1, -1, -1):
            if odd[i]:
                if m1[i] and m2[i]:
                    self._mul_cache[key] = (0, None)
                    return 0, None
                if m2[i] and later % 2:
                    sign = -sign
                later += m1[i]
        out = (sign, tuple(a + b for a, b in zip(m1, m2)))
        self._mul_cache[key] = out
        return out

    def _raw_terms(self, value) -> dict:
        if value is None:
            return {}
        if isinstance(value, Element):
            if value.algebra.generators != self.generators[: value.algebra.ngens]:
                raise MixedAlgebra("differential refers to a foreign algebra")
            pad = (0,) * (self.ngens - value.algebra.ngens)
            return {m + pad: c for m, c in value.terms.items()}
        if isinstance(value, str):
            return parse_terms(self, value)
        if isinstance(value, Mapping):
            return {tuple(m): Fraction(c) for m, c in value.items() if c}
        if isinstance(value, (int, Fraction)) and value == 0:
            return {}
        raise ValidationError(f"cannot interpret differential value {value!r}")

    # -- elements --------------------------------------------------------
    def element(self, terms: Mapping[Monomial, Scalar]) -> "Element":
        return Element(self, {tuple(m): Fraction(c) for m, c in terms.items()})

    def zero(self) -> "Element":
        return Element._make(self, {})

    def one(self) -> "Element":
        if self.truncation < 0:
            return self.zero()
        return Element._make(self, {self.unit_monomial(): Fraction(1)})

    def scalar(self, c: Scalar) -> "Element":
        c = Fraction(c)
        return Element._make(self, {self.unit_monomial(): c} if c else {})

    def gen(self, name: str) -> "Element":
        if name not in self.index:
            raise KeyError(f"no generator {name!r} in {self!r}")
        m = self.gen_monomial(name)
        if self.mono_degree(m) > self.truncation:
            return Element._make(self, {}, overflow=True)
        return Element._make(self, {m: Fraction(1)})

    def gens(self):
        return [self.gen(g.name) for g in self.generators]

    def parse(self, text: str) -> "Element":
        terms = parse_terms(self, text)
        kept = {m: c for m, c in terms.items() if self.mono_degree(m) <= self.truncation}
        return Element._make(self, kept, overflow=len(kept) != len(terms))

    def d_gen(self, name: str) -> "Element":
        raw = self._diff[self.index[name]]
        kept = {m: c for m, c in raw.items() if self.mono_degree(m) <= self.truncation}
        return Element._make(self, kept, overflow=len(kept) != len(raw))

    def raw_diff(self, name: str) -> dict:
        return dict(self._diff[self.index[name]])

    # -- bases and structure --------------------------------------------
    def basis(self, n: int) -> list:
        """Monomials of total degree ``n`` in canonical (descending tuple) order."""
        if n < 0 or n > self.truncation:
            raise DegreeOutOfRange(f"degree {n} outside 0..{self.truncation}")
        return self._basis_any(n)

    def _basis_any(self, n: int) -> list:
        hit = self._basis_cache.get(n)
        if hit is not None:
            return hit
        out = []
        k = self.ngens

        def rec(i, remaining, acc):
            if i == k:
                if remaining == 0:
                    out.append(tuple(acc))
                return
            deg = self.degrees[i]
            cap = 1 if self._oddmask[i] else remaining // deg
            for e in range(min(cap, remaining // deg), -1, -1):
                acc.append(e)
                rec(i + 1, remaining - e * deg, acc)
                acc.pop()

        rec(0, n, [])
        out.sort(reverse=True)
        self._basis_cache[n] = out
        return out

    def with_truncation(self, truncation: int) -> "FreeCDGA":
        if truncation == self.truncation:
            return self
        hit = self._variants.get(truncation)
        if hit is None:
            hit = FreeCDGA(
                self.generators,
                {g.name: dict(t) for g, t in zip(self.generators, self._diff)},
                truncation=truncation,
                minimal=self.minimal,
                validate=False,
                name=self.name,
            )
            self._variants[truncation] = hit
        return hit

    def prefix(self, m: int) -> "FreeCDGA":
        """Subalgebra on the first ``m`` generators (same truncation)."""
        key = ("prefix", m)
        hit = self._variants.get(key)
        if hit is None:
            gens = self.generators[:m]
            diff = {}
            for g, t in zip(gens, self._diff[:m]):
                if any(any(mono[m:]) for mono in t):
                    raise ValidationError(f"d{g.name} leaves the first {m} generators")
                diff[g.name] = {mono[:m]: c for mono, c in t.items()}
            hit = FreeCDGA(gens, diff, truncation=self.truncation, minimal=self.minimal,
                           validate=False, name=None)
            self._variants[key] = hit
        return hit

    def extend(self, generators: Sequence[Generator], diff: Mapping[str, object],
               validate: bool = True) -> "FreeCDGA":
        gens = self.generators + tuple(generators)
        full = {g.name: dict(t) for g, t in zip(self.generators, self._diff)}
        pad = (0,) * len(generators)
        full = {k: {m + pad: c for m, c in v.items()} for k, v in full.items()}
        ext = FreeCDGA(gens, {}, truncation=self.truncation, minimal=self.minimal, validate=False)
        for k, v in diff.items():
            full[k] = ext._raw_terms(v)
        return FreeCDGA(gens, full, truncation=self.truncation, minimal=self.minimal,
                        validate=validate)

    def coerce(self, x: "Element") -> "Element":
        """Re-home an element of a prefix subalgebra (or of self) into self."""
        if x.algebra == self:
            return x
        src = x.algebra
        if src.generators != self.generators[: src.ngens] or src._diff != tuple(
            {m[: src.ngens]: c for m, c in t.items()} for t in self._diff[: src.ngens]
        ):
            raise MixedAlgebra(f"{src!r} is not a prefix subalgebra of {self!r}")
        pad = (0,) * (self.ngens - src.ngens)
        terms = {m + pad: c for m, c in x.terms.items() if self.mono_degree(m + pad) <= self.truncation}
        return Element._make(self, terms, overflow=x.overflow or len(terms) != len(x.terms))

    def stages(self) -> list:
        """Split generators into elementary extensions (lists of names).

        A new stage starts when the degree changes or when a differential
        refers to a generator of the current stage.
        """
        out = []
        current = []
        current_deg = None
        for i, g in enumerate(self.generators):
            uses = {j for m in self._diff[i] for j, e in enumerate(m) if e}
            cur_idx = {self.index[n] for n in current}
            if current and (g.degree != current_deg or uses & cur_idx):
                out.append(current)
                current = []
            current.append(g.name)
            current_deg = g.degree
        if current:
            out.append(current)
        return out

    def weight_of(self, m: Monomial) -> int:
        return sum(e * g.weight for e, g in zip(m, self.generators) if e)

    def format_monomial(self, m: Monomial) -> str:
        parts = []
        for e, g in zip(m, self.generators):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts) if parts else "1"


def monomial_factors(algebra: FreeCDGA, m: Monomial):
    """The (generator, exponent) pairs of a monomial, in generator order."""
    return tuple((g, e) for g, e in zip(algebra.generators, m) if e)


class Element:
    """Exact rational combination of monomials of one algebra. Treat as immutable."""

    __slots__ = ("algebra", "terms", "overflow", "_hash")

    def __init__(self, algebra: FreeCDGA, terms: Optional[Mapping] = None, overflow: bool = False):
        clean = {}
        dropped = False
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) != algebra.ngens:
                raise ValidationError(f"monomial {m} has wrong length for {algebra!r}")
            c = Fraction(c)
            if not c:
                continue
            if any(m[i] > 1 for i in algebra.odd):
                continue
            if algebra.mono_degree(m) > algebra.truncation:
                dropped = True
                continue
            clean[m] = clean.get(m, 0) + c
        self.algebra = algebra
        self.terms = {m: c for m, c in clean.items() if c}
        self.overflow = overflow or dropped
        self._hash = None

    @classmethod
    def _make(cls, algebra, terms, overflow=False):
        obj = cls.__new__(cls)
        obj.algebra = algebra
        obj.terms = terms
        obj.overflow = overflow
        obj._hash = None
        return obj

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degrees(self) -> set:
        return {self.algebra.mono_degree(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> Optional[int]:
        """Degree of a homogeneous element; None for zero ("any degree")."""
        degs = self.degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous element {self} has degrees {sorted(degs)}")
        return next(iter(degs))

    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(tuple(m), Fraction(0))

    def homogeneous_part(self, n: int) -> "Element":
        alg = self.algebra
        return Element._make(alg, {m: c for m, c in self.terms.items() if alg.mono_degree(m) == n},
                             self.overflow)

    def sup_norm(self) -> Fraction:
        return max((abs(c) for c in self.terms.values()), default=Fraction(0))

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "Element"):
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise MixedAlgebra(f"{self.algebra!r} vs {other.algebra!r}")

    def _lift(self, other):
        if isinstance(other, Element):
            self._check(other)
            return other
        if isinstance(other, (int, Rational)):
            return self.algebra.scalar(Fraction(other))
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = terms.get(m, 0) + c
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
        return Element._make(self.algebra, terms, self.overflow or other.overflow)

    __radd__ = __add__

    def __neg__(self):
        return Element._make(self.algebra, {m: -c for m, c in self.terms.items()}, self.overflow)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, c) -> "Element":
        c = Fraction(c)
        if not c:
            return Element._make(self.algebra, {}, self.overflow)
        return Element._make(self.algebra, {m: c * v for m, v in self.terms.items()}, self.overflow)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        if not isinstance(other, Element):
            return NotImplemented
        self._check(other)
        alg = self.algebra
        limit = alg.truncation
        overflow = self.overflow or other.overflow
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                s, m = alg.mono_mul(m1, m2)
                if not s:
                    continue
                if alg.mono_degree(m) > limit:
                    overflow = True
                    continue
                v = terms.get(m, 0) + s * c1 * c2
                if v:
                    terms[m] = v
                else:
                    terms.pop(m, None)
        return Element._make(alg, terms, overflow)

    def __rmul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    def d(self) -> "Element":
        return differential(self)

    # -- comparison and display --------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Element):
            if other.algebra is not self.algebra and other.algebra != self.algebra:
                return False
            return self.terms == other.terms
        if isinstance(other, (int, Rational)):
            return self.terms == self.algebra.scalar(Fraction(other)).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.algebra, frozenset(self.terms.items())))
        return self._hash

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: mc[0], reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for m, c in self.sorted_terms():
            mono = self.algebra.format_monomial(m)
            mag = abs(c)
            if mono == "1":
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            out.append((sign, body))
        first_sign, first = out[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"Element({self})"


# -- differential -------------------------------------------------------------

def _d_monomial(alg: FreeCDGA, m: Monomial) -> dict:
    """d of a monomial as raw terms (no truncation applied)."""
    hit = alg._d_cache.get(m)
    if hit is not None:
        return hit
    out = {}
    n = alg.ngens
    prefix_deg = 0
    for i in range(n):
        e = m[i]
        if not e:
            continue
        dg = alg._diff[i]
        if dg:
            # block g_i^e contributes e * g_i^(e-1) * dg_i (only e=1 possible for odd g_i)
            before = tuple(m[j] if j < i else 0 for j in range(n))
            rest_same = tuple(e - 1 if j == i else 0 for j in range(n))
            after = tuple(m[j] if j > i else 0 for j in range(n))
            sgn0 = -1 if prefix_deg % 2 else 1
            for dm, dc in dg.items():
                s1, p = alg.mono_mul(rest_same, dm)
                if not s1:
                    continue
                s2, p = alg.mono_mul(before, p)
                if not s2:
                    continue
                s3, p = alg.mono_mul(p, after)
                if not s3:
                    continue
                v = out.get(p, 0) + sgn0 * s1 * s2 * s3 * e * dc
                if v:
                    out[p] = v
                else:
                    out.pop(p, None)
        prefix_deg += e * alg.degrees[i]
    alg._d_cache[m] = out
    return out


def differential(x: Element) -> Element:
    alg = x.algebra
    limit = alg.truncation
    overflow = x.overflow
    terms = {}
    for m, c in x.terms.items():
        for p, v in _d_monomial(alg, m).items():
            if alg.mono_degree(p) > limit:
                overflow = True
                continue
            t = terms.get(p, 0) + c * v
            if t:
                terms[p] = t
            else:
                terms.pop(p, None)
    return Element._make(alg, terms, overflow)


def multiply(x: Element, y: Element) -> Element:
    return x * y


def basis(algebra: FreeCDGA, n: int) -> list:
    return algebra.basis(n)


# -- parsing ---------------------------------------------------------------------

_TERM = re.compile(r"\s*([+-](?:\s*[+-])*)?\s*([^+-]+)")
_COEF = re.compile(r"^(\d+)(?:/(\d+))?$")
_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(\d+))?$")


def parse_terms(alg: FreeCDGA, text: str) -> dict:
    """Parse ``"2*a^2 - 1/3*x*y + 1"`` into raw terms (products taken in written order)."""
    text = text.strip()
    if not text:
        raise ParseError("empty polynomial")
    pos = 0
    out = {}
    first = True
    while pos < len(text):
        mt = _TERM.match(text, pos)
        if not mt or mt.end() == pos:
            raise ParseError(f"cannot parse polynomial {text!r} at offset {pos}")
        sign_s, body = mt.group(1), mt.group(2).strip()
        if sign_s is None and not first:
            raise ParseError(f"missing operator in {text!r}")
        first = False
        pos = mt.end()
        coef = Fraction(-1 if (sign_s or "").count("-") % 2 else 1)
        mono = alg.unit_monomial()
        factors = [f.strip() for f in body.split("*")]
        if any(not f for f in factors):
            raise ParseError(f"empty factor in {body!r}")
        for f in factors:
            mc = _COEF.match(f)
            if mc:
                num, den = int(mc.group(1)), int(mc.group(2) or 1)
                if den == 0:
                    raise ParseError(f"zero denominator in {f!r}")
                coef *= Fraction(num, den)
                continue
            mf = _FACTOR.match(f)
            if not mf:
                raise ParseError(f"bad factor {f!r}")
            name, power = mf.group(1), int(mf.group(2) or 1)
            if name not in alg.index:
                raise ParseError(f"unknown generator {name!r}")
            g = alg.gen_monomial(name)
            for _ in range(power):
                s, mono2 = alg.mono_mul(mono, g)
                if not s:
                    coef = Fraction(0)
                    break
                coef *= s
                mono = mono2
        if coef:
            v = out.get(mono, 0) + coef
            if v:
                out[mono] = v
            else:
                out.pop(mono, None)
    return out


# -- validation ------------------------------------------------------------------

def check_cdga(alg: FreeCDGA) -> list:
    """Violations of the CDGA axioms; an empty list means valid."""
    problems = []
    for i, g in enumerate(alg.generators):
        raw = alg._diff[i]
        for m in raw:
            deg = alg.mono_degree(m)
            if deg != g.degree + 1:
                problems.append(
                    f"degree violation: d{g.name} has a term {alg.format_monomial(m)} of degree "
                    f"{deg}, expected {g.degree + 1}")
            used = [j for j, e in enumerate(m) if e]
            if any(j >= i for j in used):
                problems.append(
                    f"ordering violation: d{g.name} uses {alg.format_monomial(m)}, "
                    f"which involves generators not introduced before {g.name}")
            if alg.minimal and sum(m) == 1:
                problems.append(f"minimality violation: d{g.name} has linear term {alg.format_monomial(m)}")
    if problems:
        return problems
    big = alg.with_truncation(max(alg.truncation, max(alg.degrees, default=0) + 2))
    for g in alg.generators:
        dd = differential(Element._make(big, dict(big._diff[big.index[g.name]])))
        if dd:
            problems.append(f"d^2 violation: d(d{g.name}) = {dd}")
    return problems


# -- positive weights ------------------------------------------------------------

def check_weights(alg: FreeCDGA) -> None:
    missing = [g.name for g in alg.generators if g.weight is None]
    if missing:
        raise MissingWeights(f"generators without weights: {missing}")
    for i, g in enumerate(alg.generators):
        for m in alg._diff[i]:
            w = alg.weight_of(m)
            if w != g.weight:
                raise WeightInhomogeneousDifferential(
                    f"d{g.name} contains {alg.format_monomial(m)} of weight {w}, "
                    f"but {g.name} has weight {g.weight}")


def weight_scaling(alg: FreeCDGA, t):
    """The endomorphism v -> t^weight(v) v."""
    from .homotopy import DGAMap

    t = Fraction(t)
    if t == 0:
        raise ValueError("scaling parameter must be nonzero")
    check_weights(alg)
    images = {g.name: alg.gen(g.name).scale(t ** g.weight) for g in alg.generators}
    return DGAMap(alg, alg, images)


def random_element(alg: FreeCDGA, n: int, rng, coeff_range: int = 3) -> Element:
    """Homogeneous element of degree n with small random integer coefficients."""
    terms = {}
    for m in alg.basis(n):
        c = rng.randint(-coeff_range, coeff_range)
        if c:
            terms[m] = Fraction(c)
    return Element._make(alg, terms)


def elements_from(alg: FreeCDGA, items: Iterable[str]):
    return [alg.parse(s) for s in items]
