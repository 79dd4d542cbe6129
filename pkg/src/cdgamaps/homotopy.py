"""DGA maps, the interval algebra B (x) /\\(t, dt), homotopies and level-k classes.

Interval elements are written b (x) t^i and c (x) t^j dt with dt on the
right. With that placement

    d(a t^i)      = da t^i + (-1)^|a| i a t^(i-1) dt
    d(a t^i dt)   = da t^i dt
    (a t^i dt)(b t^j) = (-1)^|b| ab t^(i+j) dt

and the integration operators are
    int_0^t (a t^i dt) = (-1)^|a| a t^(i+1) / (i+1),   int_0^t (a t^i) = 0,
    int_0^1 (a t^i dt) = (-1)^|a| a / (i+1).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Mapping, Optional

from .algebra import Element, FreeCDGA, Monomial
from .errors import BaseMismatch, InvalidEta, InvalidMap, LevelMismatch, MixedAlgebra, ValidationError

DEFAULT_TCAP = 8


def parity_twist(x: Element) -> Element:
    """x with every odd-degree monomial negated, i.e. sum (-1)^|m| c m."""
    alg = x.algebra
    return Element._make(alg, {m: (-c if alg.mono_degree(m) % 2 else c) for m, c in x.terms.items()},
                         x.overflow)


def _as_element(alg: FreeCDGA, value) -> Element:
    if value is None:
        return alg.zero()
    if isinstance(value, Element):
        return value if value.algebra == alg else alg.coerce(value)
    if isinstance(value, str):
        return alg.parse(value)
    if isinstance(value, (int, Fraction)):
        return alg.scalar(value)
    raise ValidationError(f"cannot interpret {value!r} as an element of {alg!r}")


def _rehome(x: Element, alg: FreeCDGA) -> Element:
    """Move x between truncation variants of the same algebra."""
    if x.algebra is alg:
        return x
    if x.algebra.generators != alg.generators:
        raise MixedAlgebra(f"{x.algebra!r} vs {alg!r}")
    terms = {m: c for m, c in x.terms.items() if alg.mono_degree(m) <= alg.truncation}
    return Element._make(alg, terms, x.overflow or len(terms) != len(x.terms))


# -- maps --------------------------------------------------------------------------------

class DGAMap:
    """Algebra map determined by generator images. Unlisted generators go to 0."""

    def __init__(self, source: FreeCDGA, target: FreeCDGA, images: Optional[Mapping] = None,
                 validate: bool = True):
        self.source = source
        self.target = target
        images = dict(images or {})
        unknown = set(images) - set(source.index)
        if unknown:
            raise InvalidMap(f"images given for unknown generators {sorted(unknown)}")
        self.images: Dict[str, Element] = {
            g.name: _as_element(target, images.get(g.name)) for g in source.generators}
        self._cache = {}
        if validate:
            self.validate()

    def validate(self) -> None:
        for g in self.source.generators:
            img = self.images[g.name]
            if img and (not img.is_homogeneous() or img.degree != g.degree):
                raise InvalidMap(f"image of {g.name} has degree {sorted(img.degrees())}, expected {g.degree}")
        top = max(self.source.degrees, default=0) + 1
        wide = self.with_truncation(max(top, self.source.truncation), max(top, self.target.truncation))
        for g in self.source.generators:
            lhs = wide.images[g.name].d()
            rhs = wide.apply(wide.source.d_gen(g.name))
            if lhs != rhs:
                raise InvalidMap(f"chain condition fails on {g.name}: d f({g.name}) = {lhs} "
                                 f"but f(d{g.name}) = {rhs}")

    def with_truncation(self, source_trunc: int, target_trunc: int) -> "DGAMap":
        if source_trunc == self.source.truncation and target_trunc == self.target.truncation:
            return self
        tgt = self.target.with_truncation(target_trunc)
        out = DGAMap.__new__(DGAMap)
        out.source = self.source.with_truncation(source_trunc)
        out.target = tgt
        out.images = {k: _rehome(v, tgt) for k, v in self.images.items()}
        out._cache = {}
        return out

    def image_of_monomial(self, m: Monomial) -> Element:
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        out = self.target.one()
        for g, e in zip(self.source.generators, m):
            for _ in range(e):
                out = out * self.images[g.name]
                if not out:
                    break
            if not out:
                break
        self._cache[m] = out
        return out

    def apply(self, x: Element) -> Element:
        if x.algebra != self.source:
            if x.algebra.generators == self.source.generators:
                if x.algebra.truncation != self.source.truncation:
                    top = max(self.target.truncation, x.algebra.truncation)
                    return self.with_truncation(x.algebra.truncation, top).apply(x)
            else:
                x = self.source.coerce(x)
        out = self.target.zero()
        for m, c in x.terms.items():
            out = out + self.image_of_monomial(m).scale(c)
        return out

    __call__ = apply

    def compose(self, inner: "DGAMap") -> "DGAMap":
        """self o inner."""
        if inner.target != self.source:
            raise MixedAlgebra("maps are not composable")
        return DGAMap(inner.source, self.target,
                      {k: self.apply(v) for k, v in inner.images.items()}, validate=False)

    def restrict(self, sub: FreeCDGA) -> "DGAMap":
        """Restriction to a prefix subalgebra of the source."""
        return DGAMap(sub, self.target, {g.name: self.images[g.name] for g in sub.generators},
                      validate=False)

    def __eq__(self, other):
        if not isinstance(other, DGAMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.images == other.images)

    def __hash__(self):
        return hash((self.source, self.target, tuple(sorted((k, hash(v)) for k, v in self.images.items()))))

    def __repr__(self):
        body = ", ".join(f"{k} -> {v}" for k, v in self.images.items())
        return f"DGAMap({body})"

    def to_dict(self) -> dict:
        return {k: str(v) for k, v in self.images.items()}


def identity_map(alg: FreeCDGA) -> DGAMap:
    return DGAMap(alg, alg, {g.name: alg.gen(g.name) for g in alg.generators}, validate=False)


def zero_map(source: FreeCDGA, target: FreeCDGA) -> DGAMap:
    """The map sending every generator to 0 (valid: the constant map)."""
    return DGAMap(source, target, {}, validate=False)


# -- the interval algebra ---------------------------------------------------------------

class IntervalElement:
    """Element of B (x) /\\(t, dt): sums of b t^i and c t^j dt."""

    __slots__ = ("base", "poly", "dt")

    def __init__(self, base: FreeCDGA, poly: Optional[Mapping[int, Element]] = None,
                 dt: Optional[Mapping[int, Element]] = None):
        self.base = base
        self.poly = {int(i): e for i, e in (poly or {}).items() if e}
        self.dt = {int(j): e for j, e in (dt or {}).items() if e}
        for part in (self.poly, self.dt):
            for i, e in part.items():
                if i < 0:
                    raise ValidationError("negative power of t")
                if e.algebra != base:
                    raise MixedAlgebra("interval coefficients must live in the base algebra")

    @classmethod
    def const(cls, x: Element) -> "IntervalElement":
        return cls(x.algebra, {0: x})

    @property
    def overflow(self) -> bool:
        return any(e.overflow for e in self.poly.values()) or any(e.overflow for e in self.dt.values())

    def is_zero(self) -> bool:
        return not self.poly and not self.dt

    def __bool__(self):
        return not self.is_zero()

    def t_degree(self) -> int:
        return max(list(self.poly) + list(self.dt) + [0])

    def degrees(self) -> set:
        out = set()
        for e in self.poly.values():
            out |= e.degrees()
        for e in self.dt.values():
            out |= {k + 1 for k in e.degrees()}
        return out

    @property
    def degree(self) -> Optional[int]:
        degs = self.degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("inhomogeneous interval element")
        return next(iter(degs))

    def _check(self, other):
        if other.base is not self.base and other.base != self.base:
            raise MixedAlgebra("interval elements over different algebras")

    def __add__(self, other):
        if isinstance(other, Element):
            other = IntervalElement.const(other)
        if not isinstance(other, IntervalElement):
            return NotImplemented
        self._check(other)
        poly = dict(self.poly)
        for i, e in other.poly.items():
            poly[i] = poly[i] + e if i in poly else e
        dt = dict(self.dt)
        for j, e in other.dt.items():
            dt[j] = dt[j] + e if j in dt else e
        return IntervalElement(self.base, poly, dt)

    __radd__ = __add__

    def __neg__(self):
        return IntervalElement(self.base, {i: -e for i, e in self.poly.items()},
                               {j: -e for j, e in self.dt.items()})

    def __sub__(self, other):
        if isinstance(other, Element):
            other = IntervalElement.const(other)
        return self + (-other)

    def scale(self, c) -> "IntervalElement":
        return IntervalElement(self.base, {i: e.scale(c) for i, e in self.poly.items()},
                               {j: e.scale(c) for j, e in self.dt.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Element):
            other = IntervalElement.const(other)
        if not isinstance(other, IntervalElement):
            return NotImplemented
        self._check(other)
        poly: Dict[int, Element] = {}
        dt: Dict[int, Element] = {}

        def acc(target, k, v):
            if v:
                target[k] = target[k] + v if k in target else v

        for i, a in self.poly.items():
            for j, b in other.poly.items():
                acc(poly, i + j, a * b)
            for j, c in other.dt.items():
                acc(dt, i + j, a * c)
        for i, c in self.dt.items():
            for j, b in other.poly.items():
                acc(dt, i + j, c * parity_twist(b))
        return IntervalElement(self.base, poly, dt)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Element):
            return IntervalElement.const(other) * self
        return NotImplemented

    def d(self) -> "IntervalElement":
        poly: Dict[int, Element] = {}
        dt: Dict[int, Element] = {}
        for i, a in self.poly.items():
            da = a.d()
            if da:
                poly[i] = poly[i] + da if i in poly else da
            if i:
                v = parity_twist(a).scale(i)
                dt[i - 1] = dt[i - 1] + v if i - 1 in dt else v
        for j, c in self.dt.items():
            dc = c.d()
            if dc:
                dt[j] = dt[j] + dc if j in dt else dc
        return IntervalElement(self.base, poly, dt)

    def at(self, s) -> Element:
        """Substitute t = s, dt = 0."""
        s = Fraction(s)
        out = self.base.zero()
        for i, a in self.poly.items():
            out = out + a.scale(s ** i)
        return out

    def __eq__(self, other):
        if isinstance(other, Element):
            other = IntervalElement.const(other)
        if not isinstance(other, IntervalElement):
            return NotImplemented
        return self.base == other.base and self.poly == other.poly and self.dt == other.dt

    def __hash__(self):
        return hash((self.base, tuple(sorted(self.poly.items())), tuple(sorted(self.dt.items()))))

    def __str__(self):
        parts = []
        for i in sorted(self.poly):
            parts.append(f"({self.poly[i]})" + (f"*t^{i}" if i > 1 else "*t" if i == 1 else ""))
        for j in sorted(self.dt):
            parts.append(f"({self.dt[j]})" + (f"*t^{j}" if j > 1 else "*t" if j == 1 else "") + "*dt")
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__

    def rehome(self, alg: FreeCDGA) -> "IntervalElement":
        return IntervalElement(alg, {i: _rehome(e, alg) for i, e in self.poly.items()},
                               {j: _rehome(e, alg) for j, e in self.dt.items()})


def int_0_t(u: IntervalElement) -> IntervalElement:
    poly = {j + 1: parity_twist(c).scale(Fraction(1, j + 1)) for j, c in u.dt.items()}
    return IntervalElement(u.base, poly, {})


def int_0_1(u: IntervalElement) -> Element:
    out = u.base.zero()
    for j, c in u.dt.items():
        out = out + parity_twist(c).scale(Fraction(1, j + 1))
    return out


def tensor_t(x: Element, power: int = 1) -> IntervalElement:
    return IntervalElement(x.algebra, {power: x})


def tensor_dt(x: Element, power: int = 0) -> IntervalElement:
    return IntervalElement(x.algebra, {}, {power: x})


# -- homotopies -------------------------------------------------------------------------

class Homotopy:
    """Algebra map source -> target (x) /\\(t, dt), given on generators."""

    def __init__(self, source: FreeCDGA, target: FreeCDGA, images: Mapping[str, IntervalElement],
                 validate: bool = True, tcap: int = DEFAULT_TCAP):
        self.source = source
        self.target = target
        self.tcap = tcap
        unknown = set(images) - set(source.index)
        if unknown:
            raise InvalidMap(f"images given for unknown generators {sorted(unknown)}")
        imgs = {}
        for g in source.generators:
            v = images.get(g.name)
            if v is None:
                v = IntervalElement(target)
            elif isinstance(v, Element):
                v = IntervalElement.const(_as_element(target, v))
            elif v.base != target:
                v = v.rehome(target)
            imgs[g.name] = v
        self.images: Dict[str, IntervalElement] = imgs
        self._cache = {}
        self._ends = {}
        if validate:
            self.validate()

    @classmethod
    def constant(cls, f: DGAMap) -> "Homotopy":
        return cls(f.source, f.target, {k: IntervalElement.const(v) for k, v in f.images.items()},
                   validate=False)

    def validate(self) -> None:
        for g in self.source.generators:
            img = self.images[g.name]
            if img.t_degree() > self.tcap:
                raise InvalidMap(f"image of {g.name} has t-degree {img.t_degree()} above the cap {self.tcap}")
            if img and (len(img.degrees()) != 1 or img.degree != g.degree):
                raise InvalidMap(f"image of {g.name} has degrees {sorted(img.degrees())}, expected {g.degree}")
        top = max(self.source.degrees, default=0) + 1
        wide = self.with_truncation(max(top, self.source.truncation), max(top, self.target.truncation))
        for g in self.source.generators:
            lhs = wide.images[g.name].d()
            rhs = wide.apply(wide.source.d_gen(g.name))
            if lhs != rhs:
                raise InvalidMap(f"chain condition fails on {g.name}: dH = {lhs}, H(d) = {rhs}")

    def with_truncation(self, source_trunc: int, target_trunc: int) -> "Homotopy":
        if source_trunc == self.source.truncation and target_trunc == self.target.truncation:
            return self
        tgt = self.target.with_truncation(target_trunc)
        out = Homotopy.__new__(Homotopy)
        out.source = self.source.with_truncation(source_trunc)
        out.target = tgt
        out.tcap = self.tcap
        out.images = {k: v.rehome(tgt) for k, v in self.images.items()}
        out._cache = {}
        out._ends = {}
        return out

    def image_of_monomial(self, m: Monomial) -> IntervalElement:
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        out = IntervalElement.const(self.target.one())
        for g, e in zip(self.source.generators, m):
            for _ in range(e):
                out = out * self.images[g.name]
        self._cache[m] = out
        return out

    def apply(self, x: Element) -> IntervalElement:
        if x.algebra != self.source:
            if x.algebra.generators == self.source.generators:
                top = max(self.target.truncation, x.algebra.truncation)
                return self.with_truncation(x.algebra.truncation, top).apply(x)
            x = self.source.coerce(x)
        out = IntervalElement(self.target)
        for m, c in x.terms.items():
            out = out + self.image_of_monomial(m).scale(c)
        return out

    __call__ = apply

    def restrict(self, endpoint) -> DGAMap:
        """Endpoint map at t = endpoint, dt = 0."""
        key = Fraction(endpoint)
        hit = self._ends.get(key)
        if hit is None:
            hit = DGAMap(self.source, self.target,
                         {k: v.at(key) for k, v in self.images.items()}, validate=False)
            self._ends[key] = hit
        return hit

    def restrict_source(self, sub: FreeCDGA) -> "Homotopy":
        return Homotopy(sub, self.target, {g.name: self.images[g.name] for g in sub.generators},
                        validate=False, tcap=self.tcap)

    def post_compose(self, h: DGAMap) -> "Homotopy":
        """h applied coefficientwise: (h (x) id) o H."""
        def push(u: IntervalElement) -> IntervalElement:
            return IntervalElement(h.target, {i: h.apply(e) for i, e in u.poly.items()},
                                   {j: h.apply(e) for j, e in u.dt.items()})
        return Homotopy(self.source, h.target, {k: push(v) for k, v in self.images.items()},
                        validate=False, tcap=self.tcap)

    def reverse(self) -> "Homotopy":
        """The homotopy run backwards (t -> 1 - t)."""
        from math import comb

        def flip(u: IntervalElement) -> IntervalElement:
            poly: Dict[int, Element] = {}
            dt: Dict[int, Element] = {}
            for i, a in u.poly.items():
                for k in range(i + 1):
                    v = a.scale(comb(i, k) * (-1) ** k)
                    poly[k] = poly[k] + v if k in poly else v
            for j, c in u.dt.items():
                for k in range(j + 1):
                    v = c.scale(-comb(j, k) * (-1) ** k)
                    dt[k] = dt[k] + v if k in dt else v
            return IntervalElement(u.base, poly, dt)
        return Homotopy(self.source, self.target, {k: flip(v) for k, v in self.images.items()},
                        validate=False, tcap=self.tcap)

    def __repr__(self):
        body = ", ".join(f"{k} -> {v}" for k, v in self.images.items())
        return f"Homotopy({body})"


def restrict(H: Homotopy, endpoint) -> DGAMap:
    return H.restrict(endpoint)


def is_homotopy(H: Homotopy, f: DGAMap, g: DGAMap) -> bool:
    """True iff H is a valid homotopy starting at f (t=0) and ending at g (t=1)."""
    if H.source != f.source or H.source != g.source:
        return False
    if H.target != f.target or H.target != g.target:
        return False
    try:
        H.validate()
    except InvalidMap:
        return False
    return H.restrict(0) == f and H.restrict(1) == g


# -- level-k classes ----------------------------------------------------------------------

class ClassElement:
    """phi + eta (x) e with |e| = k and e^2 = 0; eta(v) has degree |v| - k.

    eta extends to products by eta(uv) = (-1)^(k|v|) eta(u) phi(v) + phi(u) eta(v).
    """

    def __init__(self, base: DGAMap, eta: Mapping, level: int = 1, validate: bool = True):
        if level < 1:
            raise ValidationError("level must be positive")
        self.base = base
        self.level = level
        src, tgt = base.source, base.target
        unknown = set(eta) - set(src.index)
        if unknown:
            raise InvalidEta(f"eta given on unknown generators {sorted(unknown)}")
        self.eta = {g.name: _as_element(tgt, eta.get(g.name)) for g in src.generators}
        self._cache = {}
        if validate:
            self.validate()

    def validate(self) -> None:
        src = self.base.source
        for g in src.generators:
            img = self.eta[g.name]
            if img and (not img.is_homogeneous() or img.degree != g.degree - self.level):
                raise InvalidEta(f"eta({g.name}) has degree {sorted(img.degrees())}, "
                                 f"expected {g.degree - self.level}")
        top = max(src.degrees, default=0) + 1
        wide = self._wide(top)
        for g in src.generators:
            lhs = wide.eta[g.name].d()
            rhs = wide.apply(wide.base.source.d_gen(g.name))
            if lhs != rhs:
                raise InvalidEta(f"d eta({g.name}) = {lhs} differs from eta(d{g.name}) = {rhs}")

    def _wide(self, top: int) -> "ClassElement":
        src, tgt = self.base.source, self.base.target
        st, tt = max(top, src.truncation), max(top, tgt.truncation)
        if st == src.truncation and tt == tgt.truncation:
            return self
        base = self.base.with_truncation(st, tt)
        out = ClassElement.__new__(ClassElement)
        out.base = base
        out.level = self.level
        out.eta = {k: _rehome(v, base.target) for k, v in self.eta.items()}
        out._cache = {}
        return out

    def _pair(self, m: Monomial):
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        tgt = self.base.target
        p, q = tgt.one(), tgt.zero()
        k = self.level
        for g, e in zip(self.base.source.generators, m):
            for _ in range(e):
                p2, q2 = self.base.images[g.name], self.eta[g.name]
                sign = -1 if (k * g.degree) % 2 else 1
                q = (q * p2).scale(sign) + p * q2
                p = p * p2
        self._cache[m] = (p, q)
        return p, q

    def apply(self, x: Element) -> Element:
        """eta extended to an arbitrary element of the source."""
        if x.algebra != self.base.source:
            if x.algebra.generators == self.base.source.generators:
                return self._wide(x.algebra.truncation).apply(x)
            x = self.base.source.coerce(x)
        out = self.base.target.zero()
        for m, c in x.terms.items():
            out = out + self._pair(m)[1].scale(c)
        return out

    __call__ = apply

    def __repr__(self):
        body = ", ".join(f"{k} -> {v}" for k, v in self.eta.items())
        return f"ClassElement(level={self.level}; {body})"


def boxplus(F: ClassElement, G: ClassElement) -> ClassElement:
    if F.base != G.base:
        raise BaseMismatch("classes over different base maps")
    if F.level != G.level:
        raise LevelMismatch(f"levels {F.level} and {G.level} differ")
    return ClassElement(F.base, {k: F.eta[k] + G.eta[k] for k in F.eta}, F.level, validate=False)


def iota_k(F: ClassElement, V: Mapping[str, Element]) -> Dict[str, Element]:
    """v -> eta(dv) for the extension generators v with differentials V[v]."""
    F.validate()
    return {name: F.apply(dv) for name, dv in V.items()}
