"""Obstructions to extending maps over elementary extensions, and the space W.

An extension problem is a square

        A  --f-->  B
        |          |h
      A (x) /\\V --g--> C

commuting up to a homotopy H from g|A (t=0) to h o f (t=1). The cochain
O(v) = (f(dv), g(v) + int_0^1 H(dv)) is a cocycle of the cone of h; it is
exact iff the square admits a lift, and a primitive (b, c) gives the lift
f~(v) = b(v) with homotopy H~(v) = g(v) + int_0^t H(dv) + d(c(v) t).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .algebra import Element, FreeCDGA, Generator
from .errors import (
    HomotopyUndecided,
    InvalidProblem,
    NonzeroObstruction,
    NotExact,
    NotInW,
    ValidationError,
)
from .homotopy import (
    ClassElement,
    DGAMap,
    Homotopy,
    IntervalElement,
    int_0_1,
    int_0_t,
    is_homotopy,
    tensor_dt,
    tensor_t,
)
from .linalg import (
    CohomologySpace,
    cohomology,
    columns_to_rows,
    element_of,
    in_span,
    integer_kernel,
    nullspace,
    rref,
    relative_cohomology,
    solve,
    solve_d,
    vector_of,
)


@lru_cache(maxsize=None)
def cached_cohomology(alg: FreeCDGA, n: int) -> CohomologySpace:
    return cohomology(alg, n)


def restrict_to_prefix(x: Element, sub: FreeCDGA) -> Element:
    """View an element of a larger algebra as an element of its prefix ``sub``."""
    k = sub.ngens
    if x.algebra.generators[:k] != sub.generators:
        raise ValidationError("not a prefix subalgebra")
    terms = {}
    for m, c in x.terms.items():
        if any(m[k:]):
            raise ValidationError(f"{x} involves generators outside the subalgebra")
        terms[m[:k]] = c
    wide = sub if sub.truncation >= x.algebra.truncation else sub.with_truncation(x.algebra.truncation)
    return Element(wide, terms)


def d_of_generator(alg: FreeCDGA, name: str) -> Element:
    """d of a generator, computed without truncation loss."""
    g = alg.generators[alg.index[name]]
    wide = alg if alg.truncation > g.degree else alg.with_truncation(g.degree + 1)
    return wide.d_gen(name)


# -- problems ------------------------------------------------------------------------

@dataclass
class ElementaryExtension:
    base: FreeCDGA
    extended: FreeCDGA

    def __post_init__(self):
        k = self.base.ngens
        if self.extended.generators[:k] != self.base.generators:
            raise ValidationError("base is not a prefix of the extension")
        degs = {g.degree for g in self.new_generators}
        if len(degs) > 1:
            raise ValidationError("new generators must share one degree")
        for g in self.new_generators:
            restrict_to_prefix(d_of_generator(self.extended, g.name), self.base)

    @property
    def new_generators(self) -> Tuple[Generator, ...]:
        return self.extended.generators[self.base.ngens:]

    @property
    def degree(self) -> int:
        return self.new_generators[0].degree

    def diffs(self) -> Dict[str, Element]:
        return {g.name: restrict_to_prefix(d_of_generator(self.extended, g.name), self.base)
                for g in self.new_generators}

    @classmethod
    def from_stage(cls, alg: FreeCDGA, names: Sequence[str]) -> "ElementaryExtension":
        first = alg.index[names[0]]
        last = alg.index[names[-1]]
        return cls(alg.prefix(first), alg.prefix(last + 1))


@dataclass
class ObstructionProblem:
    f: DGAMap          # A -> B
    g: DGAMap          # A (x) /\V -> C
    h: DGAMap          # B -> C
    H: Homotopy        # g|A ~ h o f
    validate: bool = True

    def __post_init__(self):
        self.extension = None
        if not self.validate:
            self.extension = ElementaryExtension(self.f.source, self.g.source)
            return
        A = self.f.source
        try:
            self.extension = ElementaryExtension(A, self.g.source)
        except ValidationError as exc:
            raise InvalidProblem(str(exc)) from exc
        if self.h.source != self.f.target or self.h.target != self.g.target:
            raise InvalidProblem("h must go from the target of f to the target of g")
        if self.H.source != A or self.H.target != self.g.target:
            raise InvalidProblem("homotopy has the wrong source or target")
        g_base = self.g.restrict(A)
        hf = self.h.compose(self.f)
        if not is_homotopy(self.H, g_base, hf):
            raise InvalidProblem("H is not a homotopy from g|A to h o f")


@dataclass
class ObstructionClass:
    problem: ObstructionProblem
    cochain: Dict[str, Tuple[Element, Element]]
    coordinates: Dict[str, list]
    space: CohomologySpace

    @property
    def degree(self) -> int:
        return self.problem.extension.degree + 1

    def is_zero(self) -> bool:
        return not any(any(c) for c in self.coordinates.values())

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "zero": self.is_zero(),
            "cochain": {k: [str(b), str(c)] for k, (b, c) in self.cochain.items()},
            "coordinates": {k: [str(x) for x in v] for k, v in self.coordinates.items()},
        }


def _wide_problem(p: ObstructionProblem):
    n = p.extension.degree
    top = n + 1
    f = p.f.with_truncation(max(top, p.f.source.truncation), max(top, p.f.target.truncation))
    h = p.h.with_truncation(max(top, p.h.source.truncation), max(top, p.h.target.truncation))
    H = p.H.with_truncation(max(top, p.H.source.truncation), max(top, p.H.target.truncation))
    return f, h, H


def obstruction(p: ObstructionProblem) -> ObstructionClass:
    n = p.extension.degree
    f, h, H = _wide_problem(p)
    C = H.target
    cochain = {}
    for name, dv in p.extension.diffs().items():
        b = f.apply(dv)
        gv = p.g.images[name]
        gv = C.coerce(gv) if gv.algebra != C else gv
        c = gv + int_0_1(H.apply(dv))
        cochain[name] = (b, c)
    space = relative_cohomology(p.h, n + 1)
    coords = {k: space.project(v) for k, v in cochain.items()}
    return ObstructionClass(p, cochain, coords, space)


def _cone_solve(h: DGAMap, n: int, target: Tuple[Element, Element]):
    """(b, c) in B^n + C^(n-1) with db = target[0] and h(b) - dc = target[1], or None."""
    Bw = h.source.with_truncation(max(n + 1, h.source.truncation))
    Cw = h.target.with_truncation(max(n + 1, h.target.truncation))
    hw = h.with_truncation(Bw.truncation, Cw.truncation)
    b_src = Bw._basis_any(n)
    c_src = Cw._basis_any(n - 1) if n >= 1 else []
    b_tgt = Bw._basis_any(n + 1)
    c_tgt = Cw._basis_any(n)
    ib = {m: i for i, m in enumerate(b_tgt)}
    ic = {m: i + len(b_tgt) for i, m in enumerate(c_tgt)}
    rows = [[Fraction(0)] * (len(b_src) + len(c_src)) for _ in range(len(b_tgt) + len(c_tgt))]
    for j, m in enumerate(b_src):
        x = Element._make(Bw, {m: Fraction(1)})
        for p_, c in x.d().terms.items():
            rows[ib[p_]][j] += c
        for p_, c in hw.apply(x).terms.items():
            rows[ic[p_]][j] += c
    for j, m in enumerate(c_src):
        y = Element._make(Cw, {m: Fraction(1)})
        for p_, c in y.d().terms.items():
            rows[ic[p_]][len(b_src) + j] -= c
    tb, tc = target
    tb = Bw.coerce(tb) if tb.algebra != Bw else tb
    tc = Cw.coerce(tc) if tc.algebra != Cw else tc
    rhs = vector_of(tb, b_tgt) + vector_of(tc, c_tgt)
    sol = solve(rows, rhs, len(b_src) + len(c_src))
    if sol is None:
        return None
    b = element_of(Bw, b_src, sol[: len(b_src)])
    c = element_of(Cw, c_src, sol[len(b_src):])
    return b, c


def solve_primitive(O: ObstructionClass) -> Dict[str, Tuple[Element, Element]]:
    if not O.is_zero():
        raise NonzeroObstruction("obstruction class is nonzero", obstruction=O)
    n = O.problem.extension.degree
    out = {}
    for name, pair in O.cochain.items():
        sol = _cone_solve(O.problem.h, n, pair)
        if sol is None:  # pragma: no cover - excluded by the class check
            raise NonzeroObstruction(f"no primitive for {name}", obstruction=O)
        out[name] = sol
    return out


def extend_with_primitive(p: ObstructionProblem, prim: Mapping[str, Tuple[Element, Element]]):
    """The lift f~ over A (x) /\\V and the homotopy H~ from g to h o f~."""
    A = p.f.source
    E = p.g.source
    B, C = p.f.target, p.g.target
    f_images = {g.name: p.f.images[g.name] for g in A.generators}
    for name, (b, _) in prim.items():
        f_images[name] = B.coerce(b) if b.algebra != B else b
    f_ext = DGAMap(E, B, f_images)
    _, _, Hw = _wide_problem(p)
    H_images = dict(p.H.images)
    diffs = p.extension.diffs()
    for name, (_, c) in prim.items():
        gv = p.g.images[name]
        Cw = Hw.target
        gv = Cw.coerce(gv) if gv.algebra != Cw else gv
        c = Cw.coerce(c) if c.algebra != Cw else c
        u = IntervalElement.const(gv) + int_0_t(Hw.apply(diffs[name])) + tensor_t(c).d()
        H_images[name] = u.rehome(C)
    H_ext = Homotopy(E, C, H_images, tcap=max(p.H.tcap, _tdeg(H_images)))
    return f_ext, H_ext


def _tdeg(images) -> int:
    return max((v.t_degree() for v in images.values()), default=0)


def extend(p: ObstructionProblem):
    """Obstruction, primitive and extension in one call."""
    O = obstruction(p)
    prim = solve_primitive(O)
    return extend_with_primitive(p, prim)


# -- level-1 derivations and homotopies between maps ----------------------------------

def eta_space(phi: DGAMap, level: int = 1):
    """Basis of the eta's with d eta = eta d over phi, as (unknown layout, vectors).

    Returns (slots, basis) where slots lists (generator, monomial basis of
    the eta-degree) and each basis vector concatenates coordinates.
    """
    A, B = phi.source, phi.target
    slots = []
    for g in A.generators:
        k = g.degree - level
        mons = B._basis_any(k) if 0 <= k <= B.truncation else []
        slots.append((g.name, mons))
    total = sum(len(m) for _, m in slots)

    def eta_from(vec):
        eta = {}
        pos = 0
        for name, mons in slots:
            eta[name] = element_of(B, mons, vec[pos:pos + len(mons)])
            pos += len(mons)
        return ClassElement(phi, eta, level, validate=False)

    # constraint rows: for each generator, coordinates of d eta(g) - eta(dg)
    top = max(A.degrees, default=0) + 1
    cols = []
    for u in range(total):
        vec = [Fraction(int(i == u)) for i in range(total)]
        F = eta_from(vec)._wide(top)
        col = []
        for g in A.generators:
            res = F.eta[g.name].d() - F.apply(F.base.source.d_gen(g.name))
            k = g.degree - level + 1
            mons = F.base.target._basis_any(k) if k >= 0 else []
            col.extend(vector_of(res, mons))
        cols.append(col)
    nrows = len(cols[0]) if cols else 0
    M = columns_to_rows(cols, nrows) if cols else []
    basis = nullspace(M, total) if total else []
    return slots, basis, M, eta_from


def integral_eta_lattice(phi: DGAMap, level: int = 1):
    """Integer basis of the eta's whose coordinates (in the monomial basis) are integral."""
    slots, _, M, eta_from = eta_space(phi, level)
    total = sum(len(m) for _, m in slots)
    if not total:
        return []
    if not M or not any(any(r) for r in M):
        return [eta_from([Fraction(int(i == j)) for i in range(total)]) for j in range(total)]
    int_rows = []
    for r in M:
        den = 1
        for x in r:
            den = den * x.denominator // _gcd(den, x.denominator)
        int_rows.append([int(x * den) for x in r])
    return [eta_from([Fraction(x) for x in v]) for v in integer_kernel(int_rows, total)]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _first_difference(f0: DGAMap, f1: DGAMap, stages) -> Optional[int]:
    for j, names in enumerate(stages):
        if any(f0.images[n] != f1.images[n] for n in names):
            return j
    return None


def homotopy_between(f_start: DGAMap, f_end: DGAMap) -> Homotopy:
    """A homotopy from f_start to f_end, built stage by stage.

    On the stages where the maps agree the homotopy is f_start + eta dt for a
    level-1 eta chosen to kill the difference class at the first stage where
    they differ. Raises NonzeroObstruction when no eta works (the maps are not
    homotopic) and HomotopyUndecided when a later stage is blocked.
    """
    A, B = f_start.source, f_start.target
    if f_end.source != A or f_end.target != B:
        raise ValidationError("maps must share source and target")
    stages = A.stages()
    j = _first_difference(f_start, f_end, stages)
    if j is None:
        return Homotopy.constant(f_start)
    first = A.index[stages[j][0]]
    prev = A.prefix(first)
    phi_prev = f_start.restrict(prev)
    n = A.generators[first].degree
    Hn = cached_cohomology(B, n)
    sign = -1 if n % 2 else 1
    diffs = {name: restrict_to_prefix(d_of_generator(A, name), prev) for name in stages[j]}
    residual = []
    for name in stages[j]:
        delta = f_end.images[name] - f_start.images[name]
        residual.extend(Hn.project(delta))
    eta = None
    if any(residual):
        slots, basis, _, eta_from = eta_space(phi_prev, 1)
        cols = []
        for vec in basis:
            F = eta_from(vec)
            col = []
            for name in stages[j]:
                col.extend(Hn.project(F.apply(diffs[name]).scale(sign)))
            cols.append(col)
        lam = solve(columns_to_rows(cols, len(residual)), residual, len(cols)) if cols else None
        if lam is None:
            raise NonzeroObstruction(
                f"difference class {[str(x) for x in residual]} at stage {stages[j]} "
                f"is not in the image of iota_1", obstruction=residual)
        vec = [sum((l * b[i] for l, b in zip(lam, basis)), Fraction(0)) for i in range(len(basis[0]))]
        eta = eta_from(vec)
    images = {}
    for g in prev.generators:
        img = IntervalElement.const(f_start.images[g.name])
        if eta is not None:
            img = img + tensor_dt(eta.eta[g.name])
        images[g.name] = img
    H = Homotopy(prev, B, images, validate=False)
    for k in range(j, len(stages)):
        names = stages[k]
        last = A.index[names[-1]]
        sub = A.prefix(last + 1)
        top = max(g.degree for g in sub.generators) + 1
        Cw = B if B.truncation >= top else B.with_truncation(top)
        Hw = H.with_truncation(max(H.source.truncation, top), Cw.truncation)
        for name in names:
            dv = restrict_to_prefix(d_of_generator(A, name), H.source)
            Y = Hw.apply(dv)
            start = Cw.coerce(f_start.images[name])
            z = Cw.coerce(f_end.images[name]) - start - int_0_1(Y)
            try:
                c = solve_d(Cw, z)
            except NotExact:
                if k == j:  # pragma: no cover - excluded by the eta solve
                    raise NonzeroObstruction(f"residual {z} is not exact", obstruction=z)
                raise HomotopyUndecided(
                    f"stage {names}: residual class of {z} would need corrections at earlier stages")
            u = IntervalElement.const(start) + int_0_t(Y) + tensor_t(c).d()
            images[name] = u.rehome(B)
        H = Homotopy(sub, B, images, validate=False)
    return Homotopy(A, B, images, validate=False)


# -- representative space W ------------------------------------------------------------

@dataclass
class WStage:
    degree: int
    generators: List[str]
    S: List[Element]
    harmonic: List[Element]
    D: List[Element]

    @property
    def elements(self) -> List[Element]:
        return self.S + self.harmonic


@dataclass
class RepresentativeSpace:
    domain: FreeCDGA        # model of X, where the images live
    codomain: FreeCDGA      # model of Y, presented by extensions
    stages: List[WStage] = field(default_factory=list)

    def elements(self, upto: Optional[int] = None) -> List[Element]:
        out = []
        for s in self.stages[: upto if upto is not None else len(self.stages)]:
            out.extend(s.elements)
        return out

    def algebra_span(self, n: int, upto: Optional[int] = None) -> List[list]:
        """Basis vectors (in the degree-n monomial basis) of Q[W]^n."""
        return subalgebra_span(self.domain, self.elements(upto), n)

    def contains(self, x: Element, upto: Optional[int] = None) -> bool:
        if x.is_zero():
            return True
        n = x.degree
        X = self.domain
        Xw = X if X.truncation >= n else X.with_truncation(n)
        vecs = self.algebra_span(n, upto)
        return in_span(vecs, vector_of(Xw.coerce(x) if x.algebra != Xw else x, Xw._basis_any(n)))

    def to_dict(self) -> dict:
        return {
            "stages": [
                {"degree": s.degree, "generators": s.generators,
                 "S": [str(x) for x in s.S], "harmonic": [str(x) for x in s.harmonic]}
                for s in self.stages
            ]
        }


def subalgebra_span(X: FreeCDGA, gens: Sequence[Element], n: int) -> List[list]:
    """Independent vectors spanning the degree-n part of the subalgebra generated by gens."""
    Xw = X if X.truncation >= n else X.with_truncation(n)
    basis = Xw._basis_any(n)
    if n == 0:
        return [vector_of(Xw.one(), basis)]
    items = [(Xw.coerce(g) if g.algebra != Xw else g) for g in gens if g]
    items = [(g, g.degree) for g in items]
    vecs = []
    # products of elements with nondecreasing index whose degrees sum to n
    def rec(start, remaining, acc):
        if remaining == 0:
            vecs.append(vector_of(acc, basis))
            return
        for i in range(start, len(items)):
            g, dg = items[i]
            if dg <= remaining:
                prod = acc * g
                if prod:
                    rec(i, remaining - dg, prod)
    rec(0, n, Xw.one())
    if not vecs:
        return []
    R, piv = rref(vecs, len(basis))
    return [list(r) for r in R]


def construct_W(domain_model: FreeCDGA, Y_model: FreeCDGA) -> RepresentativeSpace:
    X = domain_model
    W = RepresentativeSpace(X, Y_model)
    for names in Y_model.stages():
        n = Y_model.generators[Y_model.index[names[0]]].degree
        if n > X.truncation:
            break
        Xw = X if X.truncation > n else X.with_truncation(n + 1)
        span = subalgebra_span(X, W.elements(), n + 1)
        D_vecs = []
        S = []
        tgt = Xw._basis_any(n + 1)
        for v in span:
            y = element_of(Xw, tgt, v)
            try:
                x = solve_d(Xw, y)
            except NotExact:
                continue
            if not in_span(D_vecs, v):
                D_vecs.append(v)
                S.append(X.coerce(x))
        D = [element_of(Xw, tgt, v) for v in D_vecs]
        harmonic = list(cached_cohomology(X, n).representatives)
        W.stages.append(WStage(n, list(names), S, harmonic, D))
    return W


@dataclass
class StageTrace:
    degree: int
    generators: List[str]
    input_norm: Fraction
    output_norm: Fraction
    homotopy_norm: Fraction

    def to_dict(self) -> dict:
        return {"degree": self.degree, "generators": self.generators,
                "input_norm": str(self.input_norm), "output_norm": str(self.output_norm),
                "homotopy_norm": str(self.homotopy_norm)}


def _interval_norm(u: IntervalElement) -> Fraction:
    vals = [e.sup_norm() for e in u.poly.values()] + [e.sup_norm() for e in u.dt.values()]
    return max(vals, default=Fraction(0))


def w_coordinates(stage: WStage, x: Element) -> List[Fraction]:
    """Coordinates of x in the basis S + harmonic of one stage."""
    els = stage.elements
    if x.is_zero():
        return [Fraction(0)] * len(els)
    n = stage.degree
    X = els[0].algebra if els else x.algebra
    basis = X._basis_any(n)
    cols = [vector_of(e, basis) for e in els]
    v = vector_of(X.coerce(x) if x.algebra != X else x, basis)
    sol = solve(columns_to_rows(cols, len(basis)), v, len(cols)) if cols else None
    if sol is None:
        raise NotInW(f"{x} is not in the span of the stage-{n} part of W")
    return sol


def homotope_into_W(phi_prime: DGAMap, W: RepresentativeSpace):
    """Return (phi, H, trace) with phi in Q[W] and H a homotopy phi_prime ~ phi."""
    Y, X = phi_prime.source, phi_prime.target
    if Y != W.codomain or X != W.domain:
        raise ValidationError("W was built for a different pair of models")
    images: Dict[str, Element] = {}
    H_images: Dict[str, IntervalElement] = {}
    trace: List[StageTrace] = []
    stages = Y.stages()
    for k, names in enumerate(stages):
        if k >= len(W.stages):
            raise NotInW(f"W has no stage for generators {names}")
        st = W.stages[k]
        n = st.degree
        prev = Y.prefix(Y.index[names[0]])
        top = n + 1
        Xw = X if X.truncation >= top else X.with_truncation(top)
        H_prev = Homotopy(prev, X, {g.name: H_images[g.name] for g in prev.generators}, validate=False)
        phi_prev = DGAMap(prev, X, {g.name: images[g.name] for g in prev.generators}, validate=False)
        H_w = H_prev.with_truncation(max(prev.truncation, top), Xw.truncation)
        phi_w = phi_prev.with_truncation(max(prev.truncation, top), Xw.truncation)
        Hn = cached_cohomology(X, n)
        S_basis = Xw._basis_any(n)
        S_cols = [vector_of(Xw.coerce(s), S_basis) for s in st.S]
        dS_basis = Xw._basis_any(n + 1)
        dS_cols = [vector_of(Xw.coerce(s).d(), dS_basis) for s in st.S]
        in_norm = out_norm = h_norm = Fraction(0)
        for name in names:
            dv = restrict_to_prefix(d_of_generator(Y, name), prev)
            target = phi_w.apply(dv)
            if target:
                coeffs = solve(columns_to_rows(dS_cols, len(dS_basis)), vector_of(target, dS_basis),
                               len(dS_cols)) if dS_cols else None
                if coeffs is None:
                    raise NotExact(f"phi(d{name}) = {target} is not hit by d on S")
                b_tilde = element_of(Xw, S_basis, [
                    sum((c * col[i] for c, col in zip(coeffs, S_cols)), Fraction(0))
                    for i in range(len(S_basis))])
            else:
                b_tilde = Xw.zero()
            Y_int = H_w.apply(dv)
            src = Xw.coerce(phi_prime.images[name])
            zeta = b_tilde - src - int_0_1(Y_int)
            coords = Hn.project(X.coerce(zeta))
            a = Xw.zero()
            for c, rep in zip(coords, Hn.representatives):
                if c:
                    a = a + Xw.coerce(rep).scale(c)
            b = b_tilde - a
            c_el = solve_d(Xw, zeta - a)
            u = IntervalElement.const(src) + int_0_t(Y_int) + tensor_t(c_el).d()
            images[name] = X.coerce(b)
            H_images[name] = u.rehome(X)
            in_norm = max(in_norm, phi_prime.images[name].sup_norm())
            wc = w_coordinates(st, images[name])
            out_norm = max([out_norm] + [abs(x) for x in wc])
            h_norm = max(h_norm, _interval_norm(u))
        trace.append(StageTrace(n, list(names), in_norm, out_norm, h_norm))
    phi = DGAMap(Y, X, images, validate=False)
    H = Homotopy(Y, X, H_images, validate=False,
                 tcap=max(8, max((v.t_degree() for v in H_images.values()), default=0)))
    return phi, H, trace


def images_in_W(phi: DGAMap, W: RepresentativeSpace) -> bool:
    return all(W.contains(v) for v in phi.images.values())
