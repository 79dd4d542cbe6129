"""Quantitative homological algebra for maps from finitely generated abelian groups.

A homomorphism h: A -> V = Q^m is stored by the images of the free
generators; torsion generators map to 0. Balls are closed and, unless
stated otherwise, use the l-infinity norm.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DimensionTooLarge, SearchWindowExceeded, UnboundedPreimage, ValidationError
from .linalg import (
    coset_norm_min,
    integer_kernel,
    integer_normal_form,
    nullspace,
    rank,
    smith_normal_form,
    solve,
    transpose,
)

NORMS = ("linf", "l1")
MAX_SURJECTIVE_DIM = 4
DEFAULT_WINDOW = 20


@dataclass(frozen=True)
class FGGroup:
    free_rank: int
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValidationError("free rank must be nonnegative")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValidationError(f"invariant factors {self.torsion} do not divide in sequence")
        if any(t < 2 for t in self.torsion):
            raise ValidationError("torsion invariant factors must be at least 2")

    @property
    def torsion_order(self) -> int:
        return math.prod(self.torsion)

    @property
    def ngens(self) -> int:
        return len(self.torsion) + self.free_rank


@dataclass
class NormedHom:
    source: FGGroup
    images: List[List[Fraction]]  # one vector per free generator
    target_dim: int
    norm: str = "linf"

    def __post_init__(self):
        if self.norm not in NORMS:
            raise ValidationError(f"unknown norm {self.norm!r}")
        self.images = [[Fraction(x) for x in v] for v in self.images]
        if len(self.images) != self.source.free_rank:
            raise ValidationError("need one image per free generator")
        if any(len(v) != self.target_dim for v in self.images):
            raise ValidationError("image vectors have the wrong length")

    @property
    def matrix(self) -> List[List[Fraction]]:
        """target_dim x free_rank matrix (columns are images)."""
        return [[v[i] for v in self.images] for i in range(self.target_dim)]

    def apply(self, x: Sequence[int]) -> List[Fraction]:
        """Image of the free coordinates x."""
        return [sum((Fraction(c) * v[i] for c, v in zip(x, self.images)), Fraction(0))
                for i in range(self.target_dim)]


def vector_norm(v: Sequence, norm: str = "linf") -> Fraction:
    if not v:
        return Fraction(0)
    if norm == "l1":
        return sum((abs(Fraction(x)) for x in v), Fraction(0))
    return max(abs(Fraction(x)) for x in v)


def operator_norm(M: Sequence[Sequence], norm: str = "linf") -> Fraction:
    """Operator norm for l-infinity (max row sum) or l1 (max column sum)."""
    if not M or not M[0]:
        return Fraction(0)
    if norm == "l1":
        return max(sum(abs(Fraction(r[j])) for r in M) for j in range(len(M[0])))
    return max(sum(abs(Fraction(x)) for x in r) for r in M)


def _check_norm_dim(h: NormedHom):
    if h.norm == "l1" and h.target_dim > 1:
        raise ValidationError("the l1 preset is only decided for targets of dimension <= 1")


def _coefficient_bounds(M: List[List[Fraction]], ncols: int, radius: Fraction) -> List[int]:
    """|x_j| bound for integer x with |Mx|_inf <= radius, M of full column rank."""
    MT = transpose(M)
    # left inverse P = (M^T M)^{-1} M^T, computed column by column
    G = [[sum((a * b for a, b in zip(MT[i], MT[j])), Fraction(0)) for j in range(ncols)]
         for i in range(ncols)]
    bounds = [Fraction(0)] * ncols
    for i in range(len(M)):
        col = solve(G, [MT[j][i] for j in range(ncols)], ncols)
        for j in range(ncols):
            bounds[j] += abs(col[j]) * radius
    return [math.floor(b) for b in bounds]


def lattice_points(h: NormedHom, radius, window: Optional[int] = None) -> List[Tuple[tuple, tuple]]:
    """Free coordinates x (and images) with |h(x)|_inf <= radius; h injective on the free part."""
    radius = Fraction(radius)
    r = h.source.free_rank
    if r == 0:
        return [((), tuple(Fraction(0) for _ in range(h.target_dim)))]
    M = h.matrix
    bounds = _coefficient_bounds(M, r, radius)
    if window is not None and any(b > window for b in bounds):
        # the a-priori bound is loose; enumerate the window and one layer beyond it
        ranges = [range(-window - 1, window + 2)] * r
    else:
        ranges = [range(-b, b + 1) for b in bounds]
    out = []
    for x in itertools.product(*ranges):
        y = h.apply(x)
        if vector_norm(y) <= radius:
            if window is not None and any(abs(c) > window for c in x):
                raise SearchWindowExceeded(f"lattice point {x} lies outside the window [-{window}, {window}]")
            out.append((x, tuple(y)))
    return out


@dataclass
class InjectivityResult:
    constant: object  # int or math.inf
    witness: Optional[list] = None


def injectivity_constant(h: NormedHom, window: Optional[int] = None) -> InjectivityResult:
    """Largest number of group elements mapped into one closed 1-ball."""
    _check_norm_dim(h)
    r = h.source.free_rank
    if r and rank(h.matrix, r) < r:
        kernel = integer_kernel(_integer_matrix(h.matrix), r)
        return InjectivityResult(math.inf, kernel[0])
    pts = [y for _, y in lattice_points(h, 2, window)]
    m = h.target_dim
    best = 0
    if m == 0:
        best = len(pts)
    else:
        corners = [sorted({p[i] for p in pts}) for i in range(m)]
        for c in itertools.product(*corners):
            hi = [ci + 2 for ci in c]
            cnt = sum(1 for p in pts if all(c[i] <= p[i] <= hi[i] for i in range(m)))
            best = max(best, cnt)
    return InjectivityResult(best * h.source.torsion_order)


def c_injective(h: NormedHom, C, strict: bool = False) -> bool:
    res = injectivity_constant(h)
    if res.constant == math.inf:
        if strict:
            raise UnboundedPreimage("kernel of positive rank: every ball has infinitely many preimages",
                                    witness=res.witness)
        return False
    return res.constant <= Fraction(C)


def _integer_matrix(M: Sequence[Sequence[Fraction]]) -> List[List[int]]:
    out = []
    for r in M:
        den = 1
        for x in r:
            den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
        out.append([int(Fraction(x) * den) for x in r])
    return out


def lattice_basis(h: NormedHom) -> List[List[Fraction]]:
    """Basis (as columns) of the image lattice h(A) in Q^m."""
    r = h.source.free_rank
    if r == 0:
        return []
    M = h.matrix
    den = 1
    for row in M:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    Mi = [[int(x * den) for x in row] for row in M]
    _, D, V = smith_normal_form(Mi)
    k = sum(1 for i in range(min(len(D), r)) if D[i][i])
    MV = [[sum((Mi[i][t] * V[t][j] for t in range(r)), 0) for j in range(r)] for i in range(len(Mi))]
    return [[Fraction(MV[i][j], den) for i in range(len(Mi))] for j in range(k)]


def lll_reduce(basis: List[List[Fraction]], delta=Fraction(3, 4)) -> List[List[Fraction]]:
    """LLL-reduced copy of a list of linearly independent rational vectors."""
    b = [list(v) for v in basis]
    n = len(b)

    def dot(u, v):
        return sum((x * y for x, y in zip(u, v)), Fraction(0))

    def gso():
        bs, mu = [], [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = list(b[i])
            for j in range(i):
                mu[i][j] = dot(b[i], bs[j]) / dot(bs[j], bs[j])
                v = [x - mu[i][j] * y for x, y in zip(v, bs[j])]
            bs.append(v)
        return bs, mu

    bs, mu = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                bs, mu = gso()
        if dot(bs[k], bs[k]) >= (delta - mu[k][k - 1] ** 2) * dot(bs[k - 1], bs[k - 1]):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bs, mu = gso()
            k = max(k - 1, 1)
    return b


def covering_radius(h: NormedHom, window: Optional[int] = None):
    """Smallest C such that every point of V is within C of h(A) (math.inf if not full rank).

    With a window, every lattice point the computation relies on must come from
    free coordinates in [-window, window]; otherwise SearchWindowExceeded.
    """
    _check_norm_dim(h)
    m = h.target_dim
    if m > MAX_SURJECTIVE_DIM:
        raise DimensionTooLarge(f"target dimension {m} exceeds {MAX_SURJECTIVE_DIM}")
    if m == 0:
        return Fraction(0)
    basis = lattice_basis(h)
    if len(basis) < m:
        return math.inf
    basis = lll_reduce(basis)
    # integer coordinates: scale so that the basis is integral
    den = 1
    for b in basis:
        for x in b:
            den = den * x.denominator // math.gcd(den, x.denominator)
    B = [[int(x * den) for x in b] for b in basis]  # columns
    lo = [sum(min(0, b[i]) for b in B) for i in range(m)]
    hi = [sum(max(0, b[i]) for b in B) for i in range(m)]
    # every point of the parallelepiped is within half its longest box side of a vertex
    U = max(hi[i] - lo[i] for i in range(m))
    Bm = [[Fraction(B[j][i]) for j in range(m)] for i in range(m)]
    inv_cols = [solve(Bm, [Fraction(int(i == k)) for i in range(m)], m) for k in range(m)]
    reach = max(max(abs(l - U), abs(h_ + U)) for l, h_ in zip(lo, hi))
    kb = [math.floor(sum(abs(inv_cols[i][j]) for i in range(m)) * reach) for j in range(m)]
    M = h.matrix
    r = h.source.free_rank
    pts = []
    for k in itertools.product(*[range(-b, b + 1) for b in kb]):
        p = [sum(B[j][i] * k[j] for j in range(m)) for i in range(m)]
        if all(lo[i] - U <= p[i] <= hi[i] + U for i in range(m)):
            if window is not None:
                x = solve(M, [Fraction(c, den) for c in p], r)
                if any(abs(c) > window for c in x):
                    raise SearchWindowExceeded(f"covering radius needs the group element {x}")
            pts.append(p)
    cands = set()
    for i in range(m):
        vals = sorted({p[i] for p in pts})
        for a in vals:
            for b in vals:
                if 0 < b - a <= 2 * U:
                    cands.add(b - a)  # twice a candidate radius

    def covered(two_r: int) -> bool:
        # cuts live in doubled coordinates, cell midpoints in quadrupled ones
        axes = []
        for i in range(m):
            cuts = {2 * lo[i], 2 * hi[i]}
            for p in pts:
                for v in (2 * p[i] - two_r, 2 * p[i] + two_r):
                    if 2 * lo[i] < v < 2 * hi[i]:
                        cuts.add(v)
            cuts = sorted(cuts)
            axes.append([a + b for a, b in zip(cuts, cuts[1:])] or [4 * lo[i]])
        for mid in itertools.product(*axes):
            if not any(all(abs(mid[i] - 4 * p[i]) <= 2 * two_r for i in range(m)) for p in pts):
                return False
        return True

    cands = sorted(cands)
    if not cands:
        return Fraction(0)
    lo_i, hi_i = 0, len(cands) - 1
    while lo_i < hi_i:
        mid = (lo_i + hi_i) // 2
        if covered(cands[mid]):
            hi_i = mid
        else:
            lo_i = mid + 1
    return Fraction(cands[lo_i], 2 * den)


def c_surjective(h: NormedHom, C) -> bool:
    mu = covering_radius(h)
    if mu == math.inf:
        return False
    return mu <= Fraction(C)


# -- the four lemmas ------------------------------------------------------------------------

def four_lemma_predict(kind: str, C1=1, C2=1, C3=1, C4=1, tau=1, rk1: int = 0, rk2: int = 0,
                       rk3: int = 0) -> Fraction:
    C1, C2, C3, C4, tau = (Fraction(x) for x in (C1, C2, C3, C4, tau))
    if kind == "injective":
        return (C1 + tau) ** rk1 * tau ** rk2 * C2 * C4
    if kind == "surjective":
        return C1 + 3 * tau * C3 ** (rk3 + 1) * C4
    raise ValidationError(f"kind must be 'injective' or 'surjective', got {kind!r}")


def lifting_constant(m2: Sequence[Sequence]) -> Fraction:
    """Smallest tau with min{|u| : m2 u = v} <= tau |v| on the image (l-infinity)."""
    rows = len(m2)
    cols = len(m2[0]) if rows else 0
    if not rows or not cols:
        return Fraction(0)
    M = [[Fraction(x) for x in r] for r in m2]
    k = rank(M, cols)
    if k == 0:
        return Fraction(0)
    # basis of the image: independent columns
    from .linalg import rref
    _, piv = rref(M, cols)
    Bcols = [[M[i][j] for i in range(rows)] for j in piv]
    ker = nullspace(M, cols)
    best = Fraction(0)
    # vertices of image cap unit cube: k active coordinates at +-1
    for idx in itertools.combinations(range(rows), k):
        sub = [[Bcols[j][i] for j in range(k)] for i in idx]
        if rank(sub, k) < k:
            continue
        for signs in itertools.product((1, -1), repeat=k):
            z = solve(sub, [Fraction(s) for s in signs], k)
            v = [sum((z[j] * Bcols[j][i] for j in range(k)), Fraction(0)) for i in range(rows)]
            if vector_norm(v) > 1:
                continue
            u0 = solve(M, v, cols)
            best = max(best, coset_norm_min(u0, ker))
    return best


@dataclass
class QuadDiagram:
    groups: List[FGGroup]
    f: List[List[List[int]]]            # f1, f2 (integer); f3 given by the cokernel data
    m: List[List[List[Fraction]]]       # m1, m2, m3
    phis: List[NormedHom]               # phi1 .. phi4
    tau: Fraction
    coker_U: List[List[int]] = field(default_factory=list)
    coker_factors: List[int] = field(default_factory=list)

    def ranks(self) -> Tuple[int, int, int]:
        out = []
        for M in self.m:
            cols = len(M[0]) if M else 0
            out.append(rank(M, cols) if M and cols else 0)
        return tuple(out)

    def check(self) -> None:
        """Exactness of the bottom row, commutativity of squares, norms of m1 and m3."""
        dims = [p.target_dim for p in self.phis]
        m1, m2, m3 = self.m
        for M, a, b in ((m1, 0, 1), (m2, 1, 2), (m3, 2, 3)):
            if len(M) != dims[b] or any(len(r) != dims[a] for r in M):
                raise ValidationError("bottom-row matrix shapes disagree with the vertical maps")
        if operator_norm(m1) > 1 or operator_norm(m3) > 1:
            raise ValidationError("m1 and m3 must have operator norm <= 1")
        r1, r2, r3 = self.ranks()
        if r1 + r2 != dims[1] or r2 + r3 != dims[2]:
            raise ValidationError("bottom row is not exact")


def _mat_mul(A, B):
    if not A or not B:
        return [[Fraction(0)] * (len(B[0]) if B else 0) for _ in A]
    return [[sum((Fraction(A[i][t]) * Fraction(B[t][j]) for t in range(len(B))), Fraction(0))
             for j in range(len(B[0]))] for i in range(len(A))]


def _inverse(G: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(G)
    cols = [solve(G, [Fraction(int(i == k)) for i in range(n)], n) for k in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _random_invertible(rng: random.Random, n: int, entry: int) -> List[List[Fraction]]:
    while True:
        G = [[Fraction(rng.randint(-entry, entry)) for _ in range(n)] for _ in range(n)]
        if rank(G, n) == n:
            return G


def random_diagram(rng: random.Random, max_rank: int = 2, max_entry: int = 3) -> QuadDiagram:
    """Exact rows A1 -> A2 -> A3 -> A4 = coker f2 over their rationalizations."""
    r2 = rng.randint(1, max_rank)
    r3 = rng.randint(1, max_rank)
    f2 = [[rng.randint(-max_entry, max_entry) for _ in range(r2)] for _ in range(r3)]
    kern = integer_kernel(f2, r2)
    r1 = len(kern)
    f1 = [[kern[j][i] for j in range(r1)] for i in range(r2)]
    U, D, _ = smith_normal_form(f2)
    diag = [D[i][i] for i in range(min(r3, r2)) if D[i][i]]
    rho = len(diag)
    torsion = tuple(d for d in diag if d > 1)
    r4 = r3 - rho
    f3_q = [[Fraction(x) for x in U[i]] for i in range(rho, r3)]  # free part of the quotient
    g = [_random_invertible(rng, r, max_entry) for r in (r1, r2, r3, r4)]
    ginv = [_inverse(G) if G else [] for G in g]

    def conj(i, F):  # g_{i+1} F g_i^{-1}
        Fq = [[Fraction(x) for x in row] for row in F]
        if not g[i] or not g[i + 1]:
            return [[Fraction(0)] * len(g[i]) for _ in range(len(g[i + 1]))]
        return _mat_mul(_mat_mul(g[i + 1], Fq), ginv[i])

    raw = [conj(0, f1), conj(1, f2), conj(2, f3_q)]
    n1 = operator_norm(raw[0])
    n3 = operator_norm(raw[2])
    s = [max(Fraction(1), n1), Fraction(1), max(Fraction(1), n3), Fraction(1)]
    m1 = [[x * s[1] / s[0] for x in row] for row in raw[0]]
    m2 = [[x * s[2] / s[1] for x in row] for row in raw[1]]
    m3 = [[x * s[3] / s[2] for x in row] for row in raw[2]]
    groups = [FGGroup(r1), FGGroup(r2), FGGroup(r3), FGGroup(r4, torsion)]
    phis = []
    for i, (G, grp) in enumerate(zip(g, groups)):
        n = len(G)
        imgs = [[G[row][col] * s[i] for row in range(n)] for col in range(n)]
        phis.append(NormedHom(grp, imgs, n))
    tau = lifting_constant(m2) if m2 and m2[0] else Fraction(0)
    d = QuadDiagram(groups, [f1, f2], [m1, m2, m3], phis, tau, U, diag)
    d.check()
    return d


@dataclass
class FourLemmaReport:
    kind: str
    predicted: Optional[Fraction]
    measured: Optional[Fraction]
    window: int
    seed: Optional[int]
    ok: Optional[bool]
    inconclusive: bool = False
    constants: Dict[str, str] = field(default_factory=dict)

    @property
    def ratio(self) -> Optional[Fraction]:
        if self.predicted in (None, 0) or self.measured is None:
            return None
        return Fraction(self.measured) / Fraction(self.predicted)

    def to_dict(self) -> dict:
        return {"kind": self.kind,
                "predicted": None if self.predicted is None else str(self.predicted),
                "measured": None if self.measured is None else str(self.measured),
                "window": [-self.window, self.window], "seed": self.seed, "ok": self.ok,
                "inconclusive": self.inconclusive, "constants": self.constants}


def _inj(h: NormedHom, window: int) -> Fraction:
    c = injectivity_constant(h, window).constant
    return Fraction(c) if c != math.inf else c


def four_lemma_verify(d: QuadDiagram, kind: str, window: int = DEFAULT_WINDOW,
                      seed: Optional[int] = None) -> FourLemmaReport:
    rk1, rk2, rk3 = d.ranks()
    try:
        if kind == "injective":
            C1 = covering_radius(d.phis[0], window)
            C2 = _inj(d.phis[1], window)
            C4 = _inj(d.phis[3], window)
            measured = _inj(d.phis[2], window)
            predicted = four_lemma_predict(kind, C1=C1, C2=C2, C4=C4, tau=d.tau, rk1=rk1, rk2=rk2)
            consts = {"C1": str(C1), "C2": str(C2), "C4": str(C4), "tau": str(d.tau)}
        elif kind == "surjective":
            C1 = covering_radius(d.phis[0], window)
            C3 = covering_radius(d.phis[2], window)
            C4 = _inj(d.phis[3], window)
            measured = covering_radius(d.phis[1], window)
            predicted = four_lemma_predict(kind, C1=C1, C3=C3, C4=C4, tau=d.tau, rk3=rk3)
            consts = {"C1": str(C1), "C3": str(C3), "C4": str(C4), "tau": str(d.tau)}
        else:
            raise ValidationError(f"unknown kind {kind!r}")
    except SearchWindowExceeded:
        return FourLemmaReport(kind, None, None, window, seed, None, inconclusive=True)
    return FourLemmaReport(kind, predicted, measured, window, seed, measured <= predicted,
                           constants=consts)


# -- finite-to-one bound -----------------------------------------------------------------------

def integral_homology(cells: Sequence[int], boundaries: Dict[int, Sequence[Sequence[int]]]):
    """Per degree k: (free rank, torsion factors) of H_k of the cellular chain complex.

    boundaries[k] is the c_{k-1} x c_k matrix of d_k (missing means zero).
    """
    n = len(cells) - 1
    ranks, factors = {}, {}
    for k in range(n + 2):
        M = boundaries.get(k)
        if M and M[0]:
            q = integer_normal_form([list(r) for r in M])
            ranks[k] = len(q.invariant_factors)
            factors[k] = [f for f in q.invariant_factors if f > 1]
        else:
            ranks[k] = 0
            factors[k] = []
    out = []
    for k in range(n + 1):
        free = cells[k] - ranks[k] - ranks[k + 1]
        out.append((free, factors[k + 1]))
    return out


def _validate_complex(cells, boundaries):
    for k, M in boundaries.items():
        if k < 1 or k >= len(cells):
            raise ValidationError(f"boundary in degree {k} is out of range")
        if len(M) != cells[k - 1] or any(len(r) != cells[k] for r in M):
            raise ValidationError(f"boundary d_{k} must be {cells[k - 1]} x {cells[k]}")
    for k in boundaries:
        if k + 1 in boundaries:
            A, B = boundaries[k], boundaries[k + 1]
            for i in range(len(A)):
                for j in range(len(B[0]) if B else 0):
                    if sum(A[i][t] * B[t][j] for t in range(len(B))):
                        raise ValidationError(f"d_{k} d_{k + 1} != 0")


def cohomology_order(cells, boundaries, k: int, coeffs: Sequence[int]) -> int:
    """|H^k(X; G)| for G = sum of Z/g over coeffs, by universal coefficients."""
    H = integral_homology(cells, boundaries)
    if k >= len(H):
        return 1
    order = 1
    free, tors = H[k]
    for g in coeffs:
        order *= g ** free                     # Hom(Z, Z/g)
        for t in tors:
            order *= math.gcd(t, g)            # Hom(Z/t, Z/g)
        if k >= 1:
            for t in H[k - 1][1]:
                order *= math.gcd(t, g)        # Ext(Z/t, Z/g)
    return order


def finite_to_one_bound(cells: Sequence[int], boundaries: Dict[int, Sequence[Sequence[int]]],
                        coefficients: Dict[int, Sequence[int]]) -> int:
    """prod_{k=1}^{dim X} |H^k(X; pi_k)| for finite coefficient groups pi_k."""
    _validate_complex(cells, boundaries)
    out = 1
    for k in range(1, len(cells)):
        coeffs = [int(g) for g in coefficients.get(k, []) if int(g) > 1]
        if any(int(g) < 1 for g in coefficients.get(k, [])):
            raise ValidationError("coefficient orders must be positive")
        if coeffs:
            out *= cohomology_order(cells, boundaries, k, coeffs)
    return out


def disjoint_union(a, b):
    """Cellular data (cells, boundaries) of a disjoint union."""
    cells_a, bd_a = a
    cells_b, bd_b = b
    n = max(len(cells_a), len(cells_b))
    ca = list(cells_a) + [0] * (n - len(cells_a))
    cb = list(cells_b) + [0] * (n - len(cells_b))
    cells = [x + y for x, y in zip(ca, cb)]
    bd = {}
    for k in range(1, n):
        A = bd_a.get(k) or [[0] * ca[k] for _ in range(ca[k - 1])]
        B = bd_b.get(k) or [[0] * cb[k] for _ in range(cb[k - 1])]
        rows = [list(r) + [0] * cb[k] for r in A] + [[0] * ca[k] + list(r) for r in B]
        if rows:
            bd[k] = rows
    return cells, bd
