"""Counting integral mapping classes: torsion, density and growth functions."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .errors import DegenerateDirection, NotInW, ValidationError


class _Unbounded:
    """Marker for an infinite fiber."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Unbounded"

    __str__ = __repr__


Unbounded = _Unbounded()


# -- torsion growth -------------------------------------------------------------------

def iota1_lattice_matrix(d: int) -> List[List[int]]:
    """Integer matrix of iota_1 on the integral level-1 classes over a -> d y.

    Columns are integral generators of the eta's on the first stage of the
    S4 model; rows are coordinates of eta(a^2) in the degree-7 cohomology of
    the S3xS4 model.
    """
    from .homotopy import DGAMap
    from .obstruction import cached_cohomology, d_of_generator, integral_eta_lattice, restrict_to_prefix
    from .zoo import model

    S4 = model("s4").algebra
    X = model("s3xs4").algebra
    base = S4.prefix(1)
    phi = DGAMap(base, X, {"a": X.gen("y").scale(d)}, validate=False)
    etas = integral_eta_lattice(phi, 1)
    H7 = cached_cohomology(X, 7)
    db = restrict_to_prefix(d_of_generator(S4, "b"), base)
    cols = []
    for F in etas:
        coords = H7.project(F.apply(db))
        if any(Fraction(c).denominator != 1 for c in coords):
            raise ValidationError("iota_1 image is not integral in the chosen basis")
        cols.append([int(c) for c in coords])
    if not cols:
        return [[] for _ in range(H7.dimension)]
    return [[col[i] for col in cols] for i in range(H7.dimension)]


def torsion_count(d: int):
    """Number of classes over the rational class a -> d y (Unbounded for d = 0)."""
    from .linalg import integer_normal_form

    M = iota1_lattice_matrix(d)
    q = integer_normal_form(M, ambient_rank=len(M))
    return Unbounded if not q.is_finite else q.order


# -- density growth ----------------------------------------------------------------------

def _xgcd(a: int, b: int):
    """(g, x, y) with a x + b y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _line_meets_box(a1: int, a2: int, m: int, r: int) -> bool:
    """Is there an integer (b1, b2) with |b_i| <= r and a2 b1 - a1 b2 = m?"""
    g, x, y = _xgcd(a2, -a1)
    if m % g:
        return False
    k = m // g
    p1, p2 = x * k, y * k
    # solutions: (p1, p2) + s (a1, a2) / g
    s_lo, s_hi = -math.inf, math.inf
    for p, step in ((p1, a1 // g), (p2, a2 // g)):
        if step == 0:
            if abs(p) > r:
                return False
            continue
        lo = Fraction(-r - p, step)
        hi = Fraction(r - p, step)
        if step < 0:
            lo, hi = hi, lo
        s_lo = max(s_lo, math.ceil(lo))
        s_hi = min(s_hi, math.floor(hi))
    return s_lo <= s_hi


def density_count(alpha1: int, alpha2: int, R) -> int:
    """Distinct values of alpha2*b1 - alpha1*b2 over integer points of the closed l-infinity R-ball."""
    if alpha1 == 0 and alpha2 == 0:
        raise DegenerateDirection("direction (0, 0) has no lines")
    R = Fraction(R)
    if R < 0:
        raise ValidationError("radius must be nonnegative")
    r = math.floor(R)
    span = (abs(alpha1) + abs(alpha2)) * r
    return sum(1 for m in range(-span, span + 1) if _line_meets_box(alpha1, alpha2, m, r))


def density_count_bruteforce(alpha1: int, alpha2: int, R) -> int:
    if alpha1 == 0 and alpha2 == 0:
        raise DegenerateDirection("direction (0, 0) has no lines")
    r = math.floor(Fraction(R))
    return len({alpha2 * b1 - alpha1 * b2 for b1 in range(-r, r + 1) for b2 in range(-r, r + 1)})


# -- growth function --------------------------------------------------------------------

_PHI: List[int] = [0, 1]


def totients(n: int) -> List[int]:
    """Euler phi for 0..n (linear sieve, memoized)."""
    global _PHI
    if n < len(_PHI):
        return _PHI
    phi = [0] * (n + 1)
    phi[1] = 1 if n >= 1 else 0
    primes = []
    composite = bytearray(n + 1)
    for i in range(2, n + 1):
        if not composite[i]:
            primes.append(i)
            phi[i] = i - 1
        for p in primes:
            ip = i * p
            if ip > n:
                break
            composite[ip] = 1
            if i % p == 0:
                phi[ip] = phi[i] * p
                break
            phi[ip] = phi[i] * (p - 1)
    _PHI = phi
    return phi


def gcd_sum(N: int) -> int:
    """sum over 0 < a, b <= N of gcd(a, b), via sum_k phi(k) floor(N/k)^2."""
    if N <= 0:
        return 0
    phi = totients(N)
    return sum(phi[k] * (N // k) ** 2 for k in range(1, N + 1))


def gcd_sum_direct(N: int) -> int:
    return sum(math.gcd(a, b) for a in range(1, N + 1) for b in range(1, N + 1))


@dataclass
class GrowthReport:
    parameter: int
    count: int
    terms: List[int]
    oracle: Optional[int] = None
    fit: Optional[Dict[str, float]] = None
    seconds: float = 0.0

    def to_dict(self) -> dict:
        out = {"parameter": self.parameter, "count": self.count, "terms": self.terms,
               "oracle": self.oracle}
        if self.fit is not None:
            out["fit"] = self.fit
        return out


def growth_count(D: int, with_oracle: bool = False) -> GrowthReport:
    """2D^2 + 4 sum_{0<d<D} 2d + sum_{0<|d1|,|d2|<D} 2 gcd(d1, d2)."""
    if D < 1:
        raise ValidationError("D must be positive")
    t0 = time.perf_counter()
    first = 2 * D * D
    second = 4 * (D - 1) * D          # 4 * sum 2d = 4 D (D - 1)
    third = 8 * gcd_sum(D - 1)        # four sign patterns, factor 2
    report = GrowthReport(D, first + second + third, [first, second, third])
    if with_oracle:
        report.oracle = growth_count_direct(D)
    report.seconds = time.perf_counter() - t0
    return report


def growth_count_direct(D: int) -> int:
    total = 2 * D * D
    total += 4 * sum(2 * d for d in range(1, D))
    rng = [d for d in range(-(D - 1), D) if d]
    total += sum(2 * math.gcd(a, b) for a in rng for b in rng)
    return total


def growth_fit(Ds: Sequence[int]) -> Dict[str, object]:
    """Least-squares constant c in count ~ c D^2 ln D, with per-D ratios (approximate)."""
    xs, ys = [], []
    for D in Ds:
        xs.append(D * D * math.log(D))
        ys.append(growth_count(D).count)
    c = sum(x * y for x, y in zip(xs, ys)) / sum(x * x for x in xs)
    ratios = [y / x for x, y in zip(xs, ys)]
    return {"constant": c, "ratios": dict(zip(Ds, ratios)),
            "max_relative_deviation": max(abs(r / c - 1) for r in ratios), "approximate": True}


# -- gcd statistics ---------------------------------------------------------------------

@dataclass
class GcdProportion:
    N: int
    k: int
    observed: Fraction
    upper: Fraction
    lower: float  # (2 - pi^2/6) / (4 k^2) is irrational
    ok: bool

    def to_dict(self) -> dict:
        return {"N": self.N, "k": self.k, "observed": str(self.observed), "upper": str(self.upper),
                "lower_approx": self.lower, "ok": self.ok}


def gcd_pair_count(N: int, k: int) -> int:
    """Pairs 0 < a, b <= N with gcd(a, b) = k."""
    M = N // k
    if M == 0:
        return 0
    phi = totients(M)
    return 2 * sum(phi[1:M + 1]) - 1


def gcd_proportion_bounds(N: int, k: int) -> GcdProportion:
    if not (1 <= k <= N):
        raise ValidationError("need 1 <= k <= N")
    observed = Fraction(gcd_pair_count(N, k), N * N)
    upper = Fraction(1, k * k)
    lower = (2 - math.pi ** 2 / 6) / (4 * k * k)
    return GcdProportion(N, k, observed, upper, lower, lower <= observed <= upper)


# -- ball counts ---------------------------------------------------------------------------

def ball_count_bound(dims: Sequence[int], polys: Sequence[Sequence], R) -> Fraction:
    """R^(sum dims) * prod_k P_k(R); each P_k is a coefficient list, constant term first."""
    R = Fraction(R)
    if any(d < 0 for d in dims):
        raise ValidationError("dimensions must be nonnegative")
    out = R ** sum(dims)
    for coeffs in polys:
        coeffs = [Fraction(c) for c in coeffs]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if coeffs and coeffs[-1] < 0:
            raise ValidationError("polynomials need a nonnegative leading coefficient")
        out *= sum((c * R ** i for i, c in enumerate(coeffs)), Fraction(0))
    return out


# a closed l-infinity ball of radius R >= 1 in Q^k meets at most (3R)^k integer points,
# so each stage contributes R^dim * 3^dim; the second stage has no extra torsion factor
# beyond the h-lattice already counted
S3XS4_BALL_INPUT = {"dims": [1, 1], "polys": [[3], [3]]}


def s3xs4_ball_classes(R: int) -> int:
    """Classes of maps S3xS4 -> S4 with a representative of W-coordinates in the R-ball.

    Representatives a -> d y, b -> d^2 z + h x y have coordinates (d, d^2, h);
    classes are (d, h mod 2|d|) for d != 0 and (0, h) otherwise.
    """
    seen = set()
    for d in range(-R, R + 1):
        if d * d > R:
            continue
        for h in range(-R, R + 1):
            seen.add((d, h % (2 * abs(d))) if d else (0, h))
    return len(seen)


# -- lipschitz proxy -----------------------------------------------------------------------

def lipschitz_proxy(phi, W) -> float:
    """max over generators v of |W-coordinates of phi(v)|^(1/deg v) (approximate float)."""
    from .obstruction import w_coordinates

    Y = phi.source
    out = 0.0
    for k, names in enumerate(Y.stages()):
        if k >= len(W.stages):
            raise NotInW(f"W has no stage for {names}")
        st = W.stages[k]
        for name in names:
            coords = w_coordinates(st, phi.images[name])
            norm = max((abs(c) for c in coords), default=Fraction(0))
            deg = Y.generators[Y.index[name]].degree
            out = max(out, float(norm) ** (1.0 / deg))
    return out
