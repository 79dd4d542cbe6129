"""One-shot reproductions of the three worked examples, as lists of named checks."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

from .errors import NonzeroObstruction
from .growth import (
    Unbounded,
    density_count,
    density_count_bruteforce,
    gcd_proportion_bounds,
    growth_count,
    growth_count_direct,
    growth_fit,
    torsion_count,
)
from .homotopy import is_homotopy
from .obstruction import homotopy_between
from .zoo import classify_map, example1_map, example2_map, model


@dataclass
class Check:
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


@dataclass
class ReproReport:
    example: str
    checks: List[Check]
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> dict:
        return {"example": self.example, "ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def torsion_check(dmax: int = 50) -> Check:
    t0 = time.perf_counter()
    bad = [d for d in range(1, dmax + 1) if torsion_count(d) != 2 * d]
    zero = torsion_count(0)
    secs = time.perf_counter() - t0
    return Check("torsion count equals 2d, and d = 0 is unbounded",
                 not bad and zero is Unbounded,
                 {"range": [1, dmax], "mismatches": bad, "d0": str(zero), "seconds": round(secs, 3)})


def example1() -> ReproReport:
    t0 = time.perf_counter()
    checks = [torsion_check()]
    inv = classify_map("s4->s3xs4", example1_map(1, 0))
    checks.append(Check("a -> y, b -> z classifies as (1, 0)",
                        inv == {"d": 1, "h": 0}, {k: str(v) for k, v in inv.items()}))
    inv = classify_map("s4->s3xs4", example1_map(0, 3))
    checks.append(Check("a -> 0, b -> 3xy classifies as (0, 3)",
                        inv == {"d": 0, "h": 3}, {k: str(v) for k, v in inv.items()}))
    return ReproReport("example1", checks, time.perf_counter() - t0)


def coprime_directions(limit: int = 10):
    return [(a, b) for a in range(limit + 1) for b in range(limit + 1)
            if (a or b) and math.gcd(a, b) == 1]


def density_check(limit: int = 10, radii=(10, 20, 50)) -> Check:
    out_of_range, oracle_mismatch = [], []
    for a1, a2 in coprime_directions(limit):
        mx = max(abs(a1), abs(a2))
        for R in radii:
            c = density_count(a1, a2, R)
            if c != density_count_bruteforce(a1, a2, R):
                oracle_mismatch.append([a1, a2, R])
            ratio = Fraction(c, R)
            if not (2 * mx <= ratio <= 4 * mx):
                out_of_range.append({"alpha": [a1, a2], "R": R, "ratio": str(ratio)})
    return Check("density count over R lies in [2 max, 4 max] and matches brute force",
                 not out_of_range and not oracle_mismatch,
                 {"out_of_range": out_of_range, "oracle_mismatch": oracle_mismatch})


def homotopy_line_check(bound: int = 5) -> Check:
    """Sweep |alpha|, |beta| <= bound; alpha = 0 has no line and is checked separately."""
    target = model("s3x(s4vs4)").algebra
    homotopic = obstructed = 0
    failures = []
    zero_alpha_ok = True
    rng = range(-bound, bound + 1)
    for a1 in rng:
        for a2 in rng:
            f0 = example2_map(target, (a1, a2), (0, 0))
            for b1 in rng:
                for b2 in rng:
                    f1 = example2_map(target, (a1, a2), (b1, b2))
                    on_line = a1 * b2 == a2 * b1
                    try:
                        H = homotopy_between(f1, f0)
                        got = True
                        if not is_homotopy(H, f1, f0):
                            failures.append([a1, a2, b1, b2, "unverified"])
                    except NonzeroObstruction:
                        got = False
                    if (a1, a2) == (0, 0):
                        if got != (b1 == 0 and b2 == 0):
                            zero_alpha_ok = False
                        continue
                    if got != on_line:
                        failures.append([a1, a2, b1, b2])
                    homotopic += got
                    obstructed += not got
    return Check("maps on the line through alpha are homotopic to beta = 0, others are obstructed",
                 not failures and zero_alpha_ok,
                 {"homotopic": homotopic, "obstructed": obstructed, "failures": failures[:20],
                  "alpha_zero_consistent": zero_alpha_ok})


def example2(sweep: int = 5) -> ReproReport:
    t0 = time.perf_counter()
    checks = [density_check(), homotopy_line_check(sweep)]
    return ReproReport("example2", checks, time.perf_counter() - t0)


def growth_check(Dmax: int = 200, fit_Ds=(2 ** 10, 2 ** 11, 2 ** 12, 2 ** 13, 2 ** 14)) -> Check:
    bad = [D for D in range(1, Dmax + 1) if growth_count(D).count != growth_count_direct(D)]
    fit = growth_fit(list(fit_Ds))
    return Check("growth count matches enumeration and count / (D^2 ln D) is stable within 20%",
                 not bad and fit["max_relative_deviation"] <= 0.2,
                 {"mismatches": bad, "fit_approximate": {"constant": fit["constant"],
                                                         "max_relative_deviation":
                                                             fit["max_relative_deviation"]}})


def gcd_check(N: int = 10 ** 4, kmax: int = 100) -> Check:
    bad = [gcd_proportion_bounds(N, k).to_dict() for k in range(1, kmax + 1)
           if not gcd_proportion_bounds(N, k).ok]
    return Check("gcd = k proportion lies within its bounds", not bad, {"N": N, "violations": bad})


def example3() -> ReproReport:
    t0 = time.perf_counter()
    return ReproReport("example3", [growth_check(), gcd_check()], time.perf_counter() - t0)


EXAMPLES = {"example1": example1, "example2": example2, "example3": example3}
