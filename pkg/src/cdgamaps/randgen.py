"""Seeded random objects: interval elements, valid maps and small extension problems."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .algebra import Element, FreeCDGA, Generator, random_element
from .errors import NotExact
from .homotopy import DGAMap, Homotopy, IntervalElement, zero_map
from .linalg import cohomology, solve_d
from .obstruction import ObstructionProblem, d_of_generator
from .zoo import model

SOURCE_IDS = ("s2", "s3", "s4", "s3xs4")
TARGET_IDS = ("s3", "s4", "s3xs4", "s3x(s4vs4)", "s2xs2")

# product of two copies of the S2 model: a1*a2 is a class no built-in source can kill
_S2XS2 = FreeCDGA([Generator("p2", 2, 1), Generator("q2", 2, 1), Generator("p3", 3, 2),
                   Generator("q3", 3, 2)], {"p3": "p2^2", "q3": "q2^2"}, name="s2xs2")


def target_algebra(identifier: str) -> FreeCDGA:
    if identifier == "s2xs2":
        return _S2XS2
    return model(identifier).algebra


def random_interval_element(alg: FreeCDGA, n: int, rng: random.Random, max_t: int = 3) -> IntervalElement:
    """Degree-n element sum a_i t^i + sum c_j t^j dt with small integer coefficients."""
    poly, dt = {}, {}
    for i in range(max_t + 1):
        if n <= alg.truncation:
            x = random_element(alg, n, rng)
            if x:
                poly[i] = x
        if 1 <= n <= alg.truncation + 1 and n - 1 <= alg.truncation:
            c = random_element(alg, n - 1, rng)
            if c:
                dt[i] = c
    return IntervalElement(alg, poly, dt)


def random_cocycle(X: FreeCDGA, n: int, rng: random.Random, coeff_range: int = 3) -> Element:
    if n > X.truncation:
        return X.zero()
    H = cohomology(X, n)
    out = X.zero()
    for v in H.cycle_vectors:
        c = rng.randint(-coeff_range, coeff_range)
        if c:
            out = out + H.decode([Fraction(c) * x for x in v])
    return out


def random_map(Y: FreeCDGA, X: FreeCDGA, rng: random.Random, tries: int = 8,
               base: Optional[Dict[str, Element]] = None) -> DGAMap:
    """A chain map built stage by stage: a primitive of f(dv) plus a random cocycle.

    When some f(dv) is not exact the draw is repeated; after ``tries`` failures
    the zero map is returned (or NotExact raised when ``base`` is prescribed).
    """
    for _ in range(tries):
        images = dict(base or {})
        ok = True
        for stage in Y.stages():
            for name in stage:
                if name in images:
                    continue
                deg = Y.generators[Y.index[name]].degree
                partial = DGAMap(Y, X, images, validate=False)
                target = partial.apply(d_of_generator(Y, name)) if Y.raw_diff(name) else X.zero()
                try:
                    prim = solve_d(X, target) if target else X.zero()
                except NotExact:
                    ok = False
                    break
                images[name] = prim + random_cocycle(X, deg, rng)
            if not ok:
                break
        if ok:
            return DGAMap(Y, X, images)
    if base:
        raise NotExact("no extension of the given images was found")
    return zero_map(Y, X)


def _empty(truncation: int) -> FreeCDGA:
    return FreeCDGA([], {}, truncation=truncation)


def random_extension_problem(rng: random.Random, kind: Optional[str] = None,
                             tries: int = 20) -> Tuple[ObstructionProblem, str]:
    """A small problem of one of three kinds.

    absolute: C = Q, so the question is whether f extends over the stage.
    identity: B = C, h = id, g a full map and f = g|A.
    killing: C is B with one new generator killing a class; h the inclusion.
    """
    kind = kind or rng.choice(("absolute", "identity", "killing"))
    for _ in range(tries):
        try:
            return _problem(rng, kind), kind
        except NotExact:
            continue
    raise NotExact(f"could not draw a {kind} problem")


def _problem(rng: random.Random, kind: str) -> ObstructionProblem:
    if kind != "identity" and rng.random() < 0.5:
        # the pair where the obstruction is a genuine product class
        Y, X = model("s2").algebra, _S2XS2
        stages = Y.stages()
        k = len(stages) - 1
    else:
        Y = model(rng.choice(SOURCE_IDS)).algebra
        X = target_algebra(rng.choice(TARGET_IDS))
        stages = Y.stages()
        k = rng.randrange(len(stages))
    m0 = sum(len(s) for s in stages[:k])
    A = Y.prefix(m0)
    AV = Y.prefix(m0 + len(stages[k]))
    if kind == "absolute":
        f = _lift_free(random_map(Y, X, rng), A, rng, X)
        C = _empty(X.truncation)
        h = zero_map(X, C)
        g = zero_map(AV, C)
        H = Homotopy(A, C, {})
        return ObstructionProblem(f, g, h, H)
    if kind == "identity":
        g = random_map(Y, X, rng).restrict(AV)
        f = g.restrict(A)
        h = DGAMap(X, X, {v.name: X.gen(v.name) for v in X.generators})
        H = Homotopy.constant(f)
        return ObstructionProblem(f, g, h, H)
    if kind == "killing":
        n = stages[k] and Y.generators[Y.index[stages[k][0]]].degree
        w = random_cocycle(X, n + 1, rng) if n + 1 <= X.truncation else X.zero()
        C = X.extend([Generator("u_kill", n)], {"u_kill": w} if w else {})
        f = _lift_free(random_map(Y, X, rng), A, rng, X)
        h = DGAMap(X, C, {v.name: C.gen(v.name) for v in X.generators})
        hf = h.compose(f)
        images = {name: hf.images[name] for name in hf.images}
        images = {k_: C.coerce(v) for k_, v in images.items()}
        g = random_map(AV, C, rng, base=images)
        H = Homotopy.constant(hf)
        return ObstructionProblem(f, g, h, H)
    raise ValueError(f"unknown problem kind {kind!r}")


def _lift_free(phi: DGAMap, A: FreeCDGA, rng: random.Random, X: FreeCDGA) -> DGAMap:
    """phi restricted to A, with an extra random cocycle on the last stage to vary exactness."""
    f = phi.restrict(A)
    stages = A.stages()
    if not stages:
        return f
    images = dict(f.images)
    for name in stages[-1]:
        deg = A.generators[A.index[name]].degree
        images[name] = images.get(name, X.zero()) + random_cocycle(X, deg, rng)
    return DGAMap(A, X, images)
