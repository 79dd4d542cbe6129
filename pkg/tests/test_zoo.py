import random
from fractions import Fraction

import pytest

from cdgamaps.algebra import check_cdga, weight_scaling
from cdgamaps.errors import ParseError, UnknownSchema, ValidationError
from cdgamaps.homotopy import DGAMap
from cdgamaps.zoo import (
    PAIRS,
    SCHEMAS,
    classify_map,
    default_truncation,
    dump_model,
    example1_map,
    example2_map,
    fattened,
    load_model,
    model,
    model_ids,
    pair,
)
from cdgamaps.linalg import cohomology


@pytest.mark.parametrize("ident", model_ids())
def test_builtins_valid(ident):
    m = model(ident)
    assert check_cdga(m.algebra) == []
    assert m.identifier == ident


@pytest.mark.parametrize("ident", model_ids())
def test_dump_load_roundtrip(ident):
    m = model(ident)
    again = load_model(dump_model(m))
    assert again.algebra == m.algebra
    assert dump_model(again) == dump_model(m)


def test_parse_error_line_numbers():
    text = "model bad\ntruncate 8\ngen a 4\nd a = q^2\n"
    with pytest.raises(ParseError) as exc:
        load_model(text)
    assert exc.value.line == 4
    with pytest.raises(ParseError) as exc:
        load_model("model m\nfoo bar\n")
    assert exc.value.line == 2
    with pytest.raises(ParseError):
        load_model("gen a 4\n")


def test_load_rejects_bad_differential():
    with pytest.raises(ValidationError):
        load_model("model m\ngen a 4\ngen b 6\nd b = a\n")


def test_truncation_env(monkeypatch):
    monkeypatch.setenv("CDGAMAPS_TRUNCATION", "11")
    assert default_truncation() == 11
    assert load_model("model m\ngen a 4\n").algebra.truncation == 11
    monkeypatch.setenv("CDGAMAPS_TRUNCATION", "x")
    with pytest.raises(ValidationError):
        default_truncation()


def test_unknown_model_and_pair():
    with pytest.raises(KeyError):
        model("nope")
    with pytest.raises(UnknownSchema):
        pair("nope")


def test_fattened_same_cohomology():
    S4 = model("s4").algebra
    F = fattened(S4)
    assert [cohomology(F, n).dimension for n in range(9)] == [cohomology(S4, n).dimension for n in range(9)]


def test_schemas_cover_pairs():
    assert set(PAIRS) <= set(SCHEMAS)
    assert "cs2-schema" in SCHEMAS


def test_canonical_forms():
    s = SCHEMAS["s4->s3xs4"]
    assert s.canonical((3, 7)) == (3, 1)
    assert s.canonical((0, 7)) == (0, 7)
    c = SCHEMAS["cs2-schema"]
    assert c.canonical((4, 6, 9)) == (4, 6, 1)


@pytest.mark.parametrize("d,h", [(0, 0), (1, 0), (0, 3), (2, 5), (-3, 4)])
def test_classify_example1(d, h):
    inv = classify_map("s4->s3xs4", example1_map(d, h))
    assert inv == {"d": d, "h": h}


def test_classify_zero_map():
    S4 = model("s4").algebra
    X = model("s3xs4").algebra
    zero = DGAMap(S4, X, {"a": X.zero(), "b": X.zero()})
    assert classify_map("s4->s3xs4", zero) == {"d": 0, "h": 0}


def test_classify_example2():
    T = model("s3x(s4vs4)").algebra
    inv = classify_map("s4->s3x(s4vs4)", example2_map(T, (2, -1), (3, 5)))
    assert inv == {"alpha1": 2, "alpha2": -1, "beta1": 3, "beta2": 5}


def test_classify_shifted_representative():
    """Exact perturbations in a fattened target leave the invariants alone."""
    X = fattened(model("s3xs4").algebra)
    S4 = model("s4").algebra
    phi = DGAMap(S4, X, {"a": X.parse("2*y + w4"),
                         "b": X.parse("4*z + 5*x*y + 4*y*u3 + w4*u3 + w7")})
    assert classify_map("s4->s3xs4", phi) == {"d": 2, "h": 5}


def test_classify_unknown_pair():
    with pytest.raises(UnknownSchema):
        classify_map("nope", example1_map(1, 1))


@pytest.mark.parametrize("ident", model_ids())
def test_weight_scaling_builtins(ident):
    alg = model(ident).algebra
    rng = random.Random(ident)
    for _ in range(5):
        s = Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9))
        t = Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9))
        phi_s, phi_t = weight_scaling(alg, s), weight_scaling(alg, t)
        assert phi_s.compose(phi_t) == weight_scaling(alg, s * t)
        for g in alg.generators:
            assert phi_s.images[g.name] == alg.gen(g.name).scale(s ** g.weight)
