import json
import subprocess
import sys

import pytest

from cdgamaps.cli import main, parse_images


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cohomology_example(capsys):
    code, out, _ = run(capsys, "cohomology", "--model", "s4", "--degree", "4")
    assert code == 0
    assert json.loads(out)["dimension"] == 1


def test_count_torsion(capsys):
    code, out, _ = run(capsys, "count", "torsion", "--d", "7")
    assert code == 0 and json.loads(out)["count"] == 14
    code, out, _ = run(capsys, "count", "torsion", "--d", "0")
    assert json.loads(out)["count"] == "Unbounded"


def test_count_growth(capsys):
    code, out, _ = run(capsys, "count", "growth", "--D", "2")
    data = json.loads(out)
    assert code == 0 and data["count"] == 24 and data["terms"] == [8, 8, 8]


def test_count_density_oracle(capsys):
    code, out, _ = run(capsys, "count", "density", "--alpha1", "2", "--alpha2", "3", "--R", "5", "--oracle")
    data = json.loads(out)
    assert data["count"] == data["oracle"] == 49


def test_rationals_rendered_exactly(capsys):
    code, out, _ = run(capsys, "count", "gcd", "--N", "100", "--k", "3")
    data = json.loads(out)
    assert data["observed"] == "687/10000" and data["upper"] == "1/9"


def test_validation_error_exit_1(capsys):
    code, _, err = run(capsys, "cohomology", "--model", "s4", "--degree", "99")
    assert code == 1
    assert json.loads(err)["error"] == "DegreeOutOfRange"
    code, _, err = run(capsys, "count", "density", "--alpha1", "0", "--alpha2", "0", "--R", "3")
    assert code == 1 and json.loads(err)["error"] == "DegenerateDirection"
    code, _, err = run(capsys, "cohomology", "--model", "nope", "--degree", "1")
    assert code == 1


def test_bad_arguments_exit_1(capsys):
    code, _, _ = run(capsys, "count", "sideways")
    assert code == 1
    code, _, err = run(capsys, "fourlemma", "predict")
    assert code == 1 and "UsageError" in err


def test_extend_exit_0(capsys):
    code, out, _ = run(capsys, "extend", "--pair", "s4->s3xs4", "--images", "a=y", "--stage", "1")
    assert code == 0 and json.loads(out)["verified"]


def test_extend_nonzero_obstruction_exit_2(capsys, tmp_path):
    model = tmp_path / "t.txt"
    model.write_text("model bare\ntruncate 8\ngen x 3 1\ngen y 4 1\n")
    code, _, err = run(capsys, "extend", "--pair", "s4->s3xs4", "--model-file", str(model),
                       "--images", "a=y", "--stage", "1")
    assert code == 2
    assert json.loads(err)["error"] == "NonzeroObstruction"


def test_homotopy_check(capsys):
    on = ["homotopy-check", "--pair", "s4->s3x(s4vs4)", "--f", "a=y1;b=z11+x*y1", "--g", "a=y1;b=z11"]
    code, out, _ = run(capsys, *on)
    data = json.loads(out)
    assert code == 0 and data["homotopic"] and data["verified"]
    off = ["homotopy-check", "--pair", "s4->s3x(s4vs4)", "--f", "a=y1;b=z11+x*y2", "--g", "a=y1;b=z11"]
    code, out, _ = run(capsys, *off)
    assert not json.loads(out)["homotopic"]


def test_classify_and_into_w(capsys):
    code, out, _ = run(capsys, "classify", "--pair", "s4->s3xs4", "--images", "a=2*y; b=4*z+5*x*y")
    data = json.loads(out)
    assert data["canonical"] == [2, 1]
    code, out, _ = run(capsys, "into-w", "--pair", "s4->s3xs4", "--images", "a=2*y; b=4*z+x*y")
    data = json.loads(out)
    assert data["in_W"] and data["verified"] and len(data["trace"]) == 2


def test_fourlemma_predict(capsys):
    code, out, _ = run(capsys, "fourlemma", "predict", "--kind", "injective", "--rk1", "1")
    assert json.loads(out)["predicted"] == "2"
    code, out, _ = run(capsys, "fourlemma", "predict", "--kind", "surjective")
    assert json.loads(out)["predicted"] == "4"


def test_fto1(capsys):
    code, out, _ = run(capsys, "fto1-bound", "--complex", "circle", "--coeffs", '{"1": [3]}')
    assert json.loads(out)["bound"] == 3
    code, out, _ = run(capsys, "fto1-bound", "--cells", "1,0,1", "--coeffs", '{"2": [2]}')
    assert json.loads(out)["bound"] == 2


def test_models(capsys):
    code, out, _ = run(capsys, "models", "list")
    ids = {r["id"] for r in json.loads(out)["rows"]}
    assert {"s4", "s3xs4", "cs2-schema"} <= ids
    code, out, _ = run(capsys, "models", "show", "s4", "--format", "text")
    assert "truncation: 8" in out


def test_csv_output(capsys):
    code, out, _ = run(capsys, "cohomology", "--model", "s4", "--degree", "4", "--format", "csv")
    assert out.splitlines()[0] == "key,value"
    assert "dimension,1" in out


def test_output_file(capsys, tmp_path):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "count", "torsion", "--d", "3", "--output", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["count"] == 6


def test_model_file(capsys, tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("model m\ngen a 2 1\ngen b 3 2\nd b = a^2\n")
    code, out, _ = run(capsys, "cohomology", "--model-file", str(p), "--degree", "2")
    assert json.loads(out) == {"model": "m", "degree": 2, "dimension": 1, "representatives": ["a"]}


def test_parse_images():
    from cdgamaps.zoo import model
    S4, X = model("s4").algebra, model("s3xs4").algebra
    imgs = parse_images(S4, X, "a=2*y; b=4*z+x*y")
    assert imgs["a"] == X.gen("y").scale(2)
    with pytest.raises(Exception):
        parse_images(S4, X, "q=y")


@pytest.mark.parametrize("argv", [
    ["obstruct", "--random", "--seed", "5"],
    ["fourlemma", "verify", "--kind", "surjective", "--count", "3", "--seed", "2"],
    ["count", "growth", "--D", "50"],
])
def test_byte_identical_runs(argv):
    cmd = [sys.executable, "-m", "cdgamaps.cli"] + argv
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a


def test_repro_example1_exit_0():
    r = subprocess.run([sys.executable, "-m", "cdgamaps.cli", "repro", "example1"], capture_output=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["ok"]
