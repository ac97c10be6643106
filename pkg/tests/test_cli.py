import io
import json
import subprocess
import sys

import pytest

from crsing.cli import run

EX53 = """\
[manifold]
variables = z1, z2, z3
eq1 = z1 - conj(z3)
[map]
f1 = z1
f2 = z2
f3 = z3^2
f4 = z2*z3
"""

REMOVABLE = """\
[manifold]
variables = z1, z2
graph = 1/2*(z1+conj(z1))^2 - z1^2*z2^2*conj(z1)^2*conj(z2)^2 - i*z1^2*z2^4*conj(z1)*conj(z2)^4 + 1/3i*z1^2*conj(z1)^3 + i*z2^2*conj(z1)*conj(z2)^2 + i*z1*z2^2*conj(z2)^2 + 1/3*z1^2*z2^6*conj(z2)^6 - 1/2*z2^4*conj(z2)^4
"""

SEXTIC = """\
[manifold]
variables = x, y
real = x, y
[map]
f1 = x + i*y
f2 = (x^2+y^2)^3
f3 = (x^2+y^2)^2
"""

PARABOLIC = """\
[manifold]
variables = x, y, xi
real = x, y
[map]
f1 = x + i*y
f2 = xi
f3 = x^2
"""

DISC = """\
[manifold]
variables = z, w
[task]
kind = disc
r = z*conj(z)
phi = z - w
t = 1/10, 1/5, 3/10, 2/5
"""


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in [("ex53", EX53), ("removable", REMOVABLE), ("sextic", SEXTIC),
                       ("parabolic", PARABOLIC), ("disc", DISC),
                       ("zero", "[manifold]\nvariables = z1, z2\ngraph = 0\n"),
                       ("broken", "[manifold]\nvariables = z1\neq1 = z1 +\n")]:
        p = tmp_path / f"{name}.crs"
        p.write_text(text, encoding="utf-8")
        paths[name] = str(p)
    return paths


def test_analyze_example(files):
    code, out = call("analyze", "--input", files["ex53"])
    assert code == 0
    assert "verdict: CR singular at F(p)" in out
    assert "minors:\n  - 2*z3\n  - z2\n  - -2*z3^2\n  - 0\n" in out


def test_classify_zero(files):
    code, out = call("classify", "--input", files["zero"])
    assert code == 0 and "verdict: Type5" in out


def test_removable_example(files):
    code, out = call("removable", "--order", "12", "--input", files["removable"])
    assert code == 0
    assert "verdict: Removable\n" in out
    assert "quotient: 2i*z2^2*conj(z2)\n" in out


def test_stability_parabolic(files):
    code, out = call("stability", "--input", files["parabolic"])
    assert code == 0 and "verdict: ConditionFails" in out and "det: 2i*x" in out


def test_perturb_sextic(files):
    code, out = call("perturb", "--input", files["sextic"], "--seed", "0")
    assert code == 0 and "verdict: Found" in out and "replay: true" in out


def test_exit_codes(files, tmp_path):
    code, out = call("analyze", "--input", str(tmp_path / "missing.crs"))
    assert code == 1 and out.startswith("error io-error")
    code, out = call("analyze", "--input", files["broken"])
    assert code == 1 and out.startswith("error syntax-error")
    code, out = call("perturb", "--input", files["ex53"])
    assert code == 2 and out.startswith("error inequality-not-satisfied")
    code, out = call("perturb", "--input", files["sextic"], "--budget", "1")
    assert code == 3 and "error: not-found" in out
    code, out = call("frobnicate")
    assert code == 1 and out.startswith("error usage")
    code, out = call("construct", "sharp", "--n", "2", "--k", "2", "--m", "3")
    assert code == 2
    assert len(out.strip().splitlines()) == 1


def test_json_errors(files):
    code, out = call("perturb", "--input", files["ex53"], "--json")
    data = json.loads(out)
    assert code == 2 and data["error"] == "inequality-not-satisfied" and data["exit"] == 2


def test_constructions():
    code, out = call("construct", "sharp", "--n", "3", "--k", "2", "--m", "4")
    assert code == 0 and "map:\n  - z1\n  - z2\n  - z3^2\n  - z2*z3\n" in out
    code, out = call("construct", "realize", "--type", "Type3", "--a", "1/2")
    assert code == 0 and "image_class: Type3(a = 1/2)" in out
    code, out = call("construct", "ck", "--k", "1")
    assert code == 0 and "rho: conj(z2)^4 + z2*conj(z1)" in out


def test_disc_with_csv(files, tmp_path):
    csv = tmp_path / "out.csv"
    code, out = call("disc", "--input", files["disc"], "--csv", str(csv))
    assert code == 0 and "winding: 1" in out and "passed: true" in out
    rows = csv.read_text().splitlines()
    assert rows[0] == "t,residual,winding,branch" and len(rows) == 5


def _flatten(obj, into):
    if isinstance(obj, dict):
        for k, v in obj.items():
            into.add(k)
            _flatten(v, into)
    elif isinstance(obj, list):
        for v in obj:
            _flatten(v, into)
    else:
        into.add(str(obj))
    return into


@pytest.mark.parametrize("argv", [
    ("analyze", "--input", "ex53"),
    ("removable", "--input", "removable"),
    ("classify", "--input", "removable"),
    ("stability", "--input", "parabolic"),
    ("perturb", "--input", "sextic"),
    ("disc", "--input", "disc"),
    ("construct", "sharp", "--n", "4", "--k", "3", "--m", "5"),
])
def test_determinism_and_json_completeness(files, argv):
    argv = [files.get(a, a) if i and argv[i - 1] == "--input" else a for i, a in enumerate(argv)]
    c1, text1 = call(*argv)
    c2, text2 = call(*argv)
    assert c1 == c2 == 0 and text1 == text2
    cj, js = call(*argv, "--json")
    assert cj == 0
    data = json.loads(js)
    tokens = _flatten(data, set())
    tokens.add(data["task"])
    for line in text1.splitlines():
        item = line.strip()
        if item in ("-:", "-"):
            continue
        if item.startswith("- "):
            assert item[2:] in tokens, line
        elif ": " in item:
            key, value = item.split(": ", 1)
            assert key in tokens and value in tokens, line
        else:
            assert item.rstrip(":") in tokens, line


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "crsing", "classify", "--input", files["zero"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "verdict: Type5" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "crsing", "classify"], capture_output=True, text=True)
    assert proc.returncode == 1
