import io

import numpy as np
import pytest

from roughspace import box_domain, luxemburg_norm
from roughspace.cli import main
from roughspace.specs import parse_exponent, parse_function


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_norm_example():
    code, out, _ = run(["norm", "--space", "lebesgue", "--p", "const:2", "--f", "const:3",
                        "--domain", "box:0,1,200"])
    assert code == 0
    assert abs(float(out.strip()) - 3.0) <= 1e-9
    assert len(out.strip().split(".")[1]) == 12


@pytest.mark.parametrize("space,extra", [
    ("morrey", ["--lambda", "const:0.5"]),
    ("gen-morrey", ["--w", "power:0.5"]),
    ("vanishing", ["--w", "power:-2", "--r", "0.1"]),
    ("campanato", []),
])
def test_norm_spaces_exit_zero(space, extra):
    code, out, _ = run(["norm", "--space", space, "--p", "const:2", "--f", "affine:0,1",
                        "--domain", "box:0,1,100", "--centers", "lattice:4"] + extra)
    assert code == 0 and float(out.split(",")[0]) > 0


def test_verify_hedberg_example():
    code, out, _ = run(["verify", "--estimate", "hedberg", "--kernel", "const:1", "--alpha",
                        "const:0.5", "--p", "const:2", "--f", "const:1", "--domain",
                        "box:-1,1,400"])
    assert code == 0
    assert out.strip().splitlines()[-1].startswith("PASS C_emp=")


def test_check_zygmund_example():
    code, out, _ = run(["check", "--condition", "zygmund", "--w1", "power:0", "--w2", "power:0",
                        "--p", "const:2", "--alpha", "const:0", "--domain", "box:0,1,100"])
    assert code == 1
    assert out.strip().splitlines()[-1].startswith("FAIL")
    assert "log-divergent" in out


@pytest.mark.parametrize("cond,extra,want", [
    ("positivity", ["--w", "power:0.5"], 0),
    ("vanishing", ["--w", "power:0", "--p", "const:2"], 1),
    ("alpha-assumptions", ["--alpha", "const:0.4", "--p", "const:2"], 0),
    ("log-holder", ["--p", "affine:2,1"], 0),
])
def test_check_conditions(cond, extra, want):
    code, out, _ = run(["check", "--condition", cond, "--domain", "box:0,1,100"] + extra)
    assert code == want, out


def test_verify_fail_exit_one():
    code, out, _ = run(["verify", "--estimate", "chi-scaling", "--p", "const:2", "--point", "0",
                        "--tol", "0.001", "--radii", "list:0.9,0.5,0.1,0.05",
                        "--domain", "box:-1,1,100"])
    assert code == 1 and "FAIL" in out


@pytest.mark.parametrize("argv,flag", [
    (["norm", "--space", "lebesgue", "--p", "const:2", "--f", "const:3",
      "--domain", "box:0,1"], "--domain"),
    (["norm", "--space", "lebesgue", "--p", "oops:2", "--f", "const:3",
      "--domain", "box:0,1,10"], "--p"),
    (["norm", "--space", "lebesgue", "--p", "const:2", "--f", "const:3",
      "--domain", "box:0,1,10", "--bogus"], "--bogus"),
    (["verify", "--estimate", "spanne", "--kernel", "const:1", "--alpha", "const:0.25",
      "--p", "const:2", "--q", "const:3", "--f", "const:1", "--domain", "box:0,1,50"], "--q"),
    (["apply", "--op", "riesz", "--kernel", "const:1", "--f", "const:1",
      "--domain", "box:0,1,50"], "--alpha"),
])
def test_usage_errors_exit_two(argv, flag):
    code, _, err = run(argv)
    assert code == 2
    assert err.count("\n") == 1 and flag in err


def test_no_command_is_usage_error():
    assert run([])[0] == 2


def test_apply_csv_round_trip(tmp_path):
    path = tmp_path / "g.csv"
    code, _, _ = run(["apply", "--op", "riesz", "--kernel", "const:1", "--alpha", "const:0.5",
                      "--f", "random:3", "--domain", "box:0,1,64", "--out", str(path)])
    assert code == 0
    text = path.read_text()
    assert text.startswith("# config ")
    assert "seed=42" in text.splitlines()[0]
    E = box_domain(0.0, 1.0, 64)
    g = parse_function(f"csv:{path}", E)
    p = parse_exponent("const:2", E)
    code, out, _ = run(["norm", "--space", "lebesgue", "--p", "const:2", "--f", f"csv:{path}",
                        "--domain", "box:0,1,64"])
    assert code == 0
    from roughspace import OperatorConfig, RoughKernel, riesz_potential
    direct = riesz_potential(parse_function("random:3", E),
                             OperatorConfig(RoughKernel.constant(1), parse_exponent("const:0.5", E)))
    assert np.array_equal(g.values, direct.values)
    assert luxemburg_norm(g, p).value == luxemburg_norm(direct, p).value


def test_config_header_records_resolved_flags(tmp_path):
    path = tmp_path / "v.csv"
    code, _, _ = run(["check", "--condition", "positivity", "--w", "power:0.5",
                      "--domain", "box:0,1,50", "--out", str(path)])
    header = path.read_text().splitlines()[0]
    assert code == 0
    assert "condition=positivity" in header and "w=power:0.5" in header
    assert "None" not in header and "threads" not in header


def test_sweep_identity_is_one():
    code, out, _ = run(["sweep", "--op", "identity", "--p", "const:2", "--q", "const:2",
                        "--suite", "random:1,3", "--domain", "box:0,1,50"])
    assert code == 0
    assert out.strip().splitlines()[-1].startswith("PASS C_emp=1.0")


def test_unwritable_output_exits_two(tmp_path):
    code, _, err = run(["apply", "--op", "riesz", "--kernel", "const:1", "--alpha", "const:0.5",
                        "--f", "const:1", "--domain", "box:0,1,16",
                        "--out", str(tmp_path / "missing" / "x.csv")])
    assert code == 2 and "--out" in err
