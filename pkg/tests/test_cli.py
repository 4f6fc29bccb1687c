import io
import json

import pytest

from sturmjsr.cli import CONFIG_ENV, RunConfig, UsageError, run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


def test_constants_text():
    code, out = call("constants", "--which", "alpha-star", "--digits", "40", "--format", "text")
    assert code == 0
    assert out.strip() == "0.7493265463303675579439619480913446720913 ± 1e-40"


def test_constants_json_envelope():
    code, out = call("constants", "--which", "alpha-double-star", "--digits", "20")
    data = json.loads(out)
    assert list(data) == ["command", "config", "timestamp", "payload", "warnings"]
    assert data["payload"]["value"] == "0.56927928658414233098"
    assert data["payload"]["product_form_agrees"] is True


def test_family_build_example():
    code, out = call("family", "build", "--kind", "example-p2", "--no-envelope")
    data = json.loads(out)
    assert code == 0
    assert [len(m) for m in data["matrices"]] == [4, 2]
    assert [e["dimension"] for e in data["manifest"]] == [4, 28]
    assert data["matrices"][0][0] == "1,1,1,1;0,1,0,1;0,0,1,1;0,0,0,1"
    assert data["matrices"][0][3] == "alpha_double_star*alpha_star * [1,0,0,0;1,1,0,0;1,0,1,0;1,1,1,1]"


def test_family_build_btv_from_file(tmp_path):
    f = tmp_path / "f.txt"
    f.write_text("1,1;0,1\n1,0;1,1\n")
    code, out = call("family", "build", "--kind", "jb", "--from", str(f), "--format", "text")
    assert code == 0
    assert "dimension=6" in out


def test_word_and_complexity_csv():
    code, out = call("word", "--spec", "sturmian:gamma=(3-sqrt5)/2", "--length", "10", "--format", "text")
    assert out.strip() == "0100101001"
    code, out = call("complexity", "--spec", "periodic:0110", "--n-max", "6", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "n,count,window,saturated"
    assert lines[6].startswith("6,4,")


def test_jsr_bounds_json():
    code, out = call("jsr", "bounds", "--family", "btv:alpha=1", "--depth", "8", "--no-envelope")
    data = json.loads(out)
    assert data["witness"] == "01"
    assert data["lower"].startswith("1.6180339887")
    assert data["depth"] == 8


def test_jsr_growth_csv():
    code, out = call("jsr", "growth", "--family", "btv:alpha=1", "--word-spec", "periodic:01",
                     "--n", "4", "--rho", "1.618", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "n,log_norm,r_n,residual"
    assert len(out.splitlines()) == 5


def test_growth_verdict():
    code, out = call("growth", "--family", "btv:alpha=1", "--word-spec", "periodic:0", "--n", "500",
                     "--format", "text")
    assert out.strip() == "inconsistent"


def test_lift_commands():
    code, out = call("lift", "encode", "--m", "3", "--word-spec", "periodic:20", "--length", "6", "--format", "text")
    assert out.strip() == "100001"
    code, out = call("lift", "verify", "--family", "example-p2", "--word", "3120", "--check", "encode-product",
                     "--no-envelope")
    assert code == 0 and json.loads(out)["holds"] is True
    code, out = call("lift", "verify", "--family", "toy:2,3", "--word", "11", "--check", "support", "--no-envelope")
    data = json.loads(out)
    assert data["automaton"] is False and data["agree"] is True


def test_decode_failure_exit_code():
    code, _ = call("lift", "decode", "--m", "2", "--word-spec", "periodic:1", "--length", "2")
    assert code == 1


def test_usage_errors():
    assert call("frobnicate")[0] == 2
    assert call("constants", "--which", "alpha-star", "--bogus")[0] == 2
    assert call("word", "--spec", "nope:1", "--length", "3")[0] == 2
    # nested payload cannot be written as csv
    assert call("family", "build", "--kind", "example-p2", "--format", "csv")[0] == 2


def test_config_file_and_env(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("depth = 3\nformat = text\n")
    monkeypatch.setenv(CONFIG_ENV, str(cfg))
    code, out = call("jsr", "bounds", "--family", "btv:alpha=1")
    assert "depth 3" in out
    # flags win over the file
    code, out = call("jsr", "bounds", "--family", "btv:alpha=1", "--depth", "4")
    assert "depth 4" in out


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert call("jsr", "bounds", "--family", "btv:alpha=1", "--config", str(cfg))[0] == 2


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig.from_mapping({"depth": "0"})
    with pytest.raises(UsageError):
        RunConfig.from_mapping({"format": "xml"})
    assert RunConfig.from_mapping({"window_cap": "1e5"}).window_cap == 100000


def test_out_file(tmp_path):
    target = tmp_path / "report.json"
    code, out = call("word", "--spec", "periodic:01", "--length", "4", "--out", str(target), "--no-envelope")
    assert out == ""
    assert json.loads(target.read_text())["word"] == "0101"


def test_reports_are_deterministic():
    argv = ("jsr", "bounds", "--family", "kron:alphas=alpha_star;alpha_double_star", "--depth", "5", "--no-envelope")
    assert call(*argv)[1] == call(*argv)[1]


def test_verify_subset():
    code, out = call("verify", "--criteria", "1,2", "--no-envelope")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert [c["id"] for c in data["criteria"]] == [1, 2]
