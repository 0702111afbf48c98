"""CLI surface, presentation export, claim registry and determinism."""

import io
import json
from contextlib import redirect_stderr, redirect_stdout

import pytest

from wrsp.claims import CLAIMS, run_claims, select_claims
from wrsp.cli import main
from wrsp.presentation import (
    PresentationError,
    export_presentation,
    parse_presentation,
    verify_presentation,
)


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


# every in-scope structure claim must have a registry entry
REQUIRED_CLAIM_IDS = [
    "prop-order",
    "oracle-k1",
    "remark-derived",
    "lemma-exp2-i", "lemma-exp2-ii", "lemma-exp2-iii",
    "lemma-cm2k",
    "prop-lcs-class", "prop-lcs-layers",
    "remark-index",
    "lemma-exponent",
    "prop-lower2",
    "prop-dimension",
    "lemma-gamma-sq",
    "lemma-double-product",
    "cor-zij-shift",
    "eq-sq-comm",
    "eq-power-expansion",
    "zij-table",
    "thm-m-density",
    "thm-ld-complement",
    "thm-p-power",
    "thm-f-sandwich",
    "wreath-quotient",
    "h-generation",
]


def test_registry_completeness():
    for cid in REQUIRED_CLAIM_IDS:
        assert cid in CLAIMS, cid
    assert set(CLAIMS) == set(REQUIRED_CLAIM_IDS)
    for spec in CLAIMS.values():
        assert spec.statement
        assert 1 <= spec.k_min <= spec.k_max <= 4


def test_selector_semantics():
    assert select_claims(["lemma-exp2"], 2) == [
        "lemma-exp2-i", "lemma-exp2-ii", "lemma-exp2-iii"]
    assert "oracle-k1" in select_claims(None, 1)
    assert "oracle-k1" not in select_claims(None, 2)
    with pytest.raises(KeyError):
        select_claims(["no-such-claim"], 2)


def test_run_claims_catches_runner_errors():
    import wrsp.claims as cl
    spec = cl.CLAIMS["prop-order"]
    broken = cl.ClaimSpec("prop-order", spec.statement, 1, 4,
                          lambda k: (_ for _ in ()).throw(RuntimeError("boom")))
    cl.CLAIMS["prop-order"] = broken
    try:
        res = run_claims(1, ["prop-order"])
        assert res[0].status == "fail"
        assert "boom" in res[0].details["summary"]
    finally:
        cl.CLAIMS["prop-order"] = spec


def test_verify_all_level1():
    code, out, _ = run_cli(["verify", "--k", "1", "--all"])
    assert code == 0
    assert "prop-order" in out and "oracle-k1" in out


def test_verify_claim_prefix_level2():
    code, out, _ = run_cli(["verify", "--k", "2", "--claims", "lemma-exp2"])
    assert code == 0
    assert out.count("PASS") == 3


def test_verify_power_series_alias_is_sandwich_only():
    code, out, _ = run_cli(["verify", "--k", "3", "--claims", "power-series"])
    assert code == 0
    assert "SANDW" in out and "thm-p-power" in out


def test_density_trivial_target():
    code, out, _ = run_cli(["density", "--k", "2", "--kind", "gamma",
                            "--target", "trivial", "--format", "csv"])
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert rows and all(row.split(",")[3] == "0" for row in rows)


def test_verify_threads_env(monkeypatch):
    monkeypatch.setenv("WRSP_THREADS", "2")
    code, out, _ = run_cli(["verify", "--k", "1", "--claims", "prop-order,h-generation"])
    assert code == 0


def test_usage_errors():
    assert run_cli(["verify", "--k", "2", "--claims", "bogus"])[0] == 2
    assert run_cli(["verify", "--k", "7", "--all"])[0] == 2
    assert run_cli(["series", "--k", "2"])[0] == 2
    assert run_cli(["series", "--k", "3", "--kind", "power"])[0] == 2
    assert run_cli(["density", "--k", "2", "--kind", "m", "--target", "seed"])[0] == 2
    assert run_cli(["no-such-command"])[0] == 2


def test_series_csv_rows():
    code, out, _ = run_cli(["series", "--k", "2", "--kind", "gamma", "--format", "csv"])
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 9  # header plus the eight terms down to the trivial one
    assert lines[0] == "kind,k,i,log_order,layer_shape,igs"


def test_series_json_lengths():
    code, out, _ = run_cli(["series", "--k", "1", "--kind", "dimension"])
    rows = json.loads(out)
    nontrivial = [r for r in rows if r["log_order"] > 0]
    assert max(r["i"] for r in nontrivial) == 4
    code, out, _ = run_cli(["series", "--k", "3", "--kind", "lowerp"])
    rows = json.loads(out)
    assert max(r["i"] for r in rows if r["log_order"] > 0) == 15


def test_density_csv_and_json():
    code, out, _ = run_cli(["density", "--k", "1", "--kind", "m",
                            "--target", "Z", "--format", "csv"])
    assert code == 0 and ",3,6,3/6," in out
    code, out, _ = run_cli(["density", "--k", "3", "--kind", "m", "--target", "Z"])
    obj = json.loads(out)
    assert obj["points"][-1]["ratio_exact"] == "36/47"
    code, out, _ = run_cli(["density", "--k", "2", "--kind", "gamma", "--target", "full"])
    obj = json.loads(out)
    assert all(p["num"] == p["den"] for p in obj["points"])


def test_density_seed_file(tmp_path, ctx2):
    good = tmp_path / "seeds.txt"
    good.write_text("# a shift orbit seed\n" + ctx2.pair_gen(0, 1).text() + "\n",
                    encoding="ascii")
    code, out, _ = run_cli(["density", "--k", "2", "--kind", "m",
                            "--target", "seed", "--seed-file", str(good)])
    assert code == 0
    obj = json.loads(out)
    assert obj["points"][-1]["num"] == 4  # orbit of a near pair

    bad = tmp_path / "bad.txt"
    bad.write_text("x^0 y:0 s:0 c:zz\n", encoding="ascii")
    code, _, err = run_cli(["density", "--k", "2", "--kind", "m",
                            "--target", "seed", "--seed-file", str(bad)])
    assert code == 2 and "line 1" in err

    noncentral = tmp_path / "noncentral.txt"
    noncentral.write_text(ctx2.y().text() + "\n", encoding="ascii")
    code, _, err = run_cli(["density", "--k", "2", "--kind", "m",
                            "--target", "seed", "--seed-file", str(noncentral)])
    assert code == 2 and "centre block" in err


@pytest.mark.parametrize("k,ngens", [(1, 6), (2, 15)])
def test_export_presentation_counts(k, ngens):
    code, out, _ = run_cli(["export-presentation", "--k", str(k), "--check"])
    assert code == 0
    gens = [line for line in out.splitlines() if line.startswith("gen ")]
    assert len(gens) == ngens


def test_presentation_round_trip(ctx2):
    text = export_presentation(ctx2)
    rep = verify_presentation(text)
    assert rep["ok"] and rep["level"] == 2
    level, gens, rels = parse_presentation(text)
    assert level == 2 and len(gens) == 15 and len(rels) == rep["relations"]


def test_presentation_parse_errors():
    with pytest.raises(PresentationError):
        parse_presentation("")
    with pytest.raises(PresentationError):
        parse_presentation("pcgroup level=x\n")
    with pytest.raises(PresentationError) as err:
        parse_presentation("pcgroup level=1\ngen x\nrel x = 1\n")
    assert "line 3" in str(err.value)


def test_oracle_command():
    code, out, _ = run_cli(["oracle"])
    assert code == 0
    assert "elements 64" in out and "table_equal true" in out


def test_cli_outputs_are_deterministic(tmp_path):
    pairs = [
        ["series", "--k", "2", "--kind", "dimension"],
        ["series", "--k", "2", "--kind", "gamma", "--format", "csv"],
        ["density", "--k", "2", "--kind", "m", "--target", "Z"],
        ["verify", "--k", "1", "--all", "--format", "json"],
        ["export-presentation", "--k", "2"],
    ]
    for argv in pairs:
        c1, o1, _ = run_cli(argv)
        c2, o2, _ = run_cli(argv)
        assert (c1, o1) == (c2, o2)
        out_file = tmp_path / "out.txt"
        c3, _, _ = run_cli(argv + ["--out", str(out_file)])
        assert c3 == c1
        assert out_file.read_text(encoding="ascii") == o1
