import json
from pathlib import Path

import pytest

from centralizer_lab.cli import main
from centralizer_lab.report import ConfigError, load_config, run_scenario, validate_config

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def test_run_z4_sadic_passes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "--config", str(SCENARIOS / "z4_sadic.yaml"), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["schema"] == "centralizer-lab/report/v1"
    assert doc["status"] == "pass"
    names = [c["name"] for c in doc["checks"]]
    assert "oracle_agreement" in names and "exact_sequence" in names
    assert "elapsed" not in json.dumps(doc["checks"])


def test_report_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        main(["run", "--config", str(SCENARIOS / "s3_product.yaml"), "--out", str(p)])
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    da.pop("timings"), db.pop("timings")
    assert da == db
    assert json.dumps(da, sort_keys=True) == json.dumps(db, sort_keys=True)


def test_product_report_counts():
    rep = run_scenario(load_config(SCENARIOS / "s3_product.yaml"))
    rel = next(c for c in rep.checks if c.name == "relation")
    assert rel.counts["instances"] == 6 * 12 * 729 and rel.passed


def test_failing_scenario_exit_code():
    assert main(["run", "--config", str(SCENARIOS / "identity_gens.yaml")]) == 1


def test_inconclusive_exit_code(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(
        "kind: sadic-embedding\ngroup: cyclic 4\nschedule: [[0, 1, 3]]\n"
        "automorphisms: [[0, 1, 2, 3], [0, 3, 2, 1]]\nhorizons: {L: 8, K: 4, H: 16, p_max: 4}\n"
    )
    rep = run_scenario(load_config(cfg))
    # negation is not equivariant for this substitution, so this must fail, not hide as inconclusive
    assert rep.exit_code == 1
    cfg.write_text("kind: oracle-compare\ngroup: cyclic 4\nschedule: [[0, 1, 3]]\nL: 4\nK: 9\nbudget: 100\n")
    assert main(["run", "--config", str(cfg)]) == 2


def test_config_errors_name_fields(tmp_path):
    with pytest.raises(ConfigError) as exc:
        validate_config({"kind": "product-normalizer", "group": "symmetric 3", "modulus": 3, "sample": 5})
    assert exc.value.path == "$.seed"
    with pytest.raises(ConfigError) as exc:
        validate_config({"kind": "sadic-embedding", "group": "cyclic 4", "horizons": {"L": 0}})
    assert exc.value.path == "$.horizons.L"
    with pytest.raises(ConfigError) as exc:
        validate_config({"kind": "profinite", "tower": [2, 4]})
    assert exc.value.path == "$.depth"
    with pytest.raises(ConfigError):
        validate_config({"kind": "nope"})
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("kind: block-hierarchy\ngroup: cyclic 4\nlevels: 2\ndensity: {2: 3/2}\n")
    assert main(["run", "--config", str(cfg)]) == 3


def test_seed_flag_enables_sampling(tmp_path):
    cfg = tmp_path / "p.yaml"
    cfg.write_text("kind: product-normalizer\ngroup: symmetric 3\nmodulus: 3\nstate_cap: 10\nsample: 40\n")
    assert main(["run", "--config", str(cfg)]) == 3
    assert main(["run", "--config", str(cfg), "--seed", "11", "--out", str(tmp_path / "o.json")]) == 0
    doc = json.loads((tmp_path / "o.json").read_text())
    assert doc["scenario"]["seed"] == 11 and doc["info"]["sampled"]


@pytest.mark.parametrize(
    "name", ["profinite_2_4_8.yaml", "profinite_s3.yaml", "z4_x_z2.yaml", "z4_hierarchy.yaml", "z4_oracle.yaml"]
)
def test_shipped_scenarios_pass(name):
    rep = run_scenario(load_config(SCENARIOS / name))
    assert rep.exit_code == 0, rep.summary()


def test_oracle_compare_subcommand(capsys):
    assert main(["oracle-compare", "--config", str(SCENARIOS / "z4_sadic.yaml"), "--L", "12", "--K", "5"]) == 0
    assert "oracle_agreement" in capsys.readouterr().out


def test_dump_language(tmp_path):
    out = tmp_path / "lang.txt"
    assert main(["dump-language", "--config", str(SCENARIOS / "z4_sadic.yaml"), "--L", "3", "--K", "2", "--letter", "0", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "len=1 count=4"
    assert [ln for ln in lines if ln.startswith("len=")] == ["len=1 count=4", "len=2 count=13", "len=3 count=20"]  # factors of tau(0), tau^2(0), tau^3(0)


def test_dump_hierarchy(tmp_path):
    out = tmp_path / "h.txt"
    assert main(["dump-hierarchy", "--config", str(SCENARIOS / "z4_hierarchy.yaml"), "--out", str(out)]) == 0
    assert "n=2 ln=10 kn=4 |Bn|=384" in out.read_text()
    assert main(["dump-hierarchy", "--config", str(SCENARIOS / "s3_product.yaml")]) == 3
