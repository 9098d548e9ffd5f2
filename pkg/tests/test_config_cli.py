import json
import subprocess
import sys

import pytest

from tdflexsim.cli import main, oracle_check
from tdflexsim.config import (
    ConfigError, SimConfig, apply_overrides, dbm_to_watt, from_mapping, parse_config, serialize_config,
)


def test_defaults():
    cfg = SimConfig()
    assert (cfg.area_km2, cfg.lambda_sc, cfg.lambda_u, cfg.alpha_e, cfg.N_data) == (1.0, 0.6, 50.0, 3.0, 8)
    assert cfg.p_mbs == pytest.approx(19.952623, rel=1e-6)
    assert cfg.gamma == pytest.approx(10.0)
    assert 10 * __import__("math").log10(cfg.noise_power * 1e3) == pytest.approx(-95.0)
    assert cfg.replace(noise_enabled=False).noise_power == 0.0
    assert dbm_to_watt(30.0) == 1.0


def test_round_trip(tmp_path):
    cfg = SimConfig(M=64, seed=99, M_list=(8, 16), noise_enabled=False, gamma_db=3.5)
    path = tmp_path / "c.yaml"
    path.write_text(serialize_config(cfg))
    assert parse_config(path) == cfg
    assert parse_config(path).config_hash() == cfg.config_hash()


@pytest.mark.parametrize(
    "data, fragment",
    [({"bogus": 1}, "bogus"), ({"alpha_e": 2.0}, "alpha_e"), ({"M": 0}, "M"), ({"M": 1.5}, "M"),
     ({"noise_enabled": "maybe"}, "noise_enabled"), ([1, 2], "mapping"), ({"frames": True}, "frames")],
)
def test_rejections_name_the_key(data, fragment):
    with pytest.raises(ConfigError, match=fragment):
        from_mapping(data, "file.yaml")


def test_malformed_and_missing_files(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("M: [1,\n")
    with pytest.raises(ConfigError, match="malformed"):
        parse_config(bad)
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "absent.yaml")


def test_overrides():
    cfg = apply_overrides(SimConfig(), ["M=64", "noise_enabled=false", "M_list=[4, 8]", "gamma_db=0"])
    assert (cfg.M, cfg.noise_enabled, cfg.M_list, cfg.gamma_db) == (64, False, (4, 8), 0.0)
    for bad in (["M"], ["nope=1"], ["lambda_u=-1"]):
        with pytest.raises(ConfigError):
            apply_overrides(SimConfig(), bad)


def test_oracle_check_clean():
    assert oracle_check(6) == []


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["oracle-check", "--n-data", "4"]) == 0
    assert "0 mismatches" in capsys.readouterr().out
    assert main(["hetnet", "--set", "M=0", "--out", str(tmp_path)]) == 2
    assert main(["hetnet", "--config", str(tmp_path / "none.yaml")]) == 2
    assert main(["schedule-dump", "--loads", "a,b"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_unknown_subcommand_via_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tdflexsim.cli", "nope"], capture_output=True, text=True)
    assert proc.returncode == 1 and "usage" in proc.stderr


def test_oracle_mismatch_exit_code(monkeypatch, capsys):
    import tdflexsim.cli as cli

    monkeypatch.setattr(cli, "collisions_pcru", lambda nm, ns, n: 0)
    assert cli.main(["oracle-check", "--n-data", "3"]) == 3
    assert "MISMATCH" in capsys.readouterr().out


def test_schedule_dump(capsys):
    assert main(["schedule-dump", "--loads", "0.75,0.25,0.5,0.9"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "# TDFLEX"
    assert out[1] == "SU D D D D D D U U"
    assert out[2] == "SU U* U* U* U* U* U* D D"
    assert "1,inf,0,PCR-U,6" in out
    assert out[out.index("# TDLTE") + 1] == "SU D D D D D D U U"


def test_two_cell_outputs_and_manifest(tmp_path):
    out = tmp_path / "run"
    assert main(["two-cell", "--out", str(out), "--seed", "5", "--set", "two_cell_draws=3",
                 "--set", "M=16"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 5 and manifest["outputs"] == ["two_cell.csv"]
    assert manifest["config_hash"] == parse_config(out / "config.yaml").config_hash()
    assert (out / "two_cell.csv").read_text().startswith("ratio_db,")


def test_seed_determines_hetnet_output(tmp_path):
    args = ["--set", "drops=2", "--set", "frames=2", "--set", "M=16"]
    for name, seed in (("a", 3), ("b", 3), ("c", 4)):
        assert main(["hetnet", "--out", str(tmp_path / name), "--seed", str(seed), *args]) == 0
    read = lambda n: (tmp_path / n / "rates_cdf.csv").read_bytes()
    assert read("a") == read("b") != read("c")
