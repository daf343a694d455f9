import csv
import io
import json
import math

import pytest

from dirac_nlcs.cli import main
from dirac_nlcs.config import RunConfig, StrainBlock, parse_range
from dirac_nlcs.errors import ConfigError
from dirac_nlcs.runner import OUTPUT_DIR_ENV, compute, figure_recipe, recipe_names, render


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# ")
    header = json.loads(lines[0][2:])
    rows = list(csv.DictReader(lines[1:]))
    return header, rows


def test_levels_energies():
    code, text = run_cli("levels", "--zeta", "1", "--B0", "0.5", "--n", "5")
    assert code == 0
    header, rows = parse_csv(text)
    assert [int(r["n"]) for r in rows] == list(range(6))
    for r in rows:
        assert float(r["energy"]) == pytest.approx(math.sqrt(int(r["n"])), rel=1e-15)
    derived = header["derived"][0]
    assert derived["omega_B"] == 1.0 and derived["omega_zeta"] == 1.0 and derived["x0"] == -2.0


def test_zeta_and_strain_conflict(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, _ = run_cli(
        "nlcs-density", "--family", "shifted2", "--alpha-abs", "6", "--zeta", "0.5456",
        "--strain-dir", "x", "--epsilon", "0.21", "--nu", "0.15", "-o", str(target),
    )
    assert code == 2
    assert "zeta" in capsys.readouterr().err
    assert not target.exists()


@pytest.mark.parametrize(
    "argv,field",
    [
        (["levels", "--B0", "-1"], "B0"),
        (["uncertainty", "--family", "squeezed"], "family"),
        (["uncertainty", "--alpha-abs", "1:2"], "--alpha-abs"),
        (["eigen-density", "--grid", "3:1:10"], "grid"),
        (["uncertainty", "--alpha-abs", "0:1:3"], "alpha_abs"),
        (["maxima", "--strain-dir", "x", "--epsilon", "0.7"], "strain"),
    ],
)
def test_config_errors_exit_2(argv, field, capsys):
    code, out = run_cli(*argv)
    assert code == 2 and out == ""
    assert field in capsys.readouterr().err


def test_unknown_subcommand_exit_2(capsys):
    assert run_cli("spectrum")[0] == 2


def test_numerical_failure_exit_3(monkeypatch, capsys):
    from dirac_nlcs import nlcs

    monkeypatch.setattr(nlcs, "D_MAX", 5)
    code, _ = run_cli("uncertainty", "--alpha-abs", "6")
    assert code == 3
    assert "not summable" in capsys.readouterr().err


def test_sweep_uncertainty_boundary():
    code, text = run_cli("sweep", "uncertainty", "--family", "identity", "--alpha-abs", "0:8:64", "--alpha-phase", "0:1.5708:4")
    assert code == 0
    _, rows = parse_csv(text)
    assert len(rows) == 64 * 4
    for r in rows:
        assert float(r["hur"]) >= 0.5 - 1e-9
        if float(r["alpha_abs"]) in (0.0, 8.0):
            assert float(r["hur"]) == pytest.approx(0.5, abs=0.01)


def test_json_format():
    code, text = run_cli("uncertainty", "--family", "shifted1", "--alpha-abs", "0", "--format", "json")
    doc = json.loads(text)
    assert doc["columns"][-1] == "hur"
    assert doc["rows"][0][-1] == pytest.approx(1.0)


def test_dump_config_round_trip():
    code, text = run_cli("sweep", "energy", "--strain-dir", "x,y", "--alpha-abs", "0:2:3", "--family", "identity,shifted2", "--dump-config")
    assert code == 0
    cfg = RunConfig.from_json(text)
    assert cfg.strain == StrainBlock(direction=("x", "y"))
    assert RunConfig.from_json(cfg.to_json()) == cfg


@pytest.mark.parametrize("name", ["fig2", "fig5", "fig12", "energy-strain"])
def test_preset_round_trip(name):
    cfg = figure_recipe(name)
    assert RunConfig.from_json(cfg.to_json()) == cfg


def test_replay_reproduces_output(tmp_path):
    first = tmp_path / "a.csv"
    assert run_cli("sweep", "maxima", "--zeta", "0.5:1.5:3", "--n", "0,1,3", "-o", str(first))[0] == 0
    header, _ = parse_csv(first.read_text())
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps(dict(header["config"], output=None)))
    second = tmp_path / "b.csv"
    assert run_cli("replay", str(cfg_file), "-o", str(second))[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_replay_bad_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"command": "levels",\n  "zeta": }')
    assert run_cli("replay", str(bad))[0] == 2
    assert "line 2" in capsys.readouterr().err


def test_determinism_across_jobs():
    cfg = figure_recipe("fig4").with_(alpha_abs=(1.0,), zeta=(0.5, 1.0, 1.5))
    one = render(cfg, *compute(cfg))
    many = render(cfg.with_(jobs=4), *compute(cfg.with_(jobs=4)))
    assert one == many


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    code, out = run_cli("maxima", "--n", "2")
    assert code == 0 and out == ""
    assert (tmp_path / "maxima.csv").exists()


def test_plot_writes_png(tmp_path):
    target = tmp_path / "occ.csv"
    code, _ = run_cli("sweep", "occupation", "--family", "identity,shifted2", "--alpha-abs", "1,3", "-o", str(target), "--plot")
    assert code == 0
    png = target.with_suffix(".png")
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_plot_needs_file(capsys):
    assert run_cli("levels", "--plot")[0] == 2


def test_unknown_preset_lists_names(capsys):
    assert run_cli("figure", "fig99")[0] == 2
    err = capsys.readouterr().err
    assert "fig2" in err and "fig12" in err


def test_presets_listing():
    code, text = run_cli("presets")
    assert code == 0
    assert [line.split()[0] for line in text.splitlines()] == recipe_names()


def test_parse_range_forms():
    assert parse_range("2", "x") == (2.0,)
    assert parse_range("1,2.5", "x") == (1.0, 2.5)
    assert parse_range("0:1:5", "x") == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert parse_range("0:6:4", "n", integer=True) == (0, 2, 4, 6)
    with pytest.raises(ConfigError):
        parse_range("0:1:4", "n", integer=True)


def test_config_requires_one_field_source():
    with pytest.raises(ConfigError):
        RunConfig("levels", zeta=None)
    with pytest.raises(ConfigError):
        RunConfig("levels", zeta=(1.0,), strain=StrainBlock())
