import csv
import io
import json
import math

import numpy as np
import pytest

from curveframes.cli import (
    BASE_COLUMNS,
    KIND_COLUMNS,
    ConfigError,
    cmd_eval,
    cmd_list,
    cmd_verify,
    config_from_dict,
    load_columns,
    main,
)
from curveframes.smarandache import SmarandacheKind, formula_names


def make(**overrides):
    raw = {"preset": "equator", "samples": 16, "kinds": ["Tg"]}
    raw.update(overrides)
    return config_from_dict(raw)


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


# ---------------------------------------------------------------- config


def test_defaults_fill_in():
    config = config_from_dict({"preset": "latitude"})
    assert config.samples == 256
    assert config.tol == 1e-8
    assert [k.value for k in config.kinds] == ["Tg", "Tn", "gn", "Tgn"]
    assert config.output_format == "csv"
    assert config.output_path is None
    assert config.curve.name == "latitude"


@pytest.mark.parametrize("raw, field", [
    ({"preset": "equator", "samples": 8}, "samples"),
    ({"preset": "equator", "samples": 2.5}, "samples"),
    ({"preset": "equator", "tol": 0.0}, "tol"),
    ({"preset": "equator", "tol": "tight"}, "tol"),
    ({"preset": "equator", "flip_normal": "yes"}, "flip_normal"),
    ({"preset": "equator", "kinds": []}, "kinds"),
    ({"preset": "equator", "kinds": ["Tg", "TG"]}, "kinds"),
    ({"preset": "equator", "output": {"format": "xml"}}, "output.format"),
    ({"preset": "equator", "output": {"compress": True}}, "output.compress"),
    ({"preset": "nope"}, "preset"),
    ({"preset": "equator", "surface": "sphere"}, "preset"),
    ({"surface": "moebius", "curve": {"u": "t", "v": "t", "t_range": [0, 1]}},
     "surface"),
    ({"surface": "sphere"}, "curve"),
    ({"curve": {"u": "t", "v": "t", "t_range": [0, 1]}}, "surface"),
    ({"surface": "sphere", "curve": {"u": "t", "v": "t"}}, "curve.t_range"),
    ({"surface": "sphere",
      "curve": {"u": "sin(", "v": "t", "t_range": [1, 2]}}, "curve.u"),
    ({"surface": "sphere",
      "curve": {"u": "t", "v": "t", "t_range": [2, 1]}}, "curve.t_range"),
    ({"preset": "equator", "grid": 100}, "grid"),
])
def test_validation_names_the_field(raw, field):
    with pytest.raises(ConfigError) as err:
        config_from_dict(raw)
    assert err.value.field == field
    assert str(err.value).startswith(field + ":")


def test_custom_surface_expression_error_names_component():
    raw = {"surface": {"x": "u", "y": "v +", "z": "0",
                       "u_range": [0, 1], "v_range": [0, 1]},
           "curve": {"u": "t", "v": "t", "t_range": [0.1, 0.9]}}
    with pytest.raises(ConfigError) as err:
        config_from_dict(raw)
    assert err.value.field == "surface.y"


def test_curve_leaving_domain_is_a_config_error():
    raw = {"surface": {"x": "u", "y": "v", "z": "0",
                       "u_range": [0, 1], "v_range": [0, 1]},
           "curve": {"u": "3*t", "v": "t", "t_range": [0.0, 1.0]}}
    with pytest.raises(ConfigError) as err:
        config_from_dict(raw)
    assert err.value.field == "curve"


def test_kinds_deduplicate_and_keep_order():
    config = make(kinds=["gn", "Tg", "gn"])
    assert [k.value for k in config.kinds] == ["gn", "Tg"]


# ---------------------------------------------------------------- eval csv


def test_eval_csv_shape_and_line_endings():
    config = make(samples=64, kinds=["Tg", "Tn", "gn", "Tgn"])
    text = cmd_eval(config)
    assert "\r" not in text
    lines = text.splitlines()
    assert len(lines) == 65
    header = lines[0].split(",")
    assert len(header) == 20 + 13 * 4
    assert list(BASE_COLUMNS) == header[:20]
    assert header[20:33] == [f"Tg_{c}" for c in KIND_COLUMNS]
    assert all(len(line.split(",")) == len(header) for line in lines[1:])


def test_eval_csv_known_equator_values():
    rows = rows_of(cmd_eval(make(samples=32)))
    assert len(rows) == 32
    for row in rows:
        assert row["Tg_regular"] == "1"
        assert math.isclose(float(row["Tg_rate"]), 1 / math.sqrt(2),
                            rel_tol=0, abs_tol=1e-12)
        assert math.isclose(float(row["Tg_kappa_star"]), math.sqrt(2),
                            rel_tol=0, abs_tol=1e-9)
        assert math.isclose(float(row["Tg_phi_star"]), math.pi / 4,
                            rel_tol=0, abs_tol=1e-9)
        assert math.isclose(float(row["k_n"]), -1.0, abs_tol=1e-12)
    s_star = [float(r["Tg_s_star"]) for r in rows]
    assert s_star[0] == 0.0
    assert math.isclose(s_star[-1], 2 * math.pi / math.sqrt(2), abs_tol=1e-8)


def test_eval_csv_empty_cells_on_degenerate_rows():
    rows = rows_of(cmd_eval(make(preset="ruling", kinds=["Tn"])))
    for row in rows:
        assert row["tau"] == "" and row["phi"] == ""
        assert row["Tn_regular"] == "0"
        assert row["Tn_kappa_star"] == ""
        assert row["Tn_tau_g_star"] == ""
        assert float(row["Tn_rate"]) == pytest.approx(0.0, abs=1e-15)
        assert row["Tn_beta_x"] != ""  # position is still well defined


def test_eval_csv_deterministic():
    config = make(preset="helix", samples=20, kinds=["Tn", "Tgn"])
    assert cmd_eval(config) == cmd_eval(config)


def test_flip_normal_negates_normal_invariants():
    plain = rows_of(cmd_eval(make()))
    flipped = rows_of(cmd_eval(make(flip_normal=True)))
    for a, b in zip(plain, flipped):
        assert float(a["k_n"]) == pytest.approx(-float(b["k_n"]), abs=1e-12)
        assert float(a["n_z"]) == pytest.approx(-float(b["n_z"]), abs=1e-12)


# ---------------------------------------------------------------- eval json


def test_eval_json_round_trips_identically():
    config = make(preset="latitude", samples=24, kinds=["Tn", "gn"],
                  output={"format": "json"})
    text = cmd_eval(config)
    doc = json.loads(text)
    assert doc["column_order"][:20] == list(BASE_COLUMNS)
    assert len(doc["column_order"]) == 20 + 26
    assert doc["meta"]["kinds"] == ["Tn", "gn"]
    first = load_columns(text)
    second = load_columns(cmd_eval(config))
    assert set(first) == set(doc["column_order"])
    for name in first:
        np.testing.assert_array_equal(first[name], second[name])
    # null cells come back as nan, numbers bit-exact
    csv_rows = rows_of(cmd_eval(make(preset="latitude", samples=24,
                                     kinds=["Tn", "gn"])))
    for i, row in enumerate(csv_rows):
        cell = row["Tn_kappa_star"]
        loaded = first["Tn_kappa_star"][i]
        assert float(cell) == loaded if cell else math.isnan(loaded)


# ---------------------------------------------------------------- verify


def test_verify_reports_one_section_per_kind():
    config = make(kinds=["Tg", "Tn", "gn", "Tgn"], samples=24, tol=1e-6)
    doc = json.loads(cmd_verify(config))
    assert sorted(doc["reports"]) == ["Tg", "Tgn", "Tn", "gn"]
    for kind in SmarandacheKind:
        got = set(doc["reports"][kind.value]["formulas"])
        expected = {f"{n}-{kind.value}" for n in formula_names(kind)}
        assert got == expected
    assert doc["reports"]["Tg"]["formulas"]["rate-Tg"]["verdict"] == "CONFIRMED"
    assert doc["base"] == {"curve": "equator", "surface": "sphere"}


def test_verify_deterministic_bytes():
    config = make(preset="helix", kinds=["gn"], samples=20, tol=1e-6)
    assert cmd_verify(config) == cmd_verify(config)


def test_verify_phi_star_override_changes_closed_forms_only():
    free = json.loads(cmd_verify(make(samples=24, tol=1e-6)))
    pinned = json.loads(cmd_verify(make(samples=24, tol=1e-6, phi_star=0.0)))
    get = lambda doc, fid: doc["reports"]["Tg"]["formulas"][fid]
    # the equator's true angle is pi/4, so pinning 0 breaks angle-dependent
    # forms but leaves angle-free ones (and every oracle column) alone
    assert get(free, "k-g-star-Tg")["verdict"] == "CONFIRMED"
    assert get(pinned, "k-g-star-Tg")["verdict"] == "DISCREPANT"
    assert get(pinned, "rate-Tg")["verdict"] == "CONFIRMED"
    assert get(pinned, "k-g-star-Tg")["oracle"] == get(free, "k-g-star-Tg")["oracle"]


# ---------------------------------------------------------------- main/cli


def test_main_eval_writes_stdout(capsys):
    code = main(["eval", "--preset", "equator", "--samples", "16",
                 "--kinds", "Tg"])
    out = capsys.readouterr().out
    assert code == 0
    assert len(out.splitlines()) == 17
    assert out.splitlines()[0].startswith("s,t,x,y,z,")


def test_main_validation_failures_exit_2(capsys):
    assert main(["eval", "--preset", "equator", "--samples", "8"]) == 2
    assert "samples" in capsys.readouterr().err
    assert main(["eval", "--preset", "equator", "--kinds", "Tq"]) == 2
    assert "kinds" in capsys.readouterr().err
    assert main(["eval", "--surface", "sphere", "--curve", "t;t"]) == 2
    assert "curve" in capsys.readouterr().err
    assert main(["eval"]) == 2
    assert "curve" in capsys.readouterr().err


def test_main_verify_discrepant_is_not_an_error(capsys):
    code = main(["verify", "--preset", "equator", "--kinds", "Tg",
                 "--samples", "24", "--tol", "1e-6"])
    out = capsys.readouterr().out
    assert code == 0
    doc = json.loads(out)
    verdicts = {v["verdict"]
                for v in doc["reports"]["Tg"]["formulas"].values()}
    assert "DISCREPANT" in verdicts  # present yet exit status stays 0


def test_main_out_flag_writes_lf_file(tmp_path, capsys):
    target = tmp_path / "grid.csv"
    args = ["eval", "--preset", "latitude", "--samples", "16",
            "--kinds", "gn", "--out", str(target)]
    assert main(args) == 0
    assert capsys.readouterr().out == ""
    data = target.read_bytes()
    assert b"\r" not in data and data.endswith(b"\n")
    first = data
    assert main(args) == 0
    assert target.read_bytes() == first


def test_main_config_file_with_flag_overrides(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"preset": "equator", "samples": 16,
                                "kinds": ["Tg"]}))
    assert main(["eval", "--config", str(path), "--samples", "20"]) == 0
    out = capsys.readouterr().out
    assert len(out.splitlines()) == 21
    # a curve flag replaces the config file's preset
    code = main(["eval", "--config", str(path), "--surface", "plane",
                 "--curve", "t;t^2;0.1;1.0", "--samples", "16"])
    assert code == 0
    assert "s,t," in capsys.readouterr().out


def test_main_config_file_errors(tmp_path, capsys):
    missing = tmp_path / "absent.json"
    assert main(["eval", "--config", str(missing)]) == 2
    assert "config" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["eval", "--config", str(bad)]) == 2
    assert "invalid JSON" in capsys.readouterr().err


def test_list_inventory():
    text = cmd_list()
    for name in ("sphere", "cylinder", "torus", "plane"):
        assert f"  {name}\n" in text
    for name in ("equator", "latitude", "helix", "ruling"):
        assert f"  {name}\n" in text
    listed = [line.strip() for line in text.splitlines()
              if line.startswith("  ") and "-" in line]
    expected = [f"{n}-{k.value}" for k in SmarandacheKind
                for n in formula_names(k)]
    assert listed == expected
    assert len(listed) == 60


def test_main_list(capsys):
    assert main(["list"]) == 0
    assert "formulas:" in capsys.readouterr().out
