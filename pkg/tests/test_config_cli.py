import math

import numpy as np
import pytest

from efplay import ConfigError, EfpConfig, make_sine_dataset
from efplay.cli import main, run_command
from efplay.config import ConfigParseError, load_config, parse_config
from efplay.output import TRACE_HEADER, fmt, read_cloud

TOY_ONE_EPOCH = """\
problem = toy
inner_sampler = exact
N = 500
T = 0.2
sigma2_half = 1.0
init_std = 1.0
"""


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_empty_config_gives_defaults():
    cfg = parse_config("")
    e = cfg.efp
    assert (e.dt, e.T, e.alpha, e.N, e.sigma2_half, e.ds) == (0.2, 120.0, 1.0, 1000, 0.0005, 0.1)
    assert (e.S_first, e.S_other, e.init_std, e.init_mean, e.seed) == (100.0, 5.0, 15.0, 0.0, 0)
    assert e.inner_count == 1000 and cfg.problem == "sine" and not cfg.emit_svg
    assert cfg.efp == EfpConfig()


@pytest.mark.parametrize("text", ["alpha = 0", "dt = 0.5\nalpha = 3", "N = 0", "ds = -0.1", "ds = 0"])
def test_invalid_values_rejected(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_parse_error_has_line_number():
    with pytest.raises(ConfigParseError) as info:
        parse_config("# comment\nN = 10\n\nnot a pair\n", "x.cfg")
    assert info.value.line_no == 4 and "x.cfg:4" in str(info.value)


@pytest.mark.parametrize("text, fragment", [
    ("colour = blue", "unknown key"),
    ("N = 10\nN = 20", "duplicate"),
    ("N = ", "missing value"),
    ("N = ten", "bad value"),
    ("emit_svg = maybe", "bad value"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ConfigParseError, match=fragment):
        parse_config(text)


def test_config_comments_and_types():
    cfg = parse_config("problem = toy   # trailing\nseed = 7\nM = 50\nN = 40\nemit_svg = true\n")
    assert cfg.problem == "toy" and cfg.efp.seed == 7 and cfg.efp.inner_count == 50 and cfg.emit_svg


def test_exact_sampler_needs_toy():
    with pytest.raises(ConfigError):
        parse_config("inner_sampler = exact")


def test_sine_dataset_examples():
    data = make_sine_dataset()
    assert data.K == 101 and data.K_val == 1000 and data.d == 1
    assert data.features[0, 0] == 0.0 and data.labels[0] == 0.0
    assert data.features[1, 0] == pytest.approx(1 / 101)
    assert data.labels[1] == pytest.approx(math.sin(2 * math.pi / 101))
    assert data.labels[1] == pytest.approx(0.06217, abs=5e-6)
    assert data.validation_features[1, 0] == pytest.approx(1 / 1000)


def test_fmt_is_fixed_scientific():
    assert fmt(0.1) == "1.00000000e-01"
    assert fmt(float("nan")) == "" and fmt(None) == ""
    assert fmt(-12345.678901234) == "-1.23456789e+04"


def test_validate_command(tmp_path, capsys):
    assert main(["validate", "--config", str(write(tmp_path, TOY_ONE_EPOCH))]) == 0
    assert "1 epochs" in capsys.readouterr().out
    assert main(["validate", "--config", str(write(tmp_path, "alpha = 0", "bad.cfg"))]) == 2
    assert "config error" in capsys.readouterr().err


def test_oracle_command(capsys):
    assert main(["oracle"]) == 0
    out = capsys.readouterr().out
    assert "toy fixed-point variance (v=x^2/2, sigma^2=2): 0.5" in out
    assert "sin(2 pi / 101): 0.0621" in out


def test_missing_config_is_io_error(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "absent.cfg")]) == 4
    assert "I/O error" in capsys.readouterr().err


def test_unwritable_output_is_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = write(tmp_path, TOY_ONE_EPOCH)
    assert main(["run", "--config", str(cfg), "--out", str(blocker / "sub")]) == 4


def test_divergence_exit_code(tmp_path, capsys, monkeypatch):
    from efplay import DivergenceError, cli

    def explode(*args, **kwargs):
        raise DivergenceError(3, 17, epoch=2)

    monkeypatch.setattr(cli, "run_efp", explode)
    assert main(["run", "--config", str(write(tmp_path, TOY_ONE_EPOCH)), "--out", str(tmp_path)]) == 3
    assert "epoch 2" in capsys.readouterr().err


def test_toy_one_epoch_run_writes_one_row(tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--config", str(write(tmp_path, TOY_ONE_EPOCH)), "--out", str(out)]) == 0
    raw = (out / "trace.csv").read_bytes()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").splitlines()
    assert lines[0] == ",".join(TRACE_HEADER) and len(lines) == 2
    fields = lines[1].split(",")
    assert fields[0] == "1" and fields[-1] == "" and fields[3] == ""
    assert all(fields[i] for i in (1, 2, 4, 5, 6, 7))
    cloud = read_cloud(out / "final_cloud.csv")
    assert cloud.shape == (500, 1)
    assert (out / "final_cloud.csv").read_text().splitlines()[0] == "x_1"


def test_sine_run_columns_and_plots(tmp_path):
    text = "N = 30\nT = 0.6\nS_first = 0.5\nS_other = 0.2\nemit_svg = true\nbaseline = true\n"
    out = tmp_path / "out"
    assert main(["run", "--config", str(write(tmp_path, text)), "--out", str(out)]) == 0
    rows = [line.split(",") for line in (out / "trace.csv").read_text().splitlines()[1:]]
    assert len(rows) == 3 and all(r[6] == "" and r[7] == "" and r[3] for r in rows)
    assert (out / "final_cloud.csv").read_text().splitlines()[0] == "beta,alpha_1,gamma"
    assert read_cloud(out / "final_cloud.csv").shape == (30, 3)
    assert (out / "trace_mfld.csv").exists() and (out / "final_cloud_mfld.csv").exists()
    for name in ("error.svg", "fit.svg"):
        svg = (out / name).read_text()
        assert svg.startswith("<svg") or svg.startswith("<?xml")
        assert "<polyline" in svg


def test_seed_override_changes_output(tmp_path):
    cfg = write(tmp_path, TOY_ONE_EPOCH)
    for name, extra in (("a", []), ("b", []), ("c", ["--seed", "5"])):
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / name)] + extra) == 0
    a, b, c = ((tmp_path / n / "trace.csv").read_bytes() for n in "abc")
    assert a == b and a != c


def test_wall_clock_column_on_request(tmp_path):
    cfg = load_config(write(tmp_path, TOY_ONE_EPOCH + "record_wall_clock = true\n"))
    run_command(cfg.replace(out_dir=str(tmp_path / "w")))
    row = (tmp_path / "w" / "trace.csv").read_text().splitlines()[1].split(",")
    assert float(row[-1]) >= 0.0


def test_replace_routes_fields():
    cfg = parse_config("").replace(seed=9, out_dir="x", N=10)
    assert cfg.efp.seed == 9 and cfg.efp.N == 10 and cfg.out_dir == "x"
    assert np.isfinite(cfg.efp.sigma)
