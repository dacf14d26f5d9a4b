import pytest

from slitsim.config import ConfigError, default_config, load_config


def write(tmp_path, text):
    path = tmp_path / "experiment.ini"
    path.write_text(text, encoding="utf-8")
    return path


def test_empty_file_gives_defaults(tmp_path):
    cfg = load_config(write(tmp_path, ""))
    assert cfg.params.hbar_eff == 1.0
    assert cfg.params.mass == 1.0
    assert cfg.params.sigma0 == 1.0
    assert cfg.slit.X == 2.0
    assert cfg.slit.v_x == -0.5
    assert cfg.slit.v_y == 1.0
    assert (cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n_points) == (-15.0, 15.0, 4096)
    assert cfg.n_frames == 16
    assert cfg.formats == ("csv", "pgm", "png")


def test_sections_and_values_parse(tmp_path):
    cfg = load_config(
        write(
            tmp_path,
            """
[params]
mass = 2.0
[slit]
X = 3.5
v_x = -0.25
[grid]
n_points = 512
""",
        )
    )
    assert cfg.params.mass == 2.0
    assert cfg.slit.X == 3.5
    assert cfg.grid.n_points == 512
    # untouched keys keep their defaults
    assert cfg.params.sigma0 == 1.0


def test_negative_mass_rejected_by_name(tmp_path):
    path = write(tmp_path, "[params]\nmass = -1\n")
    with pytest.raises(ConfigError, match="mass"):
        load_config(path)


def test_unknown_key_rejected_by_name(tmp_path):
    path = write(tmp_path, "[params]\nfoo = 1\n")
    with pytest.raises(ConfigError, match="foo"):
        load_config(path)


def test_unknown_section_rejected(tmp_path):
    path = write(tmp_path, "[nonsense]\na = 1\n")
    with pytest.raises(ConfigError, match="nonsense"):
        load_config(path)


def test_parse_error_reports_line(tmp_path):
    path = write(tmp_path, "[params]\nmass 2.0\n")
    with pytest.raises(ConfigError, match="line"):
        load_config(path)


def test_key_before_section_reports_line(tmp_path):
    path = write(tmp_path, "mass = 2.0\n")
    with pytest.raises(ConfigError, match="line"):
        load_config(path)


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        load_config(tmp_path / "absent.ini")


def test_overrides_bare_and_dotted(tmp_path):
    path = write(tmp_path, "[slit]\nX = 3.0\n")
    cfg = load_config(path, ["--mass=2.0", "--slit.X=4.0", "--n_points=256"])
    assert cfg.params.mass == 2.0
    assert cfg.slit.X == 4.0
    assert cfg.grid.n_points == 256


def test_override_unknown_key():
    with pytest.raises(ConfigError, match="bogus"):
        load_config(None, ["--bogus=1"])


def test_override_requires_assignment():
    with pytest.raises(ConfigError):
        load_config(None, ["--mass"])


def test_override_bad_value():
    with pytest.raises(ConfigError, match="mass"):
        load_config(None, ["--mass=thirty"])


def test_uppercase_key_is_distinct(tmp_path):
    cfg = load_config(write(tmp_path, "[slit]\nX = 5.0\n[grid]\nx_min = -20\n"))
    assert cfg.slit.X == 5.0
    assert cfg.grid.x_min == -20.0


def test_time_block_validation():
    with pytest.raises(ConfigError):
        default_config(t0=5.0, t1=1.0)
    with pytest.raises(ConfigError):
        default_config(n_frames=0)


def test_cml_block_validation():
    with pytest.raises(ConfigError, match="profile"):
        default_config(profile="square")
    with pytest.raises(ConfigError, match="safety"):
        default_config(safety=1.5)
    with pytest.raises(ConfigError, match="walker_count"):
        default_config(walker_count=0)


def test_formats_validation():
    cfg = default_config(formats="csv")
    assert cfg.formats == ("csv",)
    with pytest.raises(ConfigError, match="svg"):
        default_config(formats="csv,svg")


def test_frame_times_span_the_block():
    cfg = default_config(t0=1.0, t1=3.0, n_frames=3)
    assert list(cfg.frame_times) == [1.0, 2.0, 3.0]
