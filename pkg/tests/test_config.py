import pytest

from core.tools.config import load_settings, parse_value, read_settings_file


def write_settings(tmp_path, body):
    fn = tmp_path / "settings.csv"
    fn.write_text("key,value\n" + body)
    return str(fn)


def test_packaged_defaults():
    settings = load_settings()
    assert settings["replications"] == 50
    assert settings["n_list"] == [1024, 4096, 16384]
    assert settings["methods"] == ["m", "uni", "eig"]
    assert settings["delta"] == 0.02
    assert settings["restrict"] is None
    assert settings["j2"] is None
    assert settings["scale_delta"] is False
    assert settings["boundary"] == "truncate"


def test_file_and_overrides_are_layered(tmp_path):
    fn = write_settings(
        tmp_path,
        "# small run\nreplications,5\nn_list,256;512\nrestrict,h1;h2\nj2,5\n",
    )
    settings = load_settings(fn, overrides={"replications": 3, "seed_base": None})
    assert settings["replications"] == 3
    assert settings["n_list"] == [256, 512]
    assert settings["restrict"] == ["h1", "h2"]
    assert settings["j2"] == 5
    assert settings["seed_base"] == 0


def test_parse_value():
    assert parse_value("delta", "0.1;0.1;0.05;0.2;0.2;0.1;0.1") == [0.1, 0.1, 0.05, 0.2, 0.2, 0.1, 0.1]
    assert parse_value("delta", 0.05) == 0.05
    assert parse_value("scale_delta", "yes") is True
    assert parse_value("n_list", [256, 512]) == [256, 512]
    assert parse_value("restrict", "none") is None
    with pytest.raises(ValueError):
        parse_value("delta", "0.1;0.2")
    with pytest.raises(ValueError):
        parse_value("restrict", "h1;alpha")
    with pytest.raises(ValueError):
        parse_value("colour", "blue")


def test_unknown_key_in_a_file(tmp_path):
    fn = write_settings(tmp_path, "colour,blue\n")
    with pytest.raises(ValueError):
        load_settings(fn)


def test_malformed_files(tmp_path):
    with pytest.raises(IOError):
        read_settings_file(str(tmp_path / "missing.csv"))
    fn = tmp_path / "bad.csv"
    fn.write_text("name,setting\nreplications,5\n")
    with pytest.raises(IOError):
        read_settings_file(str(fn))
