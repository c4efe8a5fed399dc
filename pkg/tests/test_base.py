import json

import numpy as np
import pandas as pd
import pytest

from core.models.base import append_receipt, jsonable
from core.models.definitions import RECEIPT_COL
from core.models.path import Path
from core.models.spectrum import SampleSpectrum
from core.models.theta import Theta
from core.tools.provenance import git_info


@pytest.fixture
def small_path():
    theta = Theta(0.3, 0.6, 0.2)
    return Path.from_arrays(np.arange(8.0), -np.arange(8.0), theta=theta, seed=4)


def test_csv_round_trip(tmp_path, small_path):
    small_path.receipt_add_entry("synthesize", "PASS")
    fn = str(tmp_path / "nested" / "path.csv")
    small_path.to_csv(fn)
    with open(tmp_path / "nested" / "path.json") as f:
        assert json.load(f)["kind"] == "path"
    back = Path.from_csv(fn)
    np.testing.assert_array_equal(back.y, small_path.y)
    assert back.theta_true == Theta(0.3, 0.6, 0.2)
    assert back.seed == 4
    assert back.filename == "path.csv"
    assert list(back.receipt["Module_Name"]) == ["synthesize", "from_csv"]
    np.testing.assert_array_equal(back.increments(), np.tile([1.0, -1.0], (7, 1)))


def test_bad_file_names(tmp_path, small_path):
    with pytest.raises(NameError):
        small_path.to_csv(str(tmp_path / "path.txt"))
    with pytest.raises(IOError):
        Path.from_csv(str(tmp_path / "missing.csv"))
    fn = tmp_path / "path.txt"
    fn.write_text("t,y1,y2\n0,0,0\n")
    with pytest.raises(IOError):
        Path().read(str(fn))


def test_missing_columns(tmp_path):
    fn = tmp_path / "path.csv"
    pd.DataFrame({"t": [0, 1], "y1": [0.0, 1.0]}).to_csv(fn, index=False)
    with pytest.raises(IOError, match="y2"):
        Path.from_csv(str(fn))


def test_missing_sidecar_warns(tmp_path):
    fn = tmp_path / "path.csv"
    pd.DataFrame({"t": [0, 1], "y1": [0.0, 1.0], "y2": [0.0, 2.0]}).to_csv(fn, index=False)
    with pytest.warns(UserWarning, match="sidecar"):
        path = Path.from_csv(str(fn))
    assert path.n == 2
    assert path.theta_true is None


def test_unequal_components():
    with pytest.raises(TypeError):
        Path.from_arrays(np.zeros(4), np.zeros(5))


def test_info(capsys, small_path):
    small_path.info()
    out = capsys.readouterr().out
    assert "Empty Path Data product" in out
    assert "theta_true" in out


def test_receipt_rows():
    receipt = append_receipt(None, "first", "PASS")
    receipt = append_receipt(receipt, "second", "FAILED")
    assert list(receipt.columns) == RECEIPT_COL
    assert list(receipt["Module_Name"]) == ["first", "second"]
    assert list(receipt["Status"]) == ["PASS", "FAILED"]


def test_git_info_keys():
    assert set(git_info()) == {"Code_Release", "Commit_Hash", "Branch_Name"}


def test_jsonable():
    doc = jsonable({"a": np.float64(1.5), "b": np.arange(3), 4: (np.int64(2),)})
    assert doc == {"a": 1.5, "b": [0, 1, 2], "4": [2]}
    json.dumps(doc)


def test_csv_keeps_every_bit(tmp_path, rng):
    path = Path.from_arrays(rng.standard_normal(64), rng.standard_normal(64) * 1e-7, seed=1)
    fn = str(tmp_path / "path.csv")
    path.to_csv(fn)
    back = Path.from_csv(fn)
    np.testing.assert_array_equal(back.y, path.y)


def test_spectrum_csv_keeps_every_bit(tmp_path, real_spectrum):
    fn = str(tmp_path / "spectrum.csv")
    real_spectrum.to_csv(fn)
    back = SampleSpectrum.from_csv(fn)
    for name in ("s11", "s12", "s22"):
        np.testing.assert_array_equal(getattr(back, name), getattr(real_spectrum, name))
