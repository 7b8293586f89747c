import json

import numpy as np
import pytest
from conftest import channels
from hypothesis import given

from relaybound.channels import det_example_channels
from relaybound.io import ChannelFileError, format_matrix, load_config, parse_matrix, read_matrix, write_matrix


class TestMatrixFiles:
    def test_parse_with_comments(self):
        text = "# erasure channel\n2 3\n0.5 0.5 0   # first row\n\n0 0.5 0.5\n"
        np.testing.assert_array_equal(parse_matrix(text), [[0.5, 0.5, 0], [0, 0.5, 0.5]])

    @given(channels())
    def test_round_trip(self, w):
        np.testing.assert_array_equal(parse_matrix(format_matrix(w, "random")), w)

    def test_file_round_trip(self, tmp_path):
        w_y, _ = det_example_channels()
        path = tmp_path / "det.txt"
        write_matrix(path, w_y, comment="Y marginal")
        np.testing.assert_array_equal(read_matrix(path), w_y)
        assert path.read_text().startswith("# Y marginal\n4 2\n")

    @pytest.mark.parametrize("text, line, fragment", [
        ("2\n0.5 0.5\n", 1, "header"),
        ("a b\n", 1, "header"),
        ("2 2\n0.5 0.5\n0.5\n", 3, "expected 2 entries"),
        ("2 2\n0.5 0.5\n0.4 0.4\n", 3, "row sums"),
        ("1 2\n1.2 -0.2\n", 2, "nonnegative"),
        ("1 2\n0.5 x\n", 2, "not a number"),
        ("1 2\n0.5 0.5\n0.5 0.5\n", 3, "more than"),
    ])
    def test_errors_name_line(self, tmp_path, text, line, fragment):
        path = tmp_path / "bad.txt"
        path.write_text(text)
        with pytest.raises(ChannelFileError) as info:
            read_matrix(path)
        assert info.value.line == line
        assert f"{path}:{line}:" in str(info.value) and fragment in str(info.value)

    def test_missing_rows(self):
        with pytest.raises(ChannelFileError, match="declared 3 rows"):
            parse_matrix("3 2\n1 0\n0 1\n")

    def test_empty_and_missing(self, tmp_path):
        with pytest.raises(ChannelFileError, match="empty"):
            parse_matrix("# nothing\n")
        with pytest.raises(ChannelFileError):
            read_matrix(tmp_path / "absent.txt")


class TestConfig:
    def test_flat_object(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"bec": 0.5, "r0-grid": "0:0.1:0.05", "seed": 3}))
        assert load_config(path) == {"bec": 0.5, "r0_grid": "0:0.1:0.05", "seed": 3}

    def test_unwraps_result_document(self, tmp_path):
        path = tmp_path / "result.json"
        path.write_text(json.dumps({"command": "cutset", "config": {"bec": 0.5, "r0": 0.1}, "result": {}}))
        assert load_config(path) == {"bec": 0.5, "r0": 0.1}

    @pytest.mark.parametrize("text", ["[1, 2]", '{"bec": {"eps": 0.5}}', "{not json"])
    def test_rejects(self, tmp_path, text):
        path = tmp_path / "c.json"
        path.write_text(text)
        with pytest.raises(ValueError):
            load_config(path)
