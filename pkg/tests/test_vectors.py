import numpy as np
import pytest

from dupvec import VectorFormatError, WordVectors, load_vec, save_model, save_vec


def toy_vectors():
    matrix = np.array([[0.25, -1.5, 3.0], [0.125, 0.5, -0.75]], dtype=np.float32)
    return WordVectors(["kali", "atl"], matrix)


class TestWordVectors:
    def test_lookup(self):
        wv = toy_vectors()
        assert len(wv) == 2 and wv.dim == 3
        assert "kali" in wv and "tepetl" not in wv
        got = wv.word_vector("kali")
        assert got.has_vector
        assert np.array_equal(got.vector, [0.25, -1.5, 3.0])

    def test_oov_is_flagged_zero(self):
        got = toy_vectors().word_vector("tepetl")
        assert not got.has_vector
        assert np.array_equal(got.vector, np.zeros(3, dtype=np.float32))

    def test_row_count_mismatch_rejected(self):
        with pytest.raises(ValueError):
            WordVectors(["kali"], np.zeros((2, 3), dtype=np.float32))


class TestRoundTrip:
    def test_small(self, tmp_path):
        wv = toy_vectors()
        path = tmp_path / "v.vec"
        save_vec(wv, path)
        loaded = load_vec(path)
        assert loaded.tokens == wv.tokens
        assert np.allclose(loaded.matrix, wv.matrix, atol=1e-6)

    def test_thousand_rows(self, tmp_path):
        rng = np.random.default_rng(2)
        tokens = ["w%04d" % i for i in range(1000)]
        matrix = (rng.random((1000, 20), dtype=np.float32) - 0.5) * 2
        path = tmp_path / "big.vec"
        save_vec(WordVectors(tokens, matrix), path)
        loaded = load_vec(path)
        assert loaded.tokens == tokens
        assert np.abs(loaded.matrix - matrix).max() < 1e-6

    def test_header_line(self, tmp_path):
        path = tmp_path / "v.vec"
        save_vec(toy_vectors(), path)
        assert path.read_text(encoding="utf-8").splitlines()[0] == "2 3"


class TestLoadErrors:
    def write(self, tmp_path, text):
        path = tmp_path / "v.vec"
        path.write_text(text, encoding="utf-8")
        return path

    def test_bad_header(self, tmp_path):
        path = self.write(tmp_path, "not a header\n")
        with pytest.raises(VectorFormatError) as err:
            load_vec(path)
        assert err.value.lineno == 1

    def test_extra_row_reported_at_its_line(self, tmp_path):
        path = self.write(tmp_path, "2 3\na 1 2 3\nb 1 2 3\nc 1 2 3\n")
        with pytest.raises(VectorFormatError) as err:
            load_vec(path)
        assert err.value.lineno == 4

    def test_missing_rows_detected(self, tmp_path):
        path = self.write(tmp_path, "3 3\na 1 2 3\n")
        with pytest.raises(VectorFormatError, match="announced 3 rows"):
            load_vec(path)

    def test_wrong_arity(self, tmp_path):
        path = self.write(tmp_path, "2 3\na 1 2\nb 1 2 3\n")
        with pytest.raises(VectorFormatError) as err:
            load_vec(path)
        assert err.value.lineno == 2

    def test_non_numeric_component(self, tmp_path):
        path = self.write(tmp_path, "1 3\na 1 x 3\n")
        with pytest.raises(VectorFormatError, match="non-numeric"):
            load_vec(path)

    def test_trailing_blank_lines_tolerated(self, tmp_path):
        path = self.write(tmp_path, "1 2\na 1 2\n\n\n")
        assert load_vec(path).tokens == ["a"]

    def test_trailing_spaces_tolerated(self, tmp_path):
        path = self.write(tmp_path, "1 2\na 1 2  \n")
        assert np.array_equal(load_vec(path).matrix, [[1.0, 2.0]])


class TestSaveModel:
    def test_meta_sidecar(self, tmp_path, trained_w2v_sg):
        path = tmp_path / "model.vec"
        save_model(trained_w2v_sg, path)
        assert load_vec(path).tokens == trained_w2v_sg.vocab_tokens()
        meta = dict(
            line.split("=", 1)
            for line in (tmp_path / "model.vec.meta").read_text(encoding="utf-8").splitlines()
        )
        assert meta["algorithm"] == "word2vec"
        assert meta["mode"] == "skipgram"
        assert int(meta["vocab_size"]) == len(trained_w2v_sg.vocab_tokens())
        assert int(meta["dim"]) == 32
        assert "stats.loss_per_epoch" in meta
