import numpy as np
import pytest

from src.cli.io import ingest, read_pgm, write_csv, write_frames
from src.core.exceptions import DimensionMismatchError, IngestError
from src.models.schemas import OutputSequence


class TestCsv:
    def test_plain_rows(self, csv_file):
        seq = ingest(csv_file([[1, 2], [3, 4], [5, 6]]))
        assert (seq.n_samples, seq.m) == (3, 2)
        np.testing.assert_array_equal(seq.samples[2], [5.0, 6.0])

    def test_optional_header(self, csv_file):
        seq = ingest(csv_file([[1.5, -2], [3, 4e-3]], header=["a", "b"]))
        np.testing.assert_array_equal(seq.samples, [[1.5, -2.0], [3.0, 0.004]])

    def test_round_trip_is_exact(self, tmp_path):
        samples = np.random.default_rng(0).standard_normal((5, 3)) * 1e3
        write_csv(OutputSequence(samples=samples), tmp_path / "out.csv")
        assert np.array_equal(ingest(tmp_path / "out.csv").samples, samples)

    @pytest.mark.parametrize("rows", [[[1, 2], [3]], [[1, 2], [3, "x"]], [[1, 2], [3, 4, 5]]])
    def test_inconsistent_rows(self, csv_file, rows):
        with pytest.raises(IngestError):
            ingest(csv_file(rows))

    @pytest.mark.parametrize("text", ["1,\n2,3\n4,5\n6,7\n", "nan,1\n2,3\n4,5\n", ",\n2,3\n4,5\n"])
    def test_malformed_first_row_is_not_a_header(self, tmp_path, text):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(IngestError, match="row 1 "):
            ingest(path)

    def test_needs_two_samples(self, csv_file):
        with pytest.raises(IngestError):
            ingest(csv_file([[1, 2]]))

    def test_unknown_format(self, csv_file):
        with pytest.raises(IngestError):
            ingest(csv_file([[1], [2]]), format="hdf5")


class TestFrames:
    def test_surrogate_frames(self, surrogate, tmp_path):
        write_frames(surrogate, tmp_path / "frames")
        seq = ingest(tmp_path / "frames", format="frames")
        assert (seq.n_samples, seq.m) == (71, 1054)
        assert seq.frame_shape == (31, 34)
        np.testing.assert_allclose(seq.samples, np.clip(surrogate.samples, 0.0, 1.0), atol=0.5 / 255 + 1e-12)

    def test_header_comments(self, tmp_path):
        path = tmp_path / "frame.pgm"
        path.write_bytes(b"P5\n# written by hand\n3 2\n255\n" + bytes([0, 51, 102, 153, 204, 255]))
        np.testing.assert_allclose(read_pgm(path), [[0.0, 0.2, 0.4], [0.6, 0.8, 1.0]])

    def test_mixed_sizes_name_the_file(self, tmp_path):
        frames = tmp_path / "frames"
        frames.mkdir()
        (frames / "a.pgm").write_bytes(b"P5\n2 2\n255\n" + bytes(4))
        (frames / "b.pgm").write_bytes(b"P5\n3 2\n255\n" + bytes(6))
        with pytest.raises(DimensionMismatchError, match="b.pgm"):
            ingest(frames, format="frames")

    def test_rejects_non_pgm(self, tmp_path):
        frames = tmp_path / "frames"
        frames.mkdir()
        (frames / "a.pgm").write_bytes(b"P6\n1 1\n255\n" + bytes(3))
        with pytest.raises(IngestError):
            ingest(frames, format="frames")

    def test_empty_directory(self, tmp_path):
        with pytest.raises(IngestError):
            ingest(tmp_path, format="frames")
