import numpy as np
import pytest
from click.testing import CliRunner

from src.cli.io import write_csv
from src.models.schemas import OutputSequence
from src.services.datagen import lc_surrogate


@pytest.fixture
def doubling_sequence() -> OutputSequence:
    """Scalar y_k = 2^k for k = 0..7"""
    return OutputSequence.from_array(2.0 ** np.arange(8))


@pytest.fixture(scope="session")
def surrogate() -> OutputSequence:
    return lc_surrogate()


@pytest.fixture(scope="session")
def surrogate_csv(tmp_path_factory, surrogate):
    path = tmp_path_factory.mktemp("surrogate") / "surrogate.csv"
    write_csv(surrogate, path)
    return path


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def csv_file(tmp_path):
    """Writer for small CSV inputs: csv_file(rows, header=None, name=...)"""

    def write(rows, header=None, name="data.csv"):
        path = tmp_path / name
        lines = [] if header is None else [",".join(header)]
        lines += [",".join(str(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n")
        return path

    return write
