import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sensepipe import kernels, oasis_network_path  # noqa: E402
from sensepipe.network import load_network  # noqa: E402

OASIS = "Oasis were a rock band from Manchester"


@pytest.fixture(scope="session")
def oasis_net():
    return load_network(oasis_network_path())


@pytest.fixture(params=["numpy", "numba"])
def backend(request, monkeypatch):
    """Route every kernel through one backend for the duration of a test."""
    impl = kernels.get_backend(request.param)
    for name in kernels.KERNELS:
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param


def write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
