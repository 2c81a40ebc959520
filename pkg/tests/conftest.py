import pytest

from toric_rg import _backend

BACKENDS = ["python"] + (["cython"] if _backend.compiled_kernels is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per available kernel implementation."""
    kern = _backend.python_kernels if request.param == "python" else _backend.compiled_kernels
    monkeypatch.setattr(_backend, "kernels", kern)
    return request.param
