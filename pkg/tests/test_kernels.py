import numpy as np
import pytest

from gasfeeg import kernels
from gasfeeg.kernels import _pykernels

cython_missing = "cython" not in kernels.available_backends()
needs_cython = pytest.mark.skipif(cython_missing,
                                  reason="compiled extension not built")


@pytest.fixture(autouse=True)
def restore_backend():
    yield
    kernels.select_backend("auto")


def conv_case(rng, dtype, n=2, h=7, w=6, cin=3, cout=4, k=3, stride=2):
    x = rng.standard_normal((n, h, w, cin)).astype(dtype)
    wgt = rng.standard_normal((k, k, cin, cout)).astype(dtype)
    b = rng.standard_normal(cout).astype(dtype)
    ho = (h - k) // stride + 1
    wo = (w - k) // stride + 1
    dy = rng.standard_normal((n, ho, wo, cout)).astype(dtype)
    return x, wgt, b, dy, stride


class TestBackendSelection:
    def test_python_always_available(self):
        assert "python" in kernels.available_backends()

    def test_select_python(self):
        assert kernels.select_backend("python") == "python"
        assert kernels.backend_name() == "python"
        assert kernels.conv2d_forward is _pykernels.conv2d_forward

    @needs_cython
    def test_select_cython(self):
        assert kernels.select_backend("cython") == "cython"
        assert kernels.backend_name() == "cython"
        assert kernels.conv2d_forward is not _pykernels.conv2d_forward

    def test_auto_prefers_compiled(self):
        got = kernels.select_backend("auto")
        expect = "cython" if not cython_missing else "python"
        assert got == expect

    def test_unknown_backend(self):
        with pytest.raises(ValueError, match="unknown kernel backend"):
            kernels.select_backend("fortran")

    def test_env_variable_honored(self, tmp_path):
        import subprocess
        import sys
        code = ("import gasfeeg.kernels as k; print(k.backend_name())")
        out = subprocess.run(
            [sys.executable, "-c", code],
            env={"PATH": "/usr/bin:/bin", "GASFEEG_KERNEL_BACKEND": "python"},
            capture_output=True, text=True)
        assert out.stdout.strip() == "python"


@needs_cython
class TestParity:
    @pytest.mark.parametrize("dtype", [np.float32, np.float64])
    def test_conv_forward(self, rng, dtype):
        from gasfeeg.kernels import _ckernels
        x, w, b, _, stride = conv_case(rng, dtype)
        yp = _pykernels.conv2d_forward(x, w, b, stride)
        yc = _ckernels.conv2d_forward(x, w, b, stride)
        tol = 1e-5 if dtype == np.float32 else 1e-12
        assert yp.dtype == yc.dtype == dtype
        assert np.abs(yp - yc).max() < tol

    @pytest.mark.parametrize("dtype", [np.float32, np.float64])
    def test_conv_backward_weights(self, rng, dtype):
        from gasfeeg.kernels import _ckernels
        x, w, _, dy, stride = conv_case(rng, dtype)
        dwp, dbp = _pykernels.conv2d_backward_weights(x, dy, 3, 3, stride)
        dwc, dbc = _ckernels.conv2d_backward_weights(x, dy, 3, 3, stride)
        tol = 1e-4 if dtype == np.float32 else 1e-12
        assert np.abs(dwp - dwc).max() < tol
        assert np.abs(dbp - dbc).max() < tol

    @pytest.mark.parametrize("dtype", [np.float32, np.float64])
    def test_conv_backward_input(self, rng, dtype):
        from gasfeeg.kernels import _ckernels
        x, w, _, dy, stride = conv_case(rng, dtype)
        dxp = _pykernels.conv2d_backward_input(dy, w, stride, x.shape[1],
                                               x.shape[2])
        dxc = _ckernels.conv2d_backward_input(dy, w, stride, x.shape[1],
                                              x.shape[2])
        tol = 1e-4 if dtype == np.float32 else 1e-12
        assert np.abs(dxp - dxc).max() < tol

    @pytest.mark.parametrize("dtype", [np.float32, np.float64])
    def test_maxpool_round_trip(self, rng, dtype):
        from gasfeeg.kernels import _ckernels
        x = rng.standard_normal((3, 9, 8, 2)).astype(dtype)
        yp, ap = _pykernels.maxpool_forward(x, 2, 2)
        yc, ac = _ckernels.maxpool_forward(x, 2, 2)
        assert np.array_equal(yp, yc)
        assert np.array_equal(ap, ac)  # identical tie-breaking
        dy = rng.standard_normal(yp.shape).astype(dtype)
        dxp = _pykernels.maxpool_backward(dy, ap, 2, 2, 9, 8)
        dxc = _ckernels.maxpool_backward(dy, ac, 2, 2, 9, 8)
        assert np.array_equal(dxp, dxc)

    def test_maxpool_tie_prefers_first(self):
        from gasfeeg.kernels import _ckernels
        x = np.ones((1, 2, 2, 1), dtype=np.float64)
        for backend in (_pykernels, _ckernels):
            y, argmax = backend.maxpool_forward(x, 2, 2)
            assert y[0, 0, 0, 0] == 1.0
            assert argmax[0, 0, 0, 0] == 0

    def test_network_forward_identical_across_backends(self, rng):
        from gasfeeg.nn import build_custom_cnn, set_dtype
        set_dtype("float64")
        net = build_custom_cnn((32, 32, 3), scale=0.1, seed=0)
        x = rng.standard_normal((2, 32, 32, 3))
        kernels.select_backend("cython")
        yc = net.forward(x)
        kernels.select_backend("python")
        yp = net.forward(x)
        assert np.abs(yc - yp).max() < 1e-12
