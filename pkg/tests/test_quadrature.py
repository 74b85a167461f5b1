import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rzero.errors import QuadratureFailure
from rzero.quadrature import G_WEIGHTS, K_WEIGHTS, NODES, gk15, integrate_adaptive
from rzero.zero_density import kac_density


def test_rule_weights():
    assert K_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert G_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert np.all(np.diff(NODES) > 0)
    # Kronrod rule integrates degree 22 exactly, Gauss rule degree 13
    assert K_WEIGHTS @ NODES**22 == pytest.approx(2 / 23, rel=1e-13)
    assert G_WEIGHTS @ NODES**12 == pytest.approx(2 / 13, rel=1e-13)


def test_sin():
    v, err = integrate_adaptive(np.sin, 0.0, math.pi, rel_tol=1e-13)
    assert v == pytest.approx(2.0, abs=1e-12)
    assert err <= 1e-12


@settings(max_examples=30)
@given(st.floats(-5, 5), st.floats(-3, 3), st.floats(0.01, 4))
def test_constant_exact(c, a, w):
    v, _ = integrate_adaptive(lambda x: np.full_like(x, c), a, a + w)
    assert v == pytest.approx(c * w, rel=1e-14, abs=1e-14)


def test_kac_density_symmetry():
    full, _ = integrate_adaptive(lambda t: kac_density(6, t), -0.5, 0.5, rel_tol=1e-13)
    half, _ = integrate_adaptive(lambda t: kac_density(6, t), 0.0, 0.5, rel_tol=1e-13)
    assert full == pytest.approx(2 * half, abs=1e-10)


def test_endpoint_singularity():
    # integrable square-root singularity at 0: int_0^1 x^-1/2 = 2
    v, _ = integrate_adaptive(lambda x: 1 / np.sqrt(x), 0.0, 1.0, rel_tol=1e-9)
    assert v == pytest.approx(2.0, rel=1e-7)


def test_breakpoints_and_panels():
    f = lambda x: np.abs(x - 0.3)
    v, err, panels = integrate_adaptive(f, 0.0, 1.0, breakpoints=[0.3], return_panels=True)
    assert v == pytest.approx(0.045 + 0.245, abs=1e-15)
    assert [p[0] for p in panels] == sorted(p[0] for p in panels)
    assert panels[0][0] == 0.0 and panels[-1][1] == 1.0


def test_deterministic():
    f = lambda x: np.exp(np.sin(7 * x)) / (1 + x * x)
    assert integrate_adaptive(f, -3, 4, rel_tol=1e-12) == integrate_adaptive(f, -3, 4, rel_tol=1e-12)


def test_panel_limit():
    with pytest.raises(QuadratureFailure):
        integrate_adaptive(lambda x: np.sign(np.sin(50 / (x + 1e-3))), 0.0, 1.0, rel_tol=1e-14, max_panels=50)


def test_non_finite():
    with pytest.raises(QuadratureFailure):
        gk15(lambda x: np.full_like(x, np.nan), 0.0, 1.0)
