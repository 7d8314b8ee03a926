import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from travelfield import spectra as sp
from travelfield.errors import SpectrumError, SymmetryError


def test_power_law_values():
    assert sp.eval_spatial(sp.PowerLaw(5.0), (math.pi, 0.0)) == pytest.approx(math.pi ** -5)
    assert sp.eval_spatial(sp.PowerLaw(2.0), (3.0, 4.0)) == pytest.approx(1 / 25)
    assert sp.eval_spatial(sp.PowerLaw(3.0), (0.0, 0.0)) == 0.0


def test_line_factors():
    k, v = (0.5, 0.25), (2.0, 1.0)
    sxx = sp.eval_spatial(sp.PowerLaw(2.0), k)
    kv = 0.5 * 2.0 + 0.25
    om = 0.3
    u = om + kv
    damped = sp.eval_spacetime(sp.Damped(sp.PowerLaw(2.0), v, 0.3, 0.5), k, om)
    assert damped == pytest.approx(sxx * (u * u + 0.25) ** -0.3)
    op = sp.eval_spacetime(sp.OrientPersistent(sp.PowerLaw(2.0), v, 0.25), k, om)
    assert op == pytest.approx(sxx * abs(u) ** -0.5)
    fd = sp.eval_spacetime(sp.FreqDamped(sp.PowerLaw(2.0), v, 0.25, 2.0), k, om)
    assert fd == pytest.approx(sxx * (u * u + (2 * om) ** 2) ** -0.25)
    # on the line the damped density is S_XX h^(-2 delta)
    on = sp.eval_spacetime(sp.Damped(sp.PowerLaw(2.0), v, 0.3, 0.5), k, -kv)
    assert on == pytest.approx(sxx * 0.5 ** -0.6)


def test_op_clamp_is_finite():
    spec = sp.OrientPersistent(sp.PowerLaw(2.0), (1.0, 0.0), 0.25)
    val = sp.eval_spacetime(spec, (0.5, 0.0), -0.5, eps_line=0.1)
    assert val == pytest.approx(0.25 ** -1 * 0.1 ** -0.5)


def test_delta_outside_range_warns():
    with pytest.warns(UserWarning):
        sp.Damped(sp.PowerLaw(2.0), (1.0, 0.0), 2.0, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        sp.Damped(sp.PowerLaw(2.0), (1.0, 0.0), 0.25, 1.0)


def test_frozen_delta_not_pointwise():
    with pytest.raises(SpectrumError):
        sp.eval_spacetime(sp.FrozenDelta(sp.PowerLaw(2.0), (1.0, 0.0)), (0.1, 0.1), 0.0)
    line = sp.delta_line(sp.FrozenDelta(sp.PowerLaw(2.0), (1.0, 2.0)), (0.5, 0.5))
    assert line["support"] == pytest.approx(-1.5)


def test_compact_spectrum_matches_periodized_fft():
    cov = sp.CompactCovariance(6.0, 2.0)
    n = 16
    lags = np.fft.fftfreq(n, 1 / n)
    H1, H2 = np.meshgrid(lags, lags, indexing="ij")
    # the lag support fits inside the torus, so periodization is a no-op
    ref = np.fft.fftn(cov(H1, H2)).real
    got = sp.spatial_spectrum_grid(cov, n, n)
    np.testing.assert_allclose(got, np.maximum(ref, 0), atol=1e-10)


def test_compact_covariance_shape():
    cov = sp.CompactCovariance(10.0, 4.0)
    assert cov(0.0, 0.0) == 1.0
    assert cov(3.0, 4.0) == pytest.approx(math.exp(-5 / 4))
    assert cov(10.0, 0.5) == 0.0
    sph = sp.CompactCovariance(10.0, 4.0, base="spherical")
    assert sph(10.0, 0.0) == 0.0 and sph(0.0, 0.0) == 1.0
    assert sph(5.0, 0.0) == pytest.approx(0.3125)


SPECS = st.sampled_from(["op", "damped", "freq", "frozen"])


def _spec(kind, v):
    base = sp.PowerLaw(3.0)
    return {"op": lambda: sp.OrientPersistent(base, v, 0.3),
            "damped": lambda: sp.Damped(base, v, 0.3, 0.7),
            "freq": lambda: sp.FreqDamped(base, v, 0.3, 1.0),
            "frozen": lambda: sp.FrozenDelta(base, v)}[kind]()


@settings(max_examples=40, deadline=None)
@given(SPECS, st.tuples(st.integers(2, 9), st.integers(2, 9), st.integers(2, 9)),
       st.floats(-5, 5), st.floats(-5, 5))
def test_discretized_spectra_are_hermitian(kind, dims, v1, v2):
    S = sp.discretize_spectrum(_spec(kind, (v1, v2)), dims)
    assert S.shape == dims
    assert np.all(np.isfinite(S)) and np.all(S >= 0)
    assert np.array_equal(S, sp.mirror(S))
    c = sp.covariance_from_spectrum(S)
    assert c[0, 0, 0] == pytest.approx(S.mean())


def test_frozen_delta_column_average():
    spec = sp.FrozenDelta(sp.PowerLaw(3.0), (1.0, 0.0))
    S = sp.discretize_spectrum(spec, (8, 8, 8))
    sxx = sp.spatial_spectrum_grid(spec.spatial, 8, 8)
    np.testing.assert_allclose(S.mean(axis=2), sxx, atol=1e-12)


def test_frozen_delta_covariance_on_propagation_line():
    # integer velocity: c(h, tau) = c_XX(h - v tau) exactly on the torus
    spec = sp.FrozenDelta(sp.PowerLaw(3.0), (1.0, 0.0))
    c = sp.covariance_from_spectrum(sp.discretize_spectrum(spec, (8, 8, 8)))
    for tau in range(4):
        np.testing.assert_allclose(c[tau % 8, 0, tau], c[0, 0, 0], atol=1e-12)


def test_damped_approaches_op_off_line():
    dims = (16, 16, 8)
    near = sp.discretize_spectrum(sp.Damped(sp.PowerLaw(3.0), (2.0, 0.0), 0.3, 1e-7), dims)
    op = sp.discretize_spectrum(sp.OrientPersistent(sp.PowerLaw(3.0), (2.0, 0.0), 0.3), dims)
    fg = sp.FreqGrid3.from_dims(dims)
    k1, _, w = fg.mesh()
    off = (np.abs(w + 2 * k1) > 3 * fg.eps_line()) & (op > 0)
    # Nyquist bins are averaged with their mirror, so both must be off the line
    off &= sp.mirror(off)
    np.testing.assert_allclose(near[off], op[off], rtol=1e-8)


def test_freq_damped_zero_bin_dropped():
    S = sp.discretize_spectrum(sp.FreqDamped(sp.PowerLaw(3.0), (0.0, 0.0), 0.3, 1.0), (4, 4, 4))
    assert np.all(np.isfinite(S))
    assert S[1, 0, 0] == 0.0


def test_asymmetric_spectrum_rejected():
    S = np.ones((4, 4, 4))
    S[1, 0, 0] = 5.0
    with pytest.raises(SymmetryError):
        sp.covariance_from_spectrum(S)


def test_flat_spacetime():
    S = sp.discretize_spectrum(sp.Flat(2.0), (4, 4, 4))
    c = sp.covariance_from_spectrum(S)
    assert c[0, 0, 0] == pytest.approx(2.0)
    assert np.abs(c).sum() == pytest.approx(2.0)


def test_angular_freqs_nyquist_positive():
    f = sp.angular_freqs(4)
    np.testing.assert_allclose(f, [0, np.pi / 2, np.pi, -np.pi / 2])
