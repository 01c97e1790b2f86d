import math

import numpy as np
import pytest

import choquard as c


@pytest.fixture(scope="module")
def p():
    return c.Params(3, 1.0)


def test_constants(p):
    k = c.best_constants(p)
    assert k.cNmu == pytest.approx(4.0 / 3.0 * 2.0 ** (2.0 / 3.0), rel=1e-12)
    assert c.sharp_hls_constant(c.Params(4, 2.0)) == pytest.approx(math.pi / 2, rel=1e-12)
    assert k.quotientWindow[0] == pytest.approx(k.sHL)
    assert c.level_of_quotient(p, k.sHL) == pytest.approx(k.beta)
    assert c.derive_exponents(p).twoStarMu == pytest.approx(5.0)


def test_invalid_params():
    with pytest.raises(ValueError, match="mu < N"):
        c.Params(3, 3.0)


def test_field_roundtrip(p):
    d = c.GridDomain.free_space(3, 4.0, 17)
    x, y, z = np.meshgrid(*d.coordinates(), indexing="ij")
    a = np.exp(-(x**2 + y**2 + z**2)) * d.mask()
    f = c.Field(d, a)
    assert np.array_equal(f.array(), a)
    with pytest.raises(ValueError):
        c.Field(d, np.zeros((16, 17, 17)))


def test_energy_of_a_bubble(p):
    d = c.GridDomain.free_space(3, 8.0, 33)
    op = c.RieszOperator(p, d)
    u = c.sample_bubble(c.BubbleSpec([0.0, 0.0, 0.0], 1.0, c.solution_amplitude(p)), p, d)
    q = c.quotient(u, op)
    # The box cuts off part of the Dirichlet tail, so q lands below sHL.
    assert 0.5 * c.best_constants(p).liebSHL < q < c.best_constants(p).liebSHL
    g = c.gradient(u, op)
    assert g.array().shape == (33, 33, 33)
    fit = c.fit_bubble(u, p)
    assert fit.residual < 1e-8
    assert fit.spec.scale == pytest.approx(1.0, rel=1e-6)


def test_riesz_scaling(p):
    a = c.GridDomain.free_space(3, 4.0, 17)
    b = c.GridDomain.free_space(3, 2.0, 17)

    def f(d, s):
        x, y, z = np.meshgrid(*d.coordinates(), indexing="ij")
        return c.Field(d, np.exp(-((s * x) ** 2 + (s * y) ** 2 + (s * z) ** 2)) * d.mask())

    va = c.RieszOperator(p, a).apply(f(a, 1.0)).array()
    vb = c.RieszOperator(p, b).apply(f(b, 2.0)).array()
    assert np.max(np.abs(vb - 0.25 * va)) < 1e-12 * np.max(va)


def test_decompose_single_bubble(p):
    d = c.GridDomain.free_space(3, 8.0, 49)
    op = c.RieszOperator(p, d)
    u = c.synthesize_ps_field([c.ProfileSpec([0.0, 0.0, 0.0], 0.8, 1)], d, p)
    r = c.decompose(u, op, 3)
    assert r["k"] == 1
    assert r["bubbles"][0]["scale"] == pytest.approx(0.8, rel=1e-5)
    assert r["relative_gap"] < 1e-6


def test_family_helpers():
    s = np.array(c.sphere_samples(3, 12))
    assert np.allclose(np.linalg.norm(s, axis=1), 1.0)
    ts = c.family_ts(10)
    assert ts[0] == 0.0 and ts[-1] == pytest.approx(0.999)
    assert c.loglog_slope([1.0, 2.0, 4.0], [1.0, 0.5, 0.25]) == pytest.approx(-1.0)
