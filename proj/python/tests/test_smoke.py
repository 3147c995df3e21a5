import math

import numpy as np
import pytest

import jcnoise

ALPHA = complex(math.sqrt(10.0), 0.0)


def test_version():
    assert jcnoise.__version__.count(".") == 2


def test_laguerre_and_expm():
    assert jcnoise.laguerre(2, 0, -2.0) == pytest.approx(7.0)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    u = jcnoise.matrix_exponential(-1j * (math.pi / 2) * x)
    assert np.allclose(u, [[0, -1j], [-1j, 0]], atol=1e-12)


def test_thermal_distribution():
    p = jcnoise.photon_distribution(jcnoise.thermal_state(1.0))
    assert p[:3] == pytest.approx([0.5, 0.25, 0.125], abs=1e-12)
    assert p.sum() == pytest.approx(1.0, abs=1e-10)


def test_dts_routes_and_overlaps():
    u = jcnoise.displaced_thermal(ALPHA, 1.0, method="unitary")
    m = jcnoise.displaced_thermal(ALPHA, 1.0, method="pacs_mixture")
    assert np.max(np.abs(u.rho - m.rho)) < 1e-8
    assert u.kind == "dts"
    assert jcnoise.coherent_overlap(u, ALPHA) == pytest.approx(0.5, abs=1e-9)
    assert jcnoise.purity_deficit(u) == pytest.approx(2.0 / 3.0, abs=1e-9)

    q = jcnoise.equal_overlap_q(ALPHA, 1.0)
    assert 0.49 <= q <= 0.51
    mt = jcnoise.mtcs(ALPHA, 1.0, q)
    assert jcnoise.coherent_overlap(mt, ALPHA) == pytest.approx(0.5, abs=1e-9)

    added = jcnoise.photon_add(u)
    assert added.kind == "photon_added(dts)"
    assert abs(added.rho[0, 0]) <= 1e-14
    assert jcnoise.coherent_overlap(added, ALPHA) == pytest.approx(5.0 / 12.0, abs=1e-6)


def test_bimodal_mtcs():
    p = jcnoise.photon_distribution(jcnoise.mtcs(ALPHA, 1.0, 0.5))
    peaks = jcnoise.local_maxima(list(p))
    assert len(peaks) == 2 and peaks[0] == 0


def test_vacuum_rabi_and_negativity():
    vac = jcnoise.number_state(0, 4)
    grid = jcnoise.uniform_grid(5.0, 101)
    series = jcnoise.time_series(vac, grid)
    assert np.allclose(series["inversion"], np.cos(2 * np.asarray(grid)), atol=1e-9)
    quarter = jcnoise.evolve_analytic(vac, math.pi / 4)
    assert jcnoise.negativity(quarter) == pytest.approx(0.5, abs=1e-8)


def test_propagators_agree():
    field = jcnoise.truncate_field(jcnoise.displaced_thermal(ALPHA, 1.0), 40)
    a = jcnoise.evolve_analytic(field, 5.0)
    n = jcnoise.evolve_numeric(jcnoise.initial_joint_state(field), 5.0)
    assert np.max(np.abs(a.rho - n.rho)) < 1e-9


def test_errors_map_to_python_exceptions():
    with pytest.raises(jcnoise.CutoffTooSmall):
        jcnoise.coherent_state(ALPHA, 20)
    with pytest.raises(jcnoise.DomainError):
        jcnoise.mtcs(ALPHA, 1.0, 1.5)
    with pytest.raises(jcnoise.JcnoiseError):
        jcnoise.laguerre(2, -3, 0.0)
    with pytest.raises(ValueError):
        jcnoise.displaced_thermal(ALPHA, 1.0, method="bogus")
