import math

import numpy as np
import pytest

from conftest import BUMP, make_chain, make_circle, make_interval, make_star
from graphzeta import (F_imag, NumericalError, asymptotic_F_coefficients,
                       dF_dL_imag, replace_bond_length, secular_matrix_real,
                       smallest_singular_values)


def test_interval_singular_exactly_at_eigenvalues():
    graph, mc = make_interval(1.0)
    ks = np.array([math.pi, 2 * math.pi, 2.5 * math.pi, 3 * math.pi])
    sv = smallest_singular_values(graph, mc, ks)
    assert sv[0] < 1e-10 and sv[1] < 1e-10 and sv[3] < 1e-10
    assert sv[2] > 0.05


def test_circle_flux_shifts_the_spectrum():
    graph, mc = make_circle(1.0, A=1.0)
    sv = smallest_singular_values(graph, mc, np.array([1.0, 2.0,
                                                       2 * math.pi - 1.0]))
    assert sv[0] < 1e-9 and sv[2] < 1e-9
    assert sv[1] > 1e-2


def test_secular_matrix_shape_and_locality():
    graph, mc = make_star(1.0)
    S = secular_matrix_real(graph, mc, 1.3)
    assert S.shape == (6, 6)


def test_F_imag_positive_secular_function():
    # the secular function comes out normalized by the bond solutions, so
    # on the Dirichlet interval it is exactly 1 and on the Neumann
    # interval exactly t^2; positivity shows up as a vanishing phase
    graph, mc = make_interval(1.0)
    for t in (0.5, 1.0, 3.0, 10.0):
        sv = F_imag(graph, mc, t)
        assert abs(sv.log_abs) < 1e-12
        assert abs(math.sin(sv.phase)) < 1e-10
    graph, mc = make_interval(1.0, kinds=("neumann", "neumann"))
    for t in (0.5, 1.0, 3.0, 10.0):
        sv = F_imag(graph, mc, t)
        assert sv.log_abs == pytest.approx(2.0 * math.log(t), abs=1e-10)
        assert abs(math.sin(sv.phase)) < 1e-10


def test_asymptotics_exact_polynomial_for_delta_star():
    lam = 2.5
    graph, mc = make_star(lam)
    data = asymptotic_F_coefficients(graph, mc)
    assert data.exact
    assert data.leading_power == 5
    # F(it) ~ c t^(2B-N) exp(a1/t + ...) with a1 = lam / B here
    assert data.log_coeffs[0] == pytest.approx(lam / 3.0, abs=1e-12)
    assert data.residue_at_minus_half == pytest.approx(lam / (6 * math.pi),
                                                       abs=1e-12)


def test_asymptotics_kirchhoff_star_has_no_log_corrections():
    graph, mc = make_star(0.0)
    data = asymptotic_F_coefficients(graph, mc)
    assert data.exact
    assert data.log_coeffs == (0.0, 0.0, 0.0, 0.0)
    assert data.residue_at_minus_half == 0.0


def test_asymptotics_selfcheck_accepts_bump_chain():
    graph, mc = make_chain((1.0, 1.0, 1.0), bump=BUMP)
    data = asymptotic_F_coefficients(graph, mc, check=True)
    assert not math.isinf(data.gap) or data.exact


def test_asymptotics_neumann_interval():
    import json

    from graphzeta import parse_graph
    doc = {
        "vertices": 2,
        "bonds": [{"id": 1, "origin": 1, "terminus": 2, "length": 1.0}],
        "matching": {"mode": "global", "A": [[0, 0], [0, 0]],
                     "B": [[1, 0], [0, 1]]},
    }
    graph, mc = parse_graph(json.dumps(doc))
    data = asymptotic_F_coefficients(graph, mc)
    assert data.exact
    assert data.leading_power == 0


def test_asymptotics_rejects_degenerate_conditions():
    import json

    from graphzeta import parse_graph
    doc = {
        "vertices": 2,
        "bonds": [{"id": 1, "origin": 1, "terminus": 2, "length": 1.0}],
        "matching": {"mode": "global", "A": [[0, 0], [0, 0]],
                     "B": [[1, 0], [0, 0]]},
    }
    graph, mc = parse_graph(json.dumps(doc), validate=False)
    with pytest.raises(NumericalError, match="degenerate"):
        asymptotic_F_coefficients(graph, mc, check=False)


def test_length_derivative_of_log_F():
    # normalization makes log F length-independent on a single bond, so
    # the derivative must vanish identically there; on the star it must
    # reproduce a central difference of log|F| itself
    graph, mc = make_interval(1.0)
    for t in (0.8, 2.5, 12.0):
        got, err = dF_dL_imag(graph, mc, 1, t)
        assert abs(got) <= max(err, 1e-12)

    graph, mc = make_star(1.0)
    h = 1e-6
    for t in (0.8, 1.7, 5.0):
        got, err = dF_dL_imag(graph, mc, 2, t)
        plus = F_imag(replace_bond_length(graph, 2, 1.0 + h), mc, t).log_abs
        minus = F_imag(replace_bond_length(graph, 2, 1.0 - h), mc, t).log_abs
        fd = (plus - minus) / (2.0 * h)
        assert abs(got.imag) < 1e-10
        assert got.real == pytest.approx(fd, abs=1e-6)


def test_length_derivative_error_estimate():
    graph, mc = make_star(1.0)
    got, err = dF_dL_imag(graph, mc, 2, 1.7)
    assert err < 1e-6
    assert math.isfinite(got.real) and abs(got.imag) < 1e-12
