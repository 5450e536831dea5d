import numpy as np
import pytest

import uppertri


def random_upper(rng, n):
    u = np.triu(rng.uniform(-0.1, 0.1, (n, n)) + 1j * rng.uniform(-0.1, 0.1, (n, n)))
    u[np.diag_indices(n)] = rng.uniform(1.0, 2.0, n)
    return u


def test_reverse_cholesky_round_trip():
    rng = np.random.default_rng(1)
    u = random_upper(rng, 6)
    q = u @ u.conj().T
    v, residual, rank = uppertri.reverse_cholesky(q)
    assert rank == 6
    assert residual < 1e-12
    assert np.allclose(np.tril(v, -1), 0.0)
    assert np.allclose(v, u, atol=1e-12)


def test_cholesky_is_lower():
    q = np.array([[4.0, 2.0], [2.0, 3.0]], dtype=complex)
    l, _, _ = uppertri.cholesky_ll(q)
    assert l[0, 1] == 0
    assert np.allclose(l @ l.conj().T, q)


def test_indefinite_input_raises():
    with pytest.raises(uppertri.PositivityError):
        uppertri.reverse_cholesky(np.array([[0, 1], [1, 0]], dtype=complex))


def test_window_and_order():
    w = uppertri.Window(2, 1)
    assert len(w) == 4
    assert w.indices() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert uppertri.leq([1, 2], [2, 2])
    assert not uppertri.leq([1, 2], [2, 1])


def test_counterexample_certificate_and_hotel():
    pat = uppertri.pattern_nest_tensor(2, uppertri.Window(2, 1))
    u = np.eye(4, dtype=complex)
    u[1, 2] = 1.0
    q = u @ u.conj().T
    report = uppertri.poset_feasibility(q, pat)
    assert not report["feasible"]
    assert [(c["row"], c["col"]) for c in report["certificate"]] == [(1, 2)]
    b, residual, universal = uppertri.hotel_factor(q, pat, 4)
    assert residual <= 1e-12
    assert np.allclose(b @ b.conj().T, q)
    assert len(universal) == 4


def test_fejer_riesz_and_bauer_agree():
    # p = |1 + 0.5 z|^2
    p = [1.25, 0.5]
    f = uppertri.fejer_riesz(p)
    assert np.allclose(f, [1.0, 0.5], atol=1e-12)
    a = uppertri.bauer_factor(p, 256)
    assert np.allclose(a[:2], [1.0, 0.5], atol=1e-10)
    t = uppertri.toeplitz_matrix(p, 3)
    assert t[1, 0] == pytest.approx(0.5)


def test_douglas_and_range():
    i2 = np.eye(2, dtype=complex)
    lam, mu = uppertri.douglas_constants(2 * i2, i2)
    assert lam == pytest.approx(4.0)
    assert mu == pytest.approx(0.25)
    assert uppertri.range_equal(i2, 3 * i2)


def test_gen_upper_section():
    u, q = uppertri.gen_upper(1, 1, 5, 2, 7)
    assert np.allclose(u @ u.conj().T, q, atol=1e-12)


def test_cli_in_process():
    code, out, _ = uppertri.run_cli(["--no-timings", "demo-counterexample"])
    assert code == 0
    assert '"demo-counterexample"' in out
    code, _, err = uppertri.run_cli(["no-such-command"])
    assert code == 3
    assert err
