"""Matrix pair builders: shape, symmetry, and flow compatibility."""

import numpy as np
import pytest

from todaq import lax

RNG = np.random.default_rng(7)


def fd_matrix_derivative(system, z, h=1e-6):
    """d/dt build_L along the native ODE direction, by central difference."""
    z = np.asarray(z, dtype=float)
    zdot = lax.phase_rhs(system, z)
    Lp = lax.build_L(system, z + h * zdot)
    Lm = lax.build_L(system, z - h * zdot)
    return (Lp - Lm) / (2 * h)


# ---------------------------------------------------------------------------
# catalog


def test_make_system_catalog():
    cases = [
        ("a1", {}, 2, 2, True, -1),
        ("a1_cm", {}, 2, 2, True, -1),
        ("a1_pq", {}, 2, 2, True, -1),
        ("a1toy", {"n": 2}, 2, 2, True, -1),
        ("a1toy_pq", {"n": 0}, 2, 2, True, -1),
        ("a2", {}, 4, 3, True, 1),
        ("a2hier", {"m": 3}, 4, 3, True, 1),
        ("gl", {"size": 3}, 9, 3, False, 1),
    ]
    for name, params, dim, size, symmetric, side in cases:
        system = lax.make_system(name, **params)
        assert system.dim == dim
        assert system.size == size
        assert system.symmetric is symmetric
        assert system.commutator_side == side
        assert system.default_state().shape == (dim,)


def test_make_system_aliases_and_case():
    assert lax.make_system("GL", size=2).family == "GL"
    assert lax.make_system("toy", n=3).params == {"n": 3}
    assert lax.make_system("hier", m=2).params == {"m": 2}
    # the plain two-site system is the n = 1 toy member
    assert lax.make_system("a1").params == {"n": 1}


def test_make_system_rejects_bad_input():
    with pytest.raises(KeyError):
        lax.make_system("b2")
    with pytest.raises(ValueError):
        lax.make_system("gl", size=1)
    with pytest.raises(ValueError):
        lax.make_system("a2hier", m=0)


# ---------------------------------------------------------------------------
# builders


def test_two_site_matrices():
    system = lax.make_system("a1toy", n=2)
    q, p = 0.7, -0.3
    L = lax.build_L(system, (q, p))
    A = lax.build_A(system, (q, p))
    assert np.array_equal(L, [[p, q], [q, -p]])
    assert np.array_equal(A, [[0.0, -0.5 * q**2], [0.5 * q**2, 0.0]])


def test_charts_build_the_same_matrices():
    # cm chart state (Q, P) matches tilde chart state (e^Q, P)
    Q, P = 0.4, -0.8
    cm, tilde = lax.make_system("a1_cm"), lax.make_system("a1")
    assert np.allclose(lax.build_L(cm, (Q, P)),
                       lax.build_L(tilde, (np.exp(Q), P)))
    # pq chart state (q, p) matches tilde chart state (q, p q^n)
    q, p = 0.9, 0.5
    pq = lax.make_system("a1toy_pq", n=2)
    tilde2 = lax.make_system("a1toy", n=2)
    assert np.allclose(lax.build_L(pq, (q, p)),
                       lax.build_L(tilde2, (q, p * q**2)))
    assert np.allclose(lax.build_A(pq, (q, p)), lax.build_A(tilde2, (q, 0.0)))


def test_l_symmetry_and_a_antisymmetry():
    for name, params in [("a1", {}), ("a1toy", {"n": 3}), ("a2", {}),
                         ("a2hier", {"m": 2})]:
        system = lax.make_system(name, **params)
        z = RNG.uniform(0.3, 1.2, system.dim)
        L, A = lax.build_L(system, z), lax.build_A(system, z)
        assert np.array_equal(L, L.T)
        # odd powers of the antisymmetric generator stay antisymmetric,
        # up to summation-order roundoff in the matrix product
        assert np.allclose(A, -A.T, atol=1e-14)


def test_gl_builders_split_the_state():
    system = lax.make_system("gl", size=2)
    z = np.array([1.0, 2.0, 3.0, 4.0])
    L = lax.build_L(system, z)
    assert np.array_equal(L, [[1.0, 2.0], [3.0, 4.0]])
    A = lax.build_A(system, z)
    assert np.array_equal(A, [[0.0, 2.0], [-3.0, 0.0]])
    # build_L copies: mutating the matrix must not leak into the state view
    L[0, 0] = 99.0
    assert z[0] == 1.0


# ---------------------------------------------------------------------------
# the isospectral right side matches the chart ODE


@pytest.mark.parametrize("name,params", [
    ("a1", {}),
    ("a1_cm", {}),
    ("a1_pq", {}),
    ("a1toy", {"n": 0}),
    ("a1toy", {"n": 2}),
    ("a1toy", {"n": 3}),
    ("a2", {}),
    ("a2hier", {"m": 1}),
    ("a2hier", {"m": 2}),
    ("a2hier", {"m": 3}),
    ("gl", {"size": 2}),
    ("gl", {"size": 3}),
])
def test_lax_rhs_is_matrix_derivative(name, params):
    system = lax.make_system(name, **params)
    rng = np.random.default_rng(11)
    for _ in range(5):
        z = rng.uniform(0.3, 1.2, system.dim)
        got = lax.lax_rhs(system, z)
        want = fd_matrix_derivative(system, z)
        assert np.allclose(got, want, atol=1e-5), name


def test_invariant_and_eigenvalues():
    system = lax.make_system("a2")
    z = RNG.uniform(0.2, 1.0, 4)
    L = lax.build_L(system, z)
    for k in (1, 2, 3):
        assert np.isclose(lax.invariant(system, z, k),
                          np.trace(np.linalg.matrix_power(L, k)))
    w = lax.eigenvalues(system, z)
    assert np.all(np.diff(w) >= 0)
    assert np.allclose(w, np.sort(np.linalg.eigvalsh(L)))


def test_gl_eigenvalues_sorted_by_real_then_imag():
    system = lax.make_system("gl", size=2)
    w = lax.eigenvalues(system, [0.0, 1.0, -1.0, 0.0])
    assert np.allclose(w, [-1j, 1j])


# ---------------------------------------------------------------------------
# three-site chart helpers


def test_vc_builders():
    v, c = [0.3, -0.1, 0.5], [0.8, 1.1]
    L = lax.build_L_vc(v, c)
    assert np.array_equal(L, [[0.3, 0.8, 0.0], [0.8, -0.1, 1.1],
                              [0.0, 1.1, 0.5]])
    A0 = lax.build_A0_vc(c)
    assert np.array_equal(A0, -A0.T)
    assert np.array_equal(A0, [[0.0, 0.4, 0.0], [-0.4, 0.0, 0.55],
                               [0.0, -0.55, 0.0]])


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_hierarchy_vc_rhs_matches_commutator(m):
    rng = np.random.default_rng(m)
    for _ in range(20):
        v = rng.uniform(-1.0, 1.0, 3)
        v -= v.mean()  # the flow preserves tr L = 0, start on that leaf
        c = rng.uniform(0.2, 1.5, 2)
        L = lax.build_L_vc(v, c)
        A = np.linalg.matrix_power(lax.build_A0_vc(c), 2 * m - 1)
        Ldot = A @ L - L @ A
        vdot, cdot = lax.hierarchy_vc_rhs(v, c, m)
        assert np.allclose(vdot, np.diag(Ldot), atol=1e-12)
        assert np.allclose(cdot, np.diag(Ldot, 1), atol=1e-12)
        assert abs(vdot.sum()) < 1e-13


def test_projection_flow_rhs():
    rng = np.random.default_rng(5)
    v = rng.uniform(-1.0, 1.0, 3)
    c = rng.uniform(0.2, 1.5, 2)
    L = lax.build_L_vc(v, c)
    A0 = lax.build_A0_vc(c)
    got = lax.projection_flow_rhs(L, 1)
    want = lax.HIERARCHY_PROJECTION_FACTOR * (A0 @ L - L @ A0)
    assert np.allclose(got, want, atol=1e-13)
    for m in (1, 2, 3):
        R = lax.projection_flow_rhs(L, m)
        assert abs(np.trace(R)) < 1e-12
        assert np.allclose(R, R.T, atol=1e-12)  # symmetric L stays symmetric


# ---------------------------------------------------------------------------
# trace identities


def test_symmetric_cubic_trace():
    rng = np.random.default_rng(9)
    for _ in range(20):
        v = rng.uniform(-2.0, 2.0, 3)
        c = rng.uniform(0.1, 2.0, 2)
        L = lax.build_L_vc(v, c)
        assert np.isclose(lax.symmetric_cubic_trace(v, c),
                          np.trace(L @ L @ L), atol=1e-10)


def test_cubic_trace_identity_coefficients():
    alpha, beta = lax.cubic_trace_identity_coefficients()
    assert (alpha, beta) == (1.5, -0.5)
    rng = np.random.default_rng(4)
    for _ in range(20):
        L = rng.uniform(-2.0, 2.0, (2, 2))
        t1 = np.trace(L)
        t2 = np.trace(L @ L)
        t3 = np.trace(L @ L @ L)
        assert np.isclose(t3, alpha * t1 * t2 + beta * t1**3, atol=1e-10)
