"""Acceptance gate: ten numbered criteria with pinned tolerances.

Each test prints one ``CRITERION n: PASS/FAIL (...)`` line (run with
``pytest tests/test_acceptance.py -v -s`` to see them) and then asserts.
Criterion 8 documents a genuine property of the two charts at the
stated grid size: the relative deviation there is about 0.30, far above
the 1e-3 target, so its test fails by design and prints the measured
values together with the fine-grid deviation that does meet the target.
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np

from todaq import flow, lax, liepoisson as lp, ncalg, phase, verify
from todaq import spectral as sp
from todaq.exactnum import GaussRat, Poly


def criterion(num: int, ok: bool, detail: str):
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num}: {detail}"


def run_check(name: str) -> verify.CheckResult:
    suite, fn = verify._REGISTRY[name]
    ok, detail = fn()
    return verify.CheckResult(name, bool(ok), detail)


# ---------------------------------------------------------------------------


def test_criterion_01_exact_commutator():
    """The three-site operators in canonical variables commute exactly."""
    t0 = time.perf_counter()
    t = ncalg.a2_qp_table()
    c = ncalg.a2_qp_hamiltonian(t).commutator(ncalg.a2_qp_invariant(t))
    elapsed = time.perf_counter() - t0
    ok = c.is_zero() and elapsed < 1.0
    criterion(1, ok, f"[H, I] {'=' if c.is_zero() else '!='} 0 exactly "
                     f"(rational arithmetic), {elapsed:.3f} s < 1 s")


def test_criterion_02_ordering_identities():
    """Momentum-right image, symmetrized p^2 q^2, and the average rule."""
    sub = ncalg.a1_ordering_substitution("right")
    tr = sub.target
    q, p = tr.gen("q"), tr.gen("p")
    printed_right = (q * q * p * p - q * p * GaussRat(0, 1) + q * q) \
        * Fraction(1, 2)
    image = ncalg.substitute(ncalg.a1_cm_hamiltonian(sub.source), sub)
    right_ok = image == printed_right == ncalg.a1_right_hamiltonian(tr)

    t = ncalg.weyl_pair()
    q, p = t.gen("q"), t.gen("p")
    sym = ncalg.quantize([(1, {"q": 2, "p": 2})], "weyl", t)
    quarter = (q * q * p * p + p * q * q * p * 2 + p * p * q * q) \
        * Fraction(1, 4)
    weyl_ok = sym == quarter

    avg = (ncalg.a1_right_hamiltonian(t) + ncalg.a1_left_hamiltonian(t)) \
        * Fraction(1, 2)
    avg_ok = ncalg.a1_weyl_hamiltonian(t) == avg

    criterion(2, right_ok and weyl_ok and avg_ok,
              f"right image == 1/2(q^2 p^2 - i q p + q^2): {right_ok}; "
              f"weyl(p^2 q^2) == quarter form: {weyl_ok}; "
              f"weyl operator == (right + left)/2: {avg_ok}; all exact")


def test_criterion_03_isospectral_drift():
    """Twenty seeded three-site flows keep spectrum and trace powers."""
    rng = np.random.default_rng(42)
    system = lax.make_system("a2")
    cfg = flow.IntegratorConfig(method="rk4", h=1e-3, t_final=10.0, stride=100)
    worst_eig, worst_tr = 0.0, 0.0
    for _ in range(20):
        traj = flow.integrate(system, rng.uniform(-1.0, 1.0, 4), cfg)
        rep = flow.drift_report(traj)
        worst_eig = max(worst_eig, rep.eigenvalue_drift)
        worst_tr = max(worst_tr, rep.invariant_drift[2], rep.invariant_drift[3])
    ok = worst_eig < 1e-7 and worst_tr < 1e-7
    criterion(3, ok, f"20 flows, T=10, rk4 h=1e-3: max eigenvalue drift "
                     f"{worst_eig:.3e}, max trL^2/trL^3 drift {worst_tr:.3e} "
                     f"(tol 1e-7)")


def test_criterion_04_hierarchy_flows_match_commutators():
    """Closed-form member equations equal the matrix commutator."""
    rng = np.random.default_rng(3)
    worst, worst_sum = 0.0, 0.0
    for m in (1, 2, 3, 4):
        for _ in range(100):
            v = rng.uniform(-1.0, 1.0, 3)
            v -= v.mean()
            c = rng.uniform(0.2, 1.5, 2)
            L = lax.build_L_vc(v, c)
            A = np.linalg.matrix_power(lax.build_A0_vc(c), 2 * m - 1)
            Ldot = A @ L - L @ A
            vdot, cdot = lax.hierarchy_vc_rhs(v, c, m)
            worst = max(worst,
                        float(np.max(np.abs(vdot - np.diag(Ldot)))),
                        float(np.max(np.abs(cdot - np.diag(Ldot, 1)))))
            worst_sum = max(worst_sum, abs(float(vdot.sum())))
    match_ok = worst < 1e-12 and worst_sum < 1e-12

    # the first member is the plain three-site flow
    cfg = flow.IntegratorConfig(method="rk4", h=1e-3, t_final=5.0, stride=50)
    plain = lax.make_system("a2")
    member = lax.make_system("a2hier", m=1)
    dev = 0.0
    for z0 in (plain.default_state(), rng.uniform(-0.5, 0.5, 4)):
        a = flow.integrate(plain, z0, cfg)
        b = flow.integrate(member, z0, cfg)
        dev = max(dev, float(np.max(np.abs(a.states - b.states))))
    flow_ok = dev < 1e-9

    criterion(4, match_ok and flow_ok,
              f"m=1..4, 100 states each: max |equations - commutator| = "
              f"{worst:.3e}, max |sum vdot| = {worst_sum:.3e} (tol 1e-12); "
              f"m=1 vs plain flow over T=5: {dev:.3e} (tol 1e-9)")


def test_criterion_05_bracket_reproduces_member_equations():
    """The point-dependent bracket drives the four member equations."""
    worst = 0.0
    for m in (1, 2, 3, 4):
        sysm = phase.get_system("a2hier", m=m)
        rng = np.random.default_rng(m)
        for _ in range(100):
            z = rng.uniform(-1.0, 1.0, 4)
            xi, eta, pxi, peta = z
            grad = np.array([math.exp(xi), math.exp(eta),
                             2 * pxi - peta, 2 * peta - pxi])
            field = sysm.structure.at(z).T @ grad
            g = phase.hierarchy_prefactor(z, m)
            stated = g * np.array([2 * pxi - peta, 2 * peta - pxi,
                                   -math.exp(xi), -math.exp(eta)])
            worst = max(worst, float(np.max(np.abs(field - stated))))
    criterion(5, worst < 1e-12,
              f"Pi^T grad H vs the four member equations, m=1..4 at 100 "
              f"points each: max deviation {worst:.3e} (tol 1e-12)")


def test_criterion_06_matrix_bracket_structure():
    """Jacobi holds exactly; printed constants and flow identity hold."""
    jac_ok = all(lp.jacobi_residual(lp.r_bracket_constants(n)) == 0
                 for n in (2, 3, 4))

    S2 = lp.r_bracket_constants(2)
    half = Fraction(1, 2)
    table_ok = (
        S2.bracket_pair((1, 1), (1, 2)) == {(1, 2): half}
        and S2.bracket_pair((1, 1), (2, 1)) == {(2, 1): half}
        and S2.bracket_pair((2, 2), (1, 2)) == {(1, 2): -half}
        and S2.bracket_pair((2, 2), (2, 1)) == {(2, 1): -half}
        and S2.bracket_pair((1, 1), (2, 2)) == {}
        and S2.bracket_pair((1, 2), (2, 1)) == {})

    flow_ok = True
    for n in (2, 3):
        lhs = lp.hamilton_matrix(lp.r_bracket_constants(n),
                                 lp.flow_hamiltonian_poly(n))
        rhs = lp.sorting_rhs_matrix(n)
        flow_ok = flow_ok and all((lhs[i][j] - rhs[i][j]).is_zero()
                                  for i in range(n) for j in range(n))

    criterion(6, jac_ok and table_ok and flow_ok,
              f"Jacobi residual exactly 0 for n=2,3,4: {jac_ok}; six "
              f"fundamental n=2 brackets: {table_ok}; {{-tr L^2, L}} == "
              f"[P, L] as polynomial identities (n=2,3): {flow_ok}")


def monomials_up_to(nv: int, deg: int):
    out = []
    for d in range(deg + 1):
        for combo in itertools.combinations_with_replacement(range(nv), d):
            e = [0] * nv
            for i in combo:
                e[i] += 1
            out.append(Poly(nv, {tuple(e): Fraction(1)}))
    return out


def star_associates(f, g, h, S, nv):
    left, right = {}, {}
    for acc, first, second in ((left, lp.gutt_star(f, g, S), h),
                               (right, lp.gutt_star(g, h, S), f)):
        for k, p in first.orders.items():
            inner = lp.gutt_star(p, second, S) if acc is left \
                else lp.gutt_star(second, p, S)
            for k2, p2 in inner.orders.items():
                acc[k + k2] = acc.get(k + k2, Poly.zero(nv)) + p2
    keys = set(left) | set(right)
    return all((left.get(k, Poly.zero(nv))
                - right.get(k, Poly.zero(nv))).is_zero() for k in keys)


def test_criterion_07_star_product_associativity():
    """Full associativity sweep plus the first-order bracket law."""
    counts = {}
    for n, deg in ((2, 3), (3, 2)):
        S = lp.r_bracket_constants(n)
        nv = n * n
        mons = monomials_up_to(nv, deg)
        triples = [(a, b, c) for a in mons for b in mons for c in mons
                   if (a.total_degree() + b.total_degree()
                       + c.total_degree()) <= deg]
        counts[n] = len(triples)
        for a, b, c in triples:
            assert star_associates(a, b, c, S, nv), \
                (n, a.render(), b.render(), c.render())
    sizes_ok = counts == {2: 455, 3: 406}

    S = lp.r_bracket_constants(2)
    rng = np.random.default_rng(6)
    pair_ok = True
    for _ in range(10):
        f = Poly(4, {tuple(int(x) for x in rng.integers(0, 2, 4)):
                     Fraction(int(rng.integers(-4, 5)) or 1) for _ in range(3)})
        g = Poly(4, {tuple(int(x) for x in rng.integers(0, 2, 4)):
                     Fraction(int(rng.integers(-4, 5)) or 1) for _ in range(3)})
        sc = lp.star_commutator(f, g, S)
        pair_ok = pair_ok and sc.order(0).is_zero() \
            and (sc.order(1) - lp.lie_poisson_bracket(f, g, S)).is_zero()

    criterion(7, sizes_ok and pair_ok,
              f"associative on all {counts[2]} ordered monomial triples of "
              f"combined degree <= 3 (n=2) and {counts[3]} of degree <= 2 "
              f"(n=3), exactly at every order; hbar^1 of the commutator == "
              f"bracket on random pairs: {pair_ok}")


def test_criterion_08_spectral_equivalence():
    """Two charts of one operator: spectra at the pinned grid size."""
    t0 = time.perf_counter()
    s1 = sp.solve(sp.problem_schrodinger1(), 4096, 5, vectors=False)
    s2 = sp.solve(sp.problem_schrodinger2(), 4096, 5, vectors=False)
    dev = sp.compare_spectra(s1, s2).max_rel_dev

    # the deviation the charts CAN reach, on a much finer grid
    fine = 2 ** 18
    f1 = sp.solve(sp.problem_schrodinger1(), fine, 5, vectors=False)
    f2 = sp.solve(sp.problem_schrodinger2(), fine, 5, vectors=False)
    fine_dev = sp.compare_spectra(f1, f2).max_rel_dev
    print(f"  [info] chart deviation: {dev:.3e} at N=4096, "
          f"{fine_dev:.3e} at N=2^18 (the half-line chart needs far "
          f"more points near x = 0)")

    exact = np.arange(6) + 0.5
    toy_err = float(np.max(np.abs(
        sp.solve(sp.problem_toy(0), 4096, 6, vectors=False).energies - exact)))
    elapsed = time.perf_counter() - t0

    ok = dev < 1e-3 and toy_err < 1e-4 and elapsed < 30.0
    criterion(8, ok, f"chart deviation at N=4096: {dev:.3e} (target 1e-3, "
                     f"not reached at this grid; {fine_dev:.3e} at N=2^18); "
                     f"toy n=0 max |E_k - (k + 1/2)| = {toy_err:.3e} "
                     f"(tol 1e-4); {elapsed:.1f} s < 30 s")


def test_criterion_09_integrability_obstruction():
    """The scaled bracket conserves the cubic invariant only at n = 1."""
    zero_at_one = phase.obstruction_polynomial(1).is_zero()
    nonzero = {n: not phase.obstruction_polynomial(n).is_zero()
               for n in (0, 2, 3)}
    ok = zero_at_one and all(nonzero.values())
    criterion(9, ok, f"{{H, I}} == 0 exactly at n=1: {zero_at_one}; "
                     f"nonzero polynomial at n=0,2,3: {nonzero}")


def test_criterion_10_adjudicated_identities():
    """Both stated-vs-oracle calls are logged with both values shown."""
    inv = run_check("A2.invariant_form_adjudication")
    cubic = run_check("glN.trace_cubic_identity")
    print(f"  {inv.render()}")
    print(f"  {cubic.render()}")
    wording_ok = (inv.ok and cubic.ok
                  and "stated" in inv.detail and "oracle" in inv.detail
                  and "stated" in cubic.detail and "true tr L^3" in cubic.detail)

    # the adjudications themselves, asserted directly
    t1 = lp.trace_power_poly(2, 1)
    t2 = lp.trace_power_poly(2, 2)
    t3 = lp.trace_power_poly(2, 3)
    corrected = (t3 - (t1 * t2 * Fraction(3, 2)
                       - t1 * t1 * t1 * Fraction(1, 2))).is_zero()
    stated_wrong = not (t3 - (-(t1 * t1 * t1) + t2 * t1 * 3)).is_zero()

    rng = np.random.default_rng(10)
    cubes_match_trace = True
    for _ in range(25):
        p = rng.uniform(-1.0, 1.0, 3)
        p -= p.mean()
        e = rng.uniform(0.2, 2.0, 2)
        cubes = -(np.sum(p ** 3)) - 3 * e[0] * (p[0] + p[1]) \
            - 3 * e[1] * (p[1] + p[2])
        trace = lax.symmetric_cubic_trace(-p, np.sqrt(e))
        cubes_match_trace = cubes_match_trace and abs(cubes - trace) < 1e-12

    ok = wording_ok and corrected and stated_wrong and cubes_match_trace
    criterion(10, ok, f"both checks PASS and show stated and oracle values: "
                      f"{wording_ok}; cubes form == matrix trace at 25 "
                      f"points: {cubes_match_trace}; corrected 2x2 identity "
                      f"exact and stated one refuted: "
                      f"{corrected and stated_wrong}")
