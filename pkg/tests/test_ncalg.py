"""Normal ordering, quantization prescriptions, and substitutions."""

from fractions import Fraction

import numpy as np
import pytest

from todaq import ncalg
from todaq.exactnum import GaussRat


def test_canonical_pair_commutator():
    t = ncalg.weyl_pair()
    q, p = t.gen("q"), t.gen("p")
    assert q.commutator(p) == t.scalar(GaussRat(0, 1))
    assert p.commutator(q) == t.scalar(GaussRat(0, -1))
    assert q.commutator(q).is_zero()


def test_normal_order_puts_momenta_right():
    t = ncalg.weyl_pair()
    q, p = t.gen("q"), t.gen("p")
    # pq = qp - i
    assert p * q == q * p - t.scalar(GaussRat(0, 1))
    # p q^2 = q^2 p - 2i q
    assert p * q * q == q * q * p - q * GaussRat(0, 2)


def test_randomized_rewrite_schedules_agree():
    rng = np.random.default_rng(3)
    for t in (ncalg.weyl_pair(), ncalg.a2_xi_table(), ncalg.a2_qp_table()):
        for _ in range(30):
            length = int(rng.integers(2, 7))
            word = [t.names[int(i)] for i in rng.integers(0, t.ngens, length)]
            a = ncalg.normal_order(word, t)
            b = ncalg.reference_normal_order(word, t, rng)
            assert a == b, word


def test_laurent_pair_negative_powers():
    t = ncalg.weyl_pair(laurent=True)
    p = t.gen("p")
    qinv = t.monomial({"q": -1})
    q = t.gen("q")
    assert q * qinv == t.one()
    # [p, q^-1] = i q^-2
    comm = p.commutator(qinv)
    assert comm == t.monomial({"q": -2}, GaussRat(0, 1))


def test_quantize_prescriptions_differ_by_commutators():
    t = ncalg.weyl_pair()
    q, p = t.gen("q"), t.gen("p")
    mono = [(1, {"q": 2, "p": 2})]
    right = ncalg.quantize(mono, "rightP", t)
    left = ncalg.quantize(mono, "leftP", t)
    weyl = ncalg.quantize(mono, "weyl", t)
    assert right == q * q * p * p
    assert left == p * p * q * q
    # the prescriptions differ by lower-order commutator corrections
    assert right - left == q * p * GaussRat(0, 4) + 2
    assert weyl == (q * q * p * p + p * q * q * p * 2 + p * p * q * q) * Fraction(1, 4)


def test_quantize_weyl_passthrough_for_commuting_letters():
    t = ncalg.a2_qp_table()
    f = [(Fraction(1, 3), {"Q1": 2, "Q2": 1})]
    assert ncalg.quantize(f, "weyl", t) == ncalg.quantize(f, "rightP", t)


def test_quantize_weyl_rejects_negative_exponents():
    t = ncalg.weyl_pair(laurent=True)
    with pytest.raises(ValueError):
        ncalg.quantize([(1, {"q": -1, "p": 1})], "weyl", t)


def test_quantize_unknown_prescription():
    with pytest.raises(ValueError):
        ncalg.quantize([(1, {"q": 1})], "sideways", ncalg.weyl_pair())


def test_ordering_hamiltonians_match_substitution_images():
    for side, builder in (("right", ncalg.a1_right_hamiltonian),
                          ("left", ncalg.a1_left_hamiltonian)):
        sub = ncalg.a1_ordering_substitution(side)
        image = ncalg.substitute(ncalg.a1_cm_hamiltonian(sub.source), sub)
        assert image == builder(sub.target)


def test_weyl_hamiltonian_is_the_ordering_average():
    t = ncalg.weyl_pair()
    avg = (ncalg.a1_right_hamiltonian(t) + ncalg.a1_left_hamiltonian(t)) \
        * Fraction(1, 2)
    assert ncalg.a1_weyl_hamiltonian(t) == avg


def test_a2_qp_commutator_vanishes():
    t = ncalg.a2_qp_table()
    H = ncalg.a2_qp_hamiltonian(t)
    I = ncalg.a2_qp_invariant(t)
    assert H.commutator(I).is_zero()


def test_a2_xi_commutator_vanishes():
    t = ncalg.a2_xi_table()
    assert ncalg.a2_xi_hamiltonian(t).commutator(ncalg.a2_xi_invariant(t)).is_zero()


def test_canonical_substitution_preserves_relations():
    sub = ncalg.a2_canonical_substitution()
    report = ncalg.verify_relations(sub)
    assert report.ok
    assert all(ent.ok for ent in report.entries)


def test_broken_substitution_is_detected():
    src = ncalg.a2_xi_table()
    tgt = ncalg.a2_qp_table()
    images = {
        "pxi": tgt.gen("Q1") * tgt.gen("P1"),   # missing the 1/2
        "peta": tgt.gen("Q2") * tgt.gen("P2") * Fraction(1, 2),
        "c0": tgt.gen("Q1"),
        "c1": tgt.gen("Q2"),
    }
    report = ncalg.verify_relations(ncalg.Substitution(src, tgt, images, "broken"))
    assert not report.ok
    assert "residual" in report.render()


def test_toy_conjugate_pair_commutator():
    t = ncalg.weyl_pair(laurent=True)
    want = t.scalar(GaussRat(0, -1))
    for n in (-2, -1, 0, 2, 3, 4):
        U, u = ncalg.toy_conjugate_pair(t, n)
        assert U.commutator(u) == want, n
    with pytest.raises(ValueError):
        ncalg.toy_conjugate_pair(t, 1)


def test_toy_hamiltonian_ordered_form():
    t = ncalg.weyl_pair(laurent=True)
    q, p = t.gen("q"), t.gen("p")
    # q^n p q^n p normal-orders to q^2n p^2 - i n q^(2n-1) p
    for n in (0, 1, 3):
        H = ncalg.toy_hamiltonian(t, n)
        expect = (t.monomial({"q": 2 * n}) * p * p
                  + t.monomial({"q": 2 * n - 1}, GaussRat(0, -n)) * p
                  + q * q) * Fraction(1, 2)
        assert H == expect, n


def test_partial_table_derivation_relation():
    t = ncalg.partial_table(("x", "y"))
    x, dx, dy = t.gen("x"), t.gen("Dx"), t.gen("Dy")
    assert dx.commutator(x) == t.one()
    assert dy.commutator(x).is_zero()
    assert dx.commutator(dy).is_zero()


def test_scaling_realization_candidates_adjudicate_halving():
    c = ncalg.scaling_realization_candidates()
    assert c["half_matches_declared"]
    assert not c["full_matches_declared"]
    assert c["full_matches_unhalved"]


def test_omega_substitution_preserves_relations():
    assert ncalg.verify_relations(ncalg.omega_poisson_substitution()).ok


def test_hbar_parts_and_scalar_substitution():
    t = ncalg.weyl_pair()
    q, p = t.gen("q"), t.gen("p")
    f = q * p
    g = p * q  # = qp - i
    diff = f - g
    assert diff == t.scalar(GaussRat(0, 1))
    assert diff.hbar_part(0) == diff
    assert diff.hbar_part(1).is_zero()


def test_monomial_inverse_requires_single_monomial():
    t = ncalg.weyl_pair(laurent=True)
    q = t.gen("q")
    assert q.monomial_inverse() == t.monomial({"q": -1})
    with pytest.raises(ValueError):
        (q + t.one()).monomial_inverse()
