from fractions import Fraction

import pytest

from legendre_rank.errors import PreconditionFailed
from legendre_rank.parity import CONSISTENT, parity_consistency
from legendre_rank.pipelines import (
    CLASSIFICATIONS,
    EXTERNAL_THEOREM,
    J_MEMBER,
    N_MEMBER,
    SINGULAR,
    SKIPPED,
    fibre_record,
    independent_rank_check,
    legendre_parameters,
    neumann_setzer_record,
    neumann_setzer_survey,
    prove_rank_zero,
    scan_legendre_fibres,
    surface_report,
)
from legendre_rank.weierstrass import CurvePoint, fibre_model_neumann_setzer, point_multiply, torsion_structure


def test_certificate_for_q5():
    c = prove_rank_zero(5)
    assert (c.alpha, c.mu, c.bound, c.root_number, c.concluded_rank) == (0, 2, 1, 1, 0)
    assert c.local_types == ((2, "I2", "split-multiplicative", 2), (31, "I2", "nonsplit-multiplicative", 2))
    for i, s in enumerate(c.steps):
        assert all(u < i for u in s.uses)
    assert any(s.tag == EXTERNAL_THEOREM for s in c.steps)


@pytest.mark.parametrize("q", [4, 11, 3, 23])
def test_certificate_preconditions(q):
    with pytest.raises(PreconditionFailed):
        prove_rank_zero(q)


@pytest.mark.parametrize("q", [5, 7])
def test_independent_check_agrees_with_certificate(q):
    conf = independent_rank_check(q, 300)
    assert conf.dim_two == 2 and conf.rank == 0 and conf.only_torsion
    assert prove_rank_zero(q).concluded_rank == conf.rank


def test_parameters_are_reduced_and_exclude_singular_points():
    params = legendre_parameters(3)
    assert len(params) == len(set(params))
    assert Fraction(0) not in params and Fraction(1) not in params
    assert all(max(abs(b.numerator), b.denominator) <= 3 for b in params)
    assert Fraction(-3, 2) in params and Fraction(2, 3) in params


def test_small_scan_is_total():
    st = scan_legendre_fibres(3)
    assert len(st.records) == len(legendre_parameters(3))
    assert sum(st.counts.values()) == len(st.records)
    assert all(r.classification in CLASSIFICATIONS for r in st.records)


def test_mersenne_fibre_in_scan_is_n_member():
    r = fibre_record(32)
    assert r.classification == N_MEMBER and (r.alpha, r.mu) == (0, 2)
    assert r.root_number == "+1"


def test_singular_fibres_are_recorded():
    assert fibre_record(1).classification == SINGULAR
    assert fibre_record(0).classification == SINGULAR


def test_scan_height_20_has_both_classes():
    st = scan_legendre_fibres(20, search_height=30)
    assert st.counts[N_MEMBER] > 0 and st.counts[J_MEMBER] > 0
    for r in st.records:
        if r.classification == N_MEMBER:
            assert (r.lower, r.upper) == (0, 0)
        if r.classification == J_MEMBER:
            assert r.lower >= 1
        if r.semistable and r.decided:
            w = 1 if r.root_number == "+1" else -1
            assert parity_consistency(r.lower, w) == CONSISTENT
    assert -1 < st.mean_root_number < 1


def test_parallel_scan_matches_serial():
    assert scan_legendre_fibres(6, 20, jobs=2) == scan_legendre_fibres(6, 20, jobs=1)


def test_neumann_setzer_records():
    assert neumann_setzer_record(5).status == SKIPPED
    assert neumann_setzer_record(-1).status == SKIPPED  # 65 is composite
    r = neumann_setzer_record(3)
    assert r.p == 73 and r.torsion == "Z/2"
    bs = [r.b for r in neumann_setzer_survey(30)]
    assert bs == [-17, -13, -5, 3, 7, 23]


def test_neumann_setzer_b3_has_point_of_infinite_order():
    # independent check of what the survey reports for b = 3
    W = fibre_model_neumann_setzer(3)
    P = CurvePoint(-2, 6)
    assert W.contains(P)
    assert P not in torsion_structure(W).points
    assert point_multiply(W, 2, P) == CurvePoint(Fraction(25, 9), Fraction(10, 27))
    r = neumann_setzer_record(3)
    assert r.lower == 1


def test_surface_report_flags_place_discrepancy():
    rep = surface_report()
    assert [f[0] for f in rep.fibres] == ["t", "t - 1", "infinity"]
    assert rep.euler_total == 12 and rep.discrepancy
    assert not surface_report("neumann-setzer").discrepancy


@pytest.mark.parametrize("b", [-3, 5, 13, 17])
def test_other_residue_class_has_conductor_p_and_rank_zero(b):
    from legendre_rank.descent import descent_rank_interval
    from legendre_rank.local import reduction_profile

    W = fibre_model_neumann_setzer(b)
    prof = reduction_profile(W)
    assert prof.bad_primes == (b * b + 64,) and prof.semistable
    iv = descent_rank_interval(W, 50)
    assert (iv.lower, iv.upper) == (0, 0)
