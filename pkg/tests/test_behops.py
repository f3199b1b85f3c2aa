import numpy as np
import pytest

from behalg import (
    Behavior,
    Complexity,
    InconsistentComplexityError,
    MatPoly,
    Poly,
    behaviors_equal,
    intersect_image,
    intersect_kernel,
    operation_complexities,
    oracle_intersect_siso_autonomous,
    oracle_sum_siso_autonomous,
    poly_gcd,
    representation_poles,
    scalar_autonomous_intersection,
    scalar_autonomous_sum,
    sum_image,
    sum_kernel,
)
from behalg.polyalg import poly_div

from systems import (
    embedded_autonomous,
    poly_from_roots,
    random_real_roots,
    scalar_behavior,
    siso_behavior,
)

ROOTS_A = [-1.1, 0.1, 1.0]
ROOTS_B = [-0.5, -0.2, 1.0]
R51A = poly_from_roots(ROOTS_A)
R51B = poly_from_roots(ROOTS_B)

QA, PA = poly_from_roots([0.25]), poly_from_roots([0.5, -0.8])
QB, PB = poly_from_roots([-0.3]), poly_from_roots([0.7, -0.2])


def _monic_row(R: MatPoly) -> np.ndarray:
    c = R.coeff_mats[:, 0, 0]
    return c / c[np.max(np.nonzero(np.abs(c) > 1e-9))]


def _separated_roots(rng, k):
    while True:
        r = random_real_roots(rng, k)
        if np.min(np.abs(np.subtract.outer(r, r) + np.eye(k))) > 0.05:
            return r


# -- scalar goldens ----------------------------------------------------------

def test_sum_kernel_scalar_golden():
    res = sum_kernel(scalar_behavior(R51A), scalar_behavior(R51B))
    assert res.method == "annihilator-intersection"
    assert res.chosen_L == 6
    assert res.diagnostics["left_kernel_dims"] == [(4, 0), (5, 0), (6, 1)]
    assert res.diagnostics["complexity_agrees"]
    c = res.behavior.complexity
    assert (c.m, c.n) == (0, 5)
    want = poly_from_roots(ROOTS_A[:2] + ROOTS_B)  # union of the root sets
    assert np.max(np.abs(_monic_row(res.behavior.minimal_kernel()) - want)) < 1e-8


def test_intersect_kernel_scalar_golden():
    res = intersect_kernel(scalar_behavior(R51A), scalar_behavior(R51B))
    assert res.method == "annihilator-union"
    assert res.diagnostics == {"stacked_rows": 2, "minimal_rows": 1}
    assert (res.behavior.complexity.m, res.behavior.complexity.n) == (0, 1)
    assert np.allclose(_monic_row(res.behavior.minimal_kernel()), [-1.0, 1.0],
                       atol=1e-8)


def test_scalar_poly_shortcuts_agree():
    s = scalar_autonomous_sum(Poly(R51A), Poly(R51B))
    assert behaviors_equal(scalar_behavior(s.coeffs),
                           sum_kernel(scalar_behavior(R51A),
                                      scalar_behavior(R51B)).behavior)
    g = scalar_autonomous_intersection(Poly(R51A), Poly(R51B))
    assert g.degree == 1
    assert np.allclose(g.coeffs / g.coeffs[-1], [-1.0, 1.0], atol=1e-8)


def test_planted_roots_loop():
    for seed in range(8):
        rng = np.random.default_rng(300 + seed)
        roots = _separated_roots(rng, 5)
        shared, extra_a, extra_b = roots[:1], roots[1:3], roots[3:5]
        A = scalar_behavior(poly_from_roots(np.concatenate([shared, extra_a])))
        B = scalar_behavior(poly_from_roots(np.concatenate([shared, extra_b])))
        plus = sum_kernel(A, B).behavior
        cap = intersect_kernel(A, B).behavior
        assert plus.complexity.n == 5 and cap.complexity.n == 1
        got = np.sort(representation_poles(plus.minimal_kernel()).real)
        assert np.max(np.abs(got - np.sort(roots))) < 1e-6
        got_cap = representation_poles(cap.minimal_kernel()).real
        assert np.max(np.abs(got_cap - shared)) < 1e-6


# -- duality and commutativity ----------------------------------------------

def test_sum_duality_controllable():
    A, B = siso_behavior(QA, PA), siso_behavior(QB, PB)
    via_gen = sum_image(A, B)
    via_ann = sum_kernel(A, B)
    assert via_gen.method == "generator-union"
    assert via_gen.diagnostics["generator_columns"] == 2
    assert behaviors_equal(via_gen.behavior, via_ann.behavior)


def test_commutativity():
    A, B = scalar_behavior(R51A), scalar_behavior(R51B)
    assert behaviors_equal(sum_kernel(A, B).behavior, sum_kernel(B, A).behavior)
    assert behaviors_equal(intersect_kernel(A, B).behavior,
                           intersect_kernel(B, A).behavior)


def test_idempotence_and_edges():
    A = siso_behavior(QA, PA)
    assert behaviors_equal(sum_kernel(A, A).behavior, A)
    assert behaviors_equal(intersect_kernel(A, A).behavior, A)
    # identical pair: the intersection is controllable, so the generator
    # route must reproduce it exactly, not just its controllable part
    assert behaviors_equal(intersect_image(A, A).behavior, A)
    zero = Behavior.from_kernel(MatPoly.identity(2))
    full = Behavior.from_kernel(MatPoly(np.zeros((1, 0, 2))))
    assert behaviors_equal(sum_kernel(A, zero).behavior, A)
    assert behaviors_equal(intersect_kernel(A, full).behavior, A)
    assert behaviors_equal(intersect_kernel(A, zero).behavior, zero)
    res = sum_kernel(A, full)
    assert (res.behavior.complexity.m, res.behavior.complexity.n) == (2, 0)


# -- intersection of distinct controllable pairs -----------------------------

def test_intersect_distinct_siso_pair():
    A, B = siso_behavior(QA, PA), siso_behavior(QB, PB)
    cap = intersect_kernel(A, B)
    c = cap.behavior.complexity
    # the intersection is autonomous; its order is the degree of the
    # cross-difference p_b q_a - p_a q_b, computed here independently
    diff = np.convolve(PB, QA) - np.convolve(PA, QB)
    n_true = np.max(np.nonzero(np.abs(diff) > 1e-9))
    assert (c.m, c.n) == (0, n_true)

    img = intersect_image(A, B)
    assert img.method == "generator-intersection"
    assert img.diagnostics["m_intersection"] == 0
    assert img.diagnostics["n_intersection"] == c.n + (4 - n_true)
    assert img.diagnostics["controllable_part_only"]
    ic = img.behavior.complexity
    assert (ic.m, ic.n) == (0, 0)  # controllable part of an autonomous set


# -- single-channel oracles --------------------------------------------------

def test_sum_siso_autonomous_coprime():
    pb = poly_from_roots([0.6, -0.4])  # coprime with PA
    A, E = siso_behavior(QA, PA), embedded_autonomous(pb)
    res = sum_kernel(A, E)
    oracle = oracle_sum_siso_autonomous(Poly(QA), Poly(PA), Poly(pb))
    assert behaviors_equal(res.behavior, Behavior.from_kernel(oracle))
    assert res.behavior.complexity.n == 4


def test_sum_siso_autonomous_shared_factor():
    pa = poly_from_roots([0.5, 0.3])
    pb = poly_from_roots([0.5, -0.4])
    A, E = siso_behavior(QA, pa), embedded_autonomous(pb)
    res = sum_kernel(A, E)
    assert res.behavior.complexity.n == 3  # one common root drops out
    g = poly_gcd(Poly(pa), Poly(pb))
    cofactor, rem = poly_div(Poly(pb), g)
    assert rem < 1e-10
    refined = oracle_sum_siso_autonomous(Poly(QA), Poly(pa), cofactor)
    assert behaviors_equal(res.behavior, Behavior.from_kernel(refined))


def test_intersect_siso_autonomous():
    pb = poly_from_roots([0.6, -0.4])
    A, E = siso_behavior(QA, PA), embedded_autonomous(pb)
    cap = intersect_kernel(A, E).behavior
    assert (cap.complexity.m, cap.complexity.n) == (0, 0)  # coprime: only 0

    pa = poly_from_roots([0.5, 0.3])
    pb = poly_from_roots([0.5, -0.4])
    cap = intersect_kernel(siso_behavior(QA, pa), embedded_autonomous(pb))
    oracle = oracle_intersect_siso_autonomous(Poly(pa), Poly(pb))
    assert behaviors_equal(cap.behavior, Behavior.from_kernel(oracle))
    assert cap.behavior.complexity.n == 1


# -- complexity bookkeeping --------------------------------------------------

def test_operation_complexities():
    cA = scalar_behavior(R51A).complexity
    cB = scalar_behavior(R51B).complexity
    cCap = Complexity(q=1, m=0, n=1, p=1, lag=1)
    c = operation_complexities(cA, cB, cCap)
    assert (c.q, c.m, c.n, c.p, c.lag) == (1, 0, 5, 1, 5)
    with pytest.raises(InconsistentComplexityError):
        operation_complexities(cA, cB, Complexity(q=1, m=0, n=7, p=1, lag=7))


# -- pole extraction ---------------------------------------------------------

def test_representation_poles():
    got = np.sort(representation_poles(MatPoly(R51A.reshape(-1, 1, 1))).real)
    assert np.max(np.abs(got - np.sort(ROOTS_A))) < 1e-8
    E = embedded_autonomous(poly_from_roots([0.5, -0.4]))
    got = np.sort(representation_poles(E.minimal_kernel()).real)
    assert np.max(np.abs(got - [-0.4, 0.5])) < 1e-8
    A = siso_behavior(QA, PA)  # numerator and denominator coprime: no poles
    assert representation_poles(A.minimal_kernel()).size == 0
