import numpy as np
import pytest

from behalg import (
    Behavior,
    Complexity,
    DEFAULT_CONFIG,
    InconsistentDataError,
    InvalidInputError,
    InvalidRepresentationError,
    MatPoly,
    Trajectory,
    UncontrollableError,
    behaviors_equal,
    complexity_from_trajectory,
    image_to_kernel,
    is_member,
    is_persistently_exciting,
    kernel_from_data,
    kernel_to_image,
    membership_residual,
    minimize_kernel,
    random_trajectory_from_kernel,
    restricted_dimension,
)

from systems import (
    embedded_autonomous,
    poly_from_roots,
    random_io_trajectory,
    scalar_behavior,
    siso_behavior,
)

R51A = poly_from_roots([-1.1, 0.1, 1.0])   # z^3 - 1.11 z + 0.11, ascending
R51B = poly_from_roots([-0.5, -0.2, 1.0])  # z^3 - 0.3 z^2 - 0.6 z - 0.1


# -- complexity --------------------------------------------------------------

def test_complexity_validation():
    Complexity(q=2, m=1, n=3, p=1, lag=3)
    with pytest.raises(InvalidInputError):
        Complexity(q=2, m=2, n=1, p=0, lag=0)  # p=0 forces n=0
    with pytest.raises(InvalidInputError):
        Complexity(q=2, m=1, n=2, p=1, lag=0)  # lag below ceil(n/p)
    with pytest.raises(InvalidInputError):
        Complexity(q=1, m=1, n=0, p=1, lag=0)  # m+p != q


def test_restricted_dimension():
    c = Complexity(q=2, m=1, n=2, p=1, lag=2)
    assert restricted_dimension(c, 2) == 4
    assert restricted_dimension(c, 5) == 7
    with pytest.raises(InvalidInputError):
        restricted_dimension(c, 1)


def test_complexity_from_trajectory_autonomous():
    w = random_trajectory_from_kernel(MatPoly(R51A.reshape(-1, 1, 1)), 21, seed=17)
    c = complexity_from_trajectory(w)
    assert (c.q, c.m, c.n, c.p, c.lag) == (1, 0, 3, 1, 3)


def test_complexity_from_trajectory_io():
    rng = np.random.default_rng(30)
    w = random_io_trajectory(rng, m=1, p=1, n=2, T=30)
    c = complexity_from_trajectory(w)
    assert (c.m, c.n, c.p) == (1, 2, 1)


def test_complexity_short_data_and_noise():
    with pytest.raises(InconsistentDataError):
        complexity_from_trajectory(Trajectory(np.ones((2, 1))))
    # white noise saturates both Hankel ranks and is identified as the
    # unconstrained behavior, the only exact model containing it
    rng = np.random.default_rng(31)
    c = complexity_from_trajectory(Trajectory(rng.standard_normal((40, 1))))
    assert (c.m, c.n, c.p) == (1, 0, 0)


def test_persistency_of_excitation():
    rng = np.random.default_rng(32)
    u = Trajectory(rng.standard_normal((40, 1)))
    assert is_persistently_exciting(u, 8)
    const = Trajectory(np.ones((40, 1)))
    assert is_persistently_exciting(const, 1)
    assert not is_persistently_exciting(const, 2)


# -- minimization ------------------------------------------------------------

def test_minimize_kernel_redundant_shift():
    # [r; s*r] generates the same module closure as r
    r = R51A
    C = np.zeros((5, 2, 1))
    C[:4, 0, 0] = r
    C[1:5, 1, 0] = r
    Rmin = minimize_kernel(MatPoly(C))
    assert Rmin.rows == 1
    got = Rmin.coeff_mats[:, 0, 0]
    assert np.allclose(got / got[-1], r / r[-1], atol=1e-8)


def test_minimize_kernel_stacked_pair_is_gcd():
    # the gcd survives as the only common annihilator direction
    C = np.zeros((4, 2, 1))
    C[:, 0, 0] = R51A
    C[:, 1, 0] = R51B
    Rmin = minimize_kernel(MatPoly(C))
    assert Rmin.rows == 1
    got = Rmin.coeff_mats[:, 0, 0]
    got = got[: 2] / got[1]
    assert np.allclose(got, [-1.0, 1.0], atol=1e-8)  # z - 1


def test_minimize_kernel_already_minimal():
    R = MatPoly(R51A.reshape(-1, 1, 1))
    Rmin = minimize_kernel(R)
    assert Rmin.rows == 1 and Rmin.row_degrees() == [3]


# -- identification ----------------------------------------------------------

def test_kernel_from_data_goldens():
    for coeffs, seed in ((R51A, 17), (R51B, 29)):
        w = random_trajectory_from_kernel(MatPoly(coeffs.reshape(-1, 1, 1)), 21, seed)
        R = kernel_from_data(w)
        got = R.coeff_mats[:, 0, 0]
        assert np.max(np.abs(got / got[-1] - coeffs)) < 1e-6


def test_kernel_from_data_siso():
    rng = np.random.default_rng(33)
    w = random_io_trajectory(rng, m=1, p=1, n=2, T=40)
    R = kernel_from_data(w)
    assert R.rows == 1 and R.cols == 2
    # the data must satisfy the identified kernel exactly
    B = Behavior.from_kernel(R)
    assert membership_residual(w, B) < 1e-8


def test_random_trajectory_determinism():
    R = MatPoly(R51A.reshape(-1, 1, 1))
    w1 = random_trajectory_from_kernel(R, 15, seed=5)
    w2 = random_trajectory_from_kernel(R, 15, seed=5)
    w3 = random_trajectory_from_kernel(R, 15, seed=6)
    assert np.array_equal(w1.data, w2.data)
    assert not np.array_equal(w1.data, w3.data)


# -- conversions -------------------------------------------------------------

def test_kernel_image_round_trip():
    A = siso_behavior(poly_from_roots([0.25]), poly_from_roots([0.5, -0.8]))
    M = kernel_to_image(A.minimal_kernel())
    back = image_to_kernel(M)
    assert behaviors_equal(A, Behavior.from_kernel(back))


def test_kernel_to_image_rejects_uncontrollable():
    with pytest.raises(UncontrollableError):
        kernel_to_image(MatPoly(R51A.reshape(-1, 1, 1)))
    E = embedded_autonomous(poly_from_roots([0.5]))
    with pytest.raises(UncontrollableError):
        kernel_to_image(E.minimal_kernel())


# -- Behavior class ----------------------------------------------------------

def test_behavior_eager_complexity():
    A = siso_behavior(poly_from_roots([0.25]), poly_from_roots([0.5, -0.8]))
    c = A.complexity
    assert (c.q, c.m, c.n, c.p) == (2, 1, 2, 1)
    M = A.image_representation()
    B = Behavior.from_image(M)
    assert B.complexity == c


def test_behavior_from_data():
    w = random_trajectory_from_kernel(MatPoly(R51A.reshape(-1, 1, 1)), 21, seed=17)
    B = Behavior.from_data(w)
    assert (B.complexity.m, B.complexity.n) == (0, 3)
    K = B.minimal_kernel()
    got = K.coeff_mats[:, 0, 0]
    assert np.max(np.abs(got / got[-1] - R51A)) < 1e-6


def test_behavior_rejects_dependent_rows():
    C = np.zeros((4, 2, 1))
    C[:, 0, 0] = R51A
    C[:, 1, 0] = 2.0 * R51A
    with pytest.raises(InvalidRepresentationError):
        Behavior.from_kernel(MatPoly(C))


def test_behavior_rejects_mismatched_representations():
    A = siso_behavior(poly_from_roots([0.25]), poly_from_roots([0.5, -0.8]))
    other = siso_behavior(poly_from_roots([-0.3]), poly_from_roots([0.6, 0.7]))
    with pytest.raises(InvalidRepresentationError):
        Behavior(kernel_rep=A.minimal_kernel(),
                 image_rep=other.image_representation())


def test_window_basis_dimensions():
    A = siso_behavior(poly_from_roots([0.25]), poly_from_roots([0.5, -0.8]))
    for L in (2, 3, 5, 8):
        W = A.window_basis(L)
        assert W.shape == (2 * L, 2 + L)  # n + L m


def test_window_basis_nonminimal_kernel_regression():
    # stacked representation of two scalar systems: the window space is the
    # gcd solution space, not the raw per-row null space which is larger
    C = np.zeros((4, 2, 1))
    C[:, 0, 0] = R51A
    C[:, 1, 0] = R51B
    B = Behavior.from_kernel(MatPoly(C))
    assert (B.complexity.m, B.complexity.n) == (0, 1)
    for L in (1, 2, 4, 6):
        assert B.window_basis(L).shape[1] == 1
    ones = Trajectory(np.ones((10, 1)))
    assert is_member(ones, B)


def test_behaviors_equal_across_representations():
    A = siso_behavior(poly_from_roots([0.25]), poly_from_roots([0.5, -0.8]))
    B = Behavior.from_image(A.image_representation())
    assert behaviors_equal(A, B)
    other = siso_behavior(poly_from_roots([-0.3]), poly_from_roots([0.6, 0.7]))
    assert not behaviors_equal(A, other)
    assert not behaviors_equal(A, scalar_behavior(R51A))  # q mismatch


def test_membership():
    B = scalar_behavior(R51A)
    w = random_trajectory_from_kernel(B.minimal_kernel(), 15, seed=9)
    assert is_member(w, B)
    assert membership_residual(w, B) < 1e-10
    bad = Trajectory(np.cumsum(np.ones((15, 1)), axis=0) ** 2)
    assert not is_member(bad, B)
    zero = Trajectory(np.zeros((15, 1)))
    assert is_member(zero, B)


def test_behavior_json_round_trip(tmp_path):
    A = siso_behavior(poly_from_roots([0.25]), poly_from_roots([0.5, -0.8]))
    doc = A.to_json_dict()
    back = Behavior.from_json_dict(doc)
    assert behaviors_equal(A, back)
    # data-backed document resolves the CSV next to the JSON file
    w = random_trajectory_from_kernel(scalar_behavior(R51A).minimal_kernel(), 21, 3)
    w.to_csv(tmp_path / "w.csv")
    d = Behavior.from_data(w).to_json_dict(data_path="w.csv")
    B = Behavior.from_json_dict(d, base_dir=str(tmp_path))
    assert (B.complexity.m, B.complexity.n) == (0, 3)
