"""Sum and intersection of behaviors, kernel-side and image-side.

The two operations come in dual pairs.  Union of generators (sum, image side)
and union of annihilators (intersection, kernel side) are concatenations plus
cleanup.  The hard directions, sum on the kernel side and intersection on the
image side, both search for matching polynomial multipliers: common left
multiples of annihilator rows, or common right multiples of generator columns.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .behavior import Behavior, Complexity, behaviors_equal
from .errors import (
    AlgorithmFailureError,
    InconsistentComplexityError,
    InvalidInputError,
    NumericFailureError,
    UncontrollableError,
)
from .numkernel import DEFAULT_CONFIG, ToleranceConfig, left_null_basis, numerical_rank
from .polyalg import (
    MatPoly,
    Poly,
    canonical_cols,
    matpoly_det,
    matpoly_hstack,
    matpoly_multiply,
    matpoly_vstack,
    minimal_right_null_basis,
    poly_gcd,
    poly_lcm,
    poly_multiply,
    poly_roots,
)
from .structmat import block_toeplitz, sylvester_stack
from .behavior import minimize_kernel

METHOD_GENERATOR_UNION = "generator-union"
METHOD_ANNIHILATOR_UNION = "annihilator-union"
METHOD_ANNIHILATOR_INTERSECTION = "annihilator-intersection"
METHOD_GENERATOR_INTERSECTION = "generator-intersection"


@dataclass
class OpResult:
    """Outcome of a behavior operation.

    ``chosen_L`` is the window or degree bound at which the defining search
    stopped, when the method involves one; diagnostics carry the kernel
    dimensions and bookkeeping encountered along the way.
    """

    behavior: Behavior
    method: str
    chosen_L: int | None = None
    diagnostics: dict = field(default_factory=dict)


def _require_same_q(A: Behavior, B: Behavior) -> int:
    if A.q != B.q:
        raise InvalidInputError(f"operands have different variable counts: {A.q} vs {B.q}")
    return A.q


def _sum_dims(A: Behavior, B: Behavior, cfg: ToleranceConfig) -> tuple[int, int, int, dict]:
    """(m, n, p) of A + B from ranks of concatenated window bases.

    The window pair sits above any possible lag of the sum (bounded by
    n_A + n_B), so the two dimensions pin down the complexity exactly.
    """
    q = A.q
    L = A.complexity.n + B.complexity.n + 2
    d_hi = numerical_rank(np.column_stack([A.window_basis(L), B.window_basis(L)]), cfg) \
        if (A.window_basis(L).shape[1] + B.window_basis(L).shape[1]) else 0
    lo = np.column_stack([A.window_basis(L - 1), B.window_basis(L - 1)])
    d_lo = numerical_rank(lo, cfg) if lo.shape[1] else 0
    m_plus = d_hi - d_lo
    n_plus = d_hi - L * m_plus
    p_plus = q - m_plus
    if not (0 <= m_plus <= q) or n_plus < 0 or (p_plus == 0 and n_plus > 0):
        raise NumericFailureError(
            f"window dimensions {d_lo}, {d_hi} at L={L - 1},{L} give no valid complexity"
        )
    info = {"sum_dim_window": L, "sum_dims": (d_lo, d_hi),
            "m_plus": m_plus, "n_plus": n_plus, "p_plus": p_plus}
    return m_plus, n_plus, p_plus, info


def _image_rep_or_raise(X: Behavior, which: str) -> MatPoly:
    try:
        return X.image_representation()
    except UncontrollableError as exc:
        raise UncontrollableError(f"{which} operand is not controllable: {exc}") from exc


def sum_image(A: Behavior, B: Behavior, cfg: ToleranceConfig = DEFAULT_CONFIG) -> OpResult:
    """Sum as the union of generators: image rep [P_a  P_b], uncompressed."""
    _require_same_q(A, B)
    Pa = _image_rep_or_raise(A, "first")
    Pb = _image_rep_or_raise(B, "second")
    out = Behavior.from_image(matpoly_hstack(Pa, Pb), cfg)
    diag = {"generator_columns": Pa.cols + Pb.cols}
    return OpResult(out, METHOD_GENERATOR_UNION, None, diag)


def intersect_kernel(A: Behavior, B: Behavior, cfg: ToleranceConfig = DEFAULT_CONFIG) -> OpResult:
    """Intersection as the union of annihilators: stack rows, then minimize."""
    _require_same_q(A, B)
    Ra = A.kernel_representation()
    Rb = B.kernel_representation()
    stacked = matpoly_vstack(Ra, Rb)
    Rmin = minimize_kernel(stacked, cfg)
    out = Behavior.from_kernel(Rmin, cfg)
    diag = {"stacked_rows": stacked.rows, "minimal_rows": Rmin.rows}
    return OpResult(out, METHOD_ANNIHILATOR_UNION, None, diag)


def sum_kernel(A: Behavior, B: Behavior, cfg: ToleranceConfig = DEFAULT_CONFIG) -> OpResult:
    """Sum as the intersection of annihilators.

    Rows of the result are common left multiples z_a R_a = z_b R_b, found as
    the left kernel of the stacked banded operators; the window L grows until
    enough independent multiples exist.  Output rows are the Z_a-side products,
    cross-checked against the Z_b side and minimized.
    """
    q = _require_same_q(A, B)
    Ra = A.kernel_representation()
    Rb = B.kernel_representation()
    m_plus, n_plus, p_plus, diag = _sum_dims(A, B, cfg)

    if p_plus == 0:
        g = _minor_gcd(matpoly_vstack(Ra, Rb), cfg)
        if not g.is_zero and g.degree >= 1:
            # sum is reported trivial, yet the annihilators share dynamics;
            # flag it instead of failing
            diag["common_factor"] = g.coeffs.tolist()
        out = Behavior.from_kernel(MatPoly(np.zeros((1, 0, q))), cfg)
        return OpResult(out, METHOD_ANNIHILATOR_INTERSECTION, None, diag)

    L0 = max(Ra.degree, Rb.degree) + 1
    Lcap = 2 * (Ra.degree + Rb.degree) + 4
    dims = []
    for L in range(L0, Lcap + 1):
        Z = left_null_basis(sylvester_stack(Ra, Rb, L), cfg)
        dims.append((L, Z.shape[0]))
        # the window count alone is not a stopping rule: shifts of one
        # low-degree common row can reach p_plus before the high-degree
        # multiples fit, so accept only once the minimized result has the
        # predicted complexity
        if Z.shape[0] < p_plus:
            continue
        ka = Ra.rows * (L - Ra.degree)
        Za, Zb = Z[:, :ka], Z[:, ka:]
        rows_a = Za @ block_toeplitz(Ra, L)
        rows_b = Zb @ block_toeplitz(Rb, L)
        mismatch = float(np.max(np.abs(rows_a - rows_b)))
        if mismatch > 1e-8 * max(1.0, float(np.max(np.abs(rows_a)))):
            raise NumericFailureError(
                f"two-sided annihilator products disagree by {mismatch:.3e} at window {L}"
            )
        # row r of rows_a holds ascending coefficient blocks of one result row
        C = rows_a.reshape(Z.shape[0], L, q).transpose(1, 0, 2)
        Rplus = minimize_kernel(MatPoly(C), cfg)
        out = Behavior.from_kernel(Rplus, cfg)
        c = out.complexity
        if c.m == m_plus and c.n == n_plus:
            diag["left_kernel_dims"] = dims
            diag["complexity_agrees"] = True
            return OpResult(out, METHOD_ANNIHILATOR_INTERSECTION, L, diag)
    diag["left_kernel_dims"] = dims
    raise AlgorithmFailureError(
        f"no window up to {Lcap} produced a sum annihilator set of complexity "
        f"(m={m_plus}, n={n_plus}); left kernel dimensions {dims}"
    )


def intersect_image(A: Behavior, B: Behavior, cfg: ToleranceConfig = DEFAULT_CONFIG) -> OpResult:
    """Intersection as the intersection of generator spans (dual search).

    Columns of the result are common right multiples P_a v_a = P_b v_b; the
    pairs (v_a; v_b) form the minimal right null basis of [P_a  -P_b].  Only
    the controllable part of the intersection is representable this way; any
    autonomous remainder is reported in the diagnostics, not returned.
    """
    q = _require_same_q(A, B)
    Pa = _image_rep_or_raise(A, "first")
    Pb = _image_rep_or_raise(B, "second")
    m_plus, n_plus, p_plus, diag = _sum_dims(A, B, cfg)
    m_cap = A.complexity.m + B.complexity.m - m_plus
    n_cap = A.complexity.n + B.complexity.n - n_plus
    if m_cap < 0 or n_cap < 0:
        raise InconsistentComplexityError(
            f"bookkeeping gives negative intersection complexity ({m_cap}, {n_cap})"
        )
    diag.update({"m_intersection": m_cap, "n_intersection": n_cap})

    if m_cap == 0:
        if n_cap > 0:
            diag["controllable_part_only"] = True
        out = Behavior.from_image(MatPoly(np.zeros((1, q, 0))), cfg)
        return OpResult(out, METHOD_GENERATOR_INTERSECTION, None, diag)

    N = matpoly_hstack(Pa, -Pb)
    cap = 2 * (Pa.degree + Pb.degree) + 4
    V = minimal_right_null_basis(N, cfg, target=m_cap, cap_degree=cap)
    Va = V.rows_slice(0, Pa.cols)
    Vb = V.rows_slice(Pa.cols, Pa.cols + Pb.cols)
    prod_a = matpoly_multiply(Pa, Va)
    prod_b = matpoly_multiply(Pb, Vb)
    ell = max(prod_a.degree, prod_b.degree)
    Ca = np.zeros((ell + 1, q, m_cap))
    Cb = np.zeros_like(Ca)
    Ca[: prod_a.degree + 1] = prod_a.coeff_mats
    Cb[: prod_b.degree + 1] = prod_b.coeff_mats
    mismatch = float(np.max(np.abs(Ca - Cb))) if Ca.size else 0.0
    if mismatch > 1e-8 * max(1.0, float(np.max(np.abs(Ca))) if Ca.size else 1.0):
        raise NumericFailureError(
            f"two-sided generator products disagree by {mismatch:.3e}"
        )
    Pint = canonical_cols(prod_a)
    out = Behavior.from_image(Pint, cfg)
    if out.complexity.n != n_cap:
        diag["controllable_part_only"] = True
    return OpResult(out, METHOD_GENERATOR_INTERSECTION, V.degree + 1, diag)


def operation_complexities(cA: Complexity, cB: Complexity, cCap: Complexity) -> Complexity:
    """Complexity of the sum from the operands and their intersection."""
    if not (cA.q == cB.q == cCap.q):
        raise InvalidInputError("complexities refer to different variable counts")
    q = cA.q
    m_plus = cA.m + cB.m - cCap.m
    n_plus = cA.n + cB.n - cCap.n
    p_plus = q - m_plus
    if m_plus < 0 or n_plus < 0 or p_plus < 0 or (p_plus == 0 and n_plus > 0):
        raise InconsistentComplexityError(
            f"sum bookkeeping out of range: m={m_plus}, n={n_plus}, p={p_plus}"
        )
    lag = -(-n_plus // p_plus) if p_plus > 0 else 0
    return Complexity(q=q, m=m_plus, n=n_plus, p=p_plus, lag=lag)


def scalar_autonomous_sum(Ra: Poly, Rb: Poly, cfg: ToleranceConfig = DEFAULT_CONFIG) -> Poly:
    """Sum of two scalar autonomous behaviors: the monic least common multiple."""
    return poly_lcm(Ra, Rb, cfg)


def scalar_autonomous_intersection(Ra: Poly, Rb: Poly,
                                   cfg: ToleranceConfig = DEFAULT_CONFIG) -> Poly:
    """Intersection of two scalar autonomous behaviors: the monic gcd."""
    return poly_gcd(Ra, Rb, cfg)


def oracle_sum_siso_autonomous(qa: Poly, pa: Poly, pb: Poly) -> MatPoly:
    """Closed-form kernel row p_b * [q_a  -p_a] for a SISO plus autonomous sum.

    The common factor p_b makes the result uncontrollable whenever it has
    positive degree.
    """
    if pa.is_zero or pb.is_zero:
        raise InvalidInputError("denominator polynomials must be nonzero")
    left = Poly([0.0]) if qa.is_zero else poly_multiply(pb, qa)
    right = poly_multiply(pb, pa)
    return MatPoly.from_entries([[left, Poly(-right.coeffs)]])


def oracle_intersect_siso_autonomous(pa: Poly, pb: Poly,
                                     cfg: ToleranceConfig = DEFAULT_CONFIG) -> MatPoly:
    """Closed-form kernel diag(1, gcd(p_a, p_b)) for a SISO and autonomous pair."""
    if pa.is_zero or pb.is_zero:
        raise InvalidInputError("denominator polynomials must be nonzero")
    g = poly_gcd(pa, pb, cfg)
    return MatPoly.from_entries([[Poly([1.0]), Poly([0.0])], [Poly([0.0]), g]])


def _minor_gcd(R: MatPoly, cfg: ToleranceConfig) -> Poly:
    """Monic gcd of the maximal-order minors; zero poly if all minors vanish."""
    k = min(R.rows, R.cols)
    if k == 0:
        return Poly([1.0])
    g: Poly | None = None
    for rows in itertools.combinations(range(R.rows), k):
        for cols in itertools.combinations(range(R.cols), k):
            sub = MatPoly(R.coeff_mats[:, rows, :][:, :, cols])
            minor = matpoly_det(sub)
            if minor.is_zero:
                continue
            g = minor if g is None else poly_gcd(g, minor, cfg)
            if g.degree == 0:
                return Poly([1.0])
    if g is None:
        return Poly([0.0])
    return g.monic()


def representation_poles(R: MatPoly, cfg: ToleranceConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Poles pinned by a kernel representation: roots of its maximal-minor gcd.

    For a square (autonomous) representation this is every pole; for a wide
    one it is the uncontrollable part, empty when the behavior is controllable.
    """
    if R.rows == 0:
        return np.zeros(0, dtype=complex)
    g = _minor_gcd(R, cfg)
    if g.is_zero or g.degree < 1:
        return np.zeros(0, dtype=complex)
    return np.sort_complex(poly_roots(g))
