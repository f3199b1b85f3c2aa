"""Scalar and matrix polynomials with numeric gcd/lcm and primeness tests.

Coefficients are stored in ascending powers of z everywhere: index k holds the
coefficient of z**k.  Matrix polynomials keep one dense coefficient matrix per
power, stacked along the first axis.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
import scipy.linalg

from .errors import (
    InvalidInputError,
    InvalidRepresentationError,
    NumericFailureError,
    AlgorithmFailureError,
)
from .numkernel import (
    DEFAULT_CONFIG,
    ToleranceConfig,
    numerical_rank,
    right_null_basis,
    sign_normalize,
)

_TRIM_TOL = DEFAULT_CONFIG.degree_trim_tol


class Poly:
    """Real polynomial in ascending powers of z.

    Trailing coefficients below ``trim_tol`` times the largest coefficient are
    dropped at construction.  The zero polynomial is stored as a single zero
    coefficient and reports degree -inf.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, trim_tol: float = _TRIM_TOL):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float))
        if c.ndim != 1 or c.size == 0:
            raise InvalidInputError("Poly needs a non-empty 1-D coefficient array")
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("Poly coefficients must be finite")
        peak = np.max(np.abs(c))
        if peak == 0.0:
            c = np.zeros(1)
        else:
            keep = np.nonzero(np.abs(c) > trim_tol * peak)[0]
            c = c[: keep[-1] + 1].copy()
        c.setflags(write=False)
        self.coeffs = c

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0.0

    @property
    def degree(self):
        """Polynomial degree; -inf for the zero polynomial."""
        if self.is_zero:
            return -math.inf
        return self.coeffs.size - 1

    def monic(self) -> "Poly":
        if self.is_zero:
            raise InvalidInputError("the zero polynomial has no monic form")
        return Poly(self.coeffs / self.coeffs[-1])

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({self.coeffs.tolist()})"


class MatPoly:
    """Matrix polynomial R(z) = R0 + R1 z + ... + Rl z**l.

    Stored as a (l+1, rows, cols) array of coefficient matrices.  Trailing
    coefficient matrices whose largest entry falls below the trim tolerance
    (relative to the overall largest entry) are dropped.  Zero rows or columns
    are allowed; they represent empty representations.
    """

    __slots__ = ("coeff_mats",)

    def __init__(self, coeff_mats, trim_tol: float = _TRIM_TOL):
        C = np.asarray(coeff_mats, dtype=float)
        if C.ndim != 3:
            raise InvalidInputError("MatPoly needs a (degree+1, rows, cols) array")
        if C.shape[0] == 0:
            raise InvalidInputError("MatPoly needs at least one coefficient matrix")
        if C.size and not np.all(np.isfinite(C)):
            raise InvalidInputError("MatPoly coefficients must be finite")
        if C.size == 0:
            C = C[:1]
        else:
            peak = np.max(np.abs(C))
            if peak == 0.0:
                C = C[:1]
            else:
                mags = np.max(np.abs(C), axis=(1, 2))
                keep = np.nonzero(mags > trim_tol * peak)[0]
                last = keep[-1] if keep.size else 0
                C = C[: last + 1]
        C = C.copy()
        C.setflags(write=False)
        self.coeff_mats = C

    @property
    def rows(self) -> int:
        return self.coeff_mats.shape[1]

    @property
    def cols(self) -> int:
        return self.coeff_mats.shape[2]

    @property
    def degree(self) -> int:
        return self.coeff_mats.shape[0] - 1

    @property
    def is_zero(self) -> bool:
        return self.coeff_mats.size == 0 or not np.any(self.coeff_mats)

    def entry(self, i: int, j: int) -> Poly:
        return Poly(self.coeff_mats[:, i, j])

    def row_degrees(self) -> list[int]:
        """Per-row degrees under the shared trim rule; -1 marks a zero row."""
        if self.rows == 0 or self.cols == 0:
            return [0] * self.rows
        peak = np.max(np.abs(self.coeff_mats))
        if peak == 0.0:
            return [-1] * self.rows
        out = []
        for i in range(self.rows):
            mags = np.max(np.abs(self.coeff_mats[:, i, :]), axis=1)
            keep = np.nonzero(mags > _TRIM_TOL * peak)[0]
            out.append(int(keep[-1]) if keep.size else -1)
        return out

    def transpose(self) -> "MatPoly":
        return MatPoly(np.transpose(self.coeff_mats, (0, 2, 1)))

    def __neg__(self) -> "MatPoly":
        return MatPoly(-self.coeff_mats)

    def rows_slice(self, i0: int, i1: int) -> "MatPoly":
        return MatPoly(self.coeff_mats[:, i0:i1, :])

    def cols_slice(self, j0: int, j1: int) -> "MatPoly":
        return MatPoly(self.coeff_mats[:, :, j0:j1])

    def eval(self, z):
        """Value R(z) at a scalar point; complex points are fine."""
        acc = np.zeros((self.rows, self.cols), dtype=np.result_type(z, float))
        power = 1.0 + 0.0 * z
        for k in range(self.degree + 1):
            acc = acc + self.coeff_mats[k] * power
            power = power * z
        return acc

    @classmethod
    def from_scalar(cls, poly: Poly) -> "MatPoly":
        return cls(poly.coeffs.reshape(-1, 1, 1))

    @classmethod
    def identity(cls, q: int) -> "MatPoly":
        return cls(np.eye(q).reshape(1, q, q))

    @classmethod
    def empty(cls, rows: int, cols: int) -> "MatPoly":
        return cls(np.zeros((1, rows, cols)))

    @classmethod
    def from_entries(cls, entries) -> "MatPoly":
        """Build from a nested list of Poly (or coefficient lists), row major."""
        grid = [[e if isinstance(e, Poly) else Poly(e) for e in row] for row in entries]
        p = len(grid)
        q = len(grid[0]) if p else 0
        if any(len(row) != q for row in grid):
            raise InvalidInputError("ragged entry grid")
        degs = [e.coeffs.size - 1 for row in grid for e in row]
        ell = max(degs) if degs else 0
        C = np.zeros((ell + 1, p, q))
        for i, row in enumerate(grid):
            for j, e in enumerate(row):
                C[: e.coeffs.size, i, j] = e.coeffs
        return cls(C)

    def to_json_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "degree": self.degree,
            "coeffs": self.coeff_mats.tolist(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "MatPoly":
        try:
            rows, cols, degree = int(d["rows"]), int(d["cols"]), int(d["degree"])
            C = np.asarray(d["coeffs"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed matrix polynomial document: {exc}") from exc
        if C.shape != (degree + 1, rows, cols):
            raise InvalidInputError(
                f"coefficient shape {C.shape} disagrees with header "
                f"({degree + 1}, {rows}, {cols})"
            )
        return cls(C)

    def __repr__(self) -> str:
        return f"MatPoly(rows={self.rows}, cols={self.cols}, degree={self.degree})"


def _require_nonzero(a: Poly, what: str) -> None:
    if a.is_zero:
        raise InvalidInputError(f"{what} must not be the zero polynomial")


def poly_add(a: Poly, b: Poly) -> Poly:
    n = max(a.coeffs.size, b.coeffs.size)
    c = np.zeros(n)
    c[: a.coeffs.size] += a.coeffs
    c[: b.coeffs.size] += b.coeffs
    return Poly(c)


def poly_multiply(a: Poly, b: Poly) -> Poly:
    _require_nonzero(a, "first factor")
    _require_nonzero(b, "second factor")
    return Poly(np.convolve(a.coeffs, b.coeffs))


def _conv_matrix(c: np.ndarray, k: int) -> np.ndarray:
    """(len(c)-1+k, k) matrix mapping a degree-(k-1) polynomial to c * it."""
    n = len(c) - 1
    M = np.zeros((n + k, k))
    for j in range(k):
        M[j : j + n + 1, j] = c
    return M


def poly_div(num: Poly, den: Poly, cfg: ToleranceConfig = DEFAULT_CONFIG) -> tuple[Poly, float]:
    """Least-squares polynomial division num / den.

    Returns (quotient, relative residual).  The residual is 0 exactly when den
    divides num; callers decide how much to tolerate.
    """
    _require_nonzero(den, "divisor")
    if num.is_zero:
        return Poly([0.0]), 0.0
    dn, dd = num.degree, den.degree
    if dn < dd:
        return Poly([0.0]), 1.0
    k = dn - dd + 1
    A = _conv_matrix(den.coeffs, k)
    x, *_ = np.linalg.lstsq(A, num.coeffs, rcond=None)
    res = np.linalg.norm(A @ x - num.coeffs) / np.linalg.norm(num.coeffs)
    return Poly(x), float(res)


def poly_gcd(a: Poly, b: Poly, cfg: ToleranceConfig = DEFAULT_CONFIG) -> Poly:
    """Monic numerical gcd via the rank deficiency of the Sylvester matrix.

    The gcd degree is read off as deg a + deg b - rank, then the cofactor pair
    is taken from the subresultant null vector and the gcd itself from a joint
    least-squares fit against both inputs.
    """
    _require_nonzero(a, "first input")
    _require_nonzero(b, "second input")
    da, db = int(a.degree), int(b.degree)
    if da == 0 or db == 0:
        return Poly([1.0])
    an = a.coeffs / np.linalg.norm(a.coeffs)
    bn = b.coeffs / np.linalg.norm(b.coeffs)
    S = np.hstack([_conv_matrix(an, db), _conv_matrix(bn, da)])
    d = da + db - numerical_rank(S, cfg)
    if d <= 0:
        return Poly([1.0])
    Sd = np.hstack([_conv_matrix(an, db - d + 1), _conv_matrix(bn, da - d + 1)])
    _, _, Vt = np.linalg.svd(Sd)
    z = Vt[-1]
    u = z[: db - d + 1]       # proportional to b / g
    v = z[db - d + 1 :]       # proportional to -a / g
    A_ls = np.vstack([_conv_matrix(u, d + 1), _conv_matrix(-v, d + 1)])
    rhs = np.concatenate([bn, an])
    g, *_ = np.linalg.lstsq(A_ls, rhs, rcond=None)
    out = Poly(g)
    if out.is_zero or out.degree != d:
        raise NumericFailureError(
            f"gcd extraction lost degree (expected {d}, got {out.degree})"
        )
    return out.monic()


def poly_lcm(a: Poly, b: Poly, cfg: ToleranceConfig = DEFAULT_CONFIG) -> Poly:
    """Monic lcm computed as a*b / gcd(a, b) by deconvolution."""
    g = poly_gcd(a, b, cfg)
    prod = poly_multiply(a, b)
    quot, res = poly_div(prod, g, cfg)
    if res > 1e-8:
        raise NumericFailureError(f"lcm deconvolution residual {res:.3e} above 1e-8")
    return quot.monic()


def poly_roots(a: Poly) -> np.ndarray:
    """Roots as eigenvalues of the companion matrix of the monic form."""
    if a.is_zero or a.degree < 1:
        raise InvalidInputError("roots are defined for degree >= 1 only")
    return np.roots(a.monic().coeffs[::-1])


def matpoly_multiply(A: MatPoly, B: MatPoly) -> MatPoly:
    """Coefficient-level block convolution of two matrix polynomials."""
    if A.cols != B.rows:
        raise InvalidInputError(f"inner dimensions disagree: {A.cols} vs {B.rows}")
    dA, dB = A.degree, B.degree
    out = np.zeros((dA + dB + 1, A.rows, B.cols))
    for i in range(dA + 1):
        for j in range(dB + 1):
            out[i + j] += A.coeff_mats[i] @ B.coeff_mats[j]
    return MatPoly(out)


def matpoly_hstack(A: MatPoly, B: MatPoly) -> MatPoly:
    if A.rows != B.rows:
        raise InvalidInputError("row counts disagree")
    ell = max(A.degree, B.degree)
    C = np.zeros((ell + 1, A.rows, A.cols + B.cols))
    C[: A.degree + 1, :, : A.cols] = A.coeff_mats
    C[: B.degree + 1, :, A.cols :] = B.coeff_mats
    return MatPoly(C)


def matpoly_vstack(A: MatPoly, B: MatPoly) -> MatPoly:
    if A.cols != B.cols:
        raise InvalidInputError("column counts disagree")
    ell = max(A.degree, B.degree)
    C = np.zeros((ell + 1, A.rows + B.rows, A.cols))
    C[: A.degree + 1, : A.rows, :] = A.coeff_mats
    C[: B.degree + 1, A.rows :, :] = B.coeff_mats
    return MatPoly(C)


def matpoly_det(R: MatPoly) -> Poly:
    """Determinant of a square matrix polynomial by cofactor expansion."""
    if R.rows != R.cols:
        raise InvalidInputError("determinant needs a square matrix polynomial")
    n = R.rows
    if n == 0:
        return Poly([1.0])
    grid = [[R.entry(i, j) for j in range(n)] for i in range(n)]
    return _det_grid(grid)


def _det_grid(grid: list[list[Poly]]) -> Poly:
    n = len(grid)
    if n == 1:
        return grid[0][0]
    acc = Poly([0.0])
    for j in range(n):
        pivot = grid[0][j]
        if pivot.is_zero:
            continue
        minor = [[row[k] for k in range(n) if k != j] for row in grid[1:]]
        term = poly_multiply(pivot, _det_grid(minor))
        if j % 2:
            term = Poly(-term.coeffs)
        acc = poly_add(acc, term)
    return acc


def canonical_rows(R: MatPoly) -> MatPoly:
    """Sign/scale-normalize each row's flattened coefficient vector."""
    if R.rows == 0 or R.cols == 0:
        return R
    C = np.array(R.coeff_mats)
    for i in range(R.rows):
        flat = sign_normalize(C[:, i, :].ravel())
        C[:, i, :] = flat.reshape(C.shape[0], R.cols)
    return MatPoly(C)


def canonical_cols(M: MatPoly) -> MatPoly:
    """Sign/scale-normalize each column's flattened coefficient vector."""
    if M.rows == 0 or M.cols == 0:
        return M
    C = np.array(M.coeff_mats)
    for j in range(M.cols):
        flat = sign_normalize(C[:, :, j].ravel())
        C[:, :, j] = flat.reshape(C.shape[0], M.rows)
    return MatPoly(C)


# -- left primeness ----------------------------------------------------------

# Fixed probe points for generic-rank evaluation; root coincidences with all of
# them have measure zero and would only make the check conservative.
_GENERIC_POINTS = (0.3719, -0.8241, 1.1774, -1.4303)


def _rank_at(R: MatPoly, lam, cfg: ToleranceConfig) -> int:
    """Rank of R(lam) for real or complex lam, through the shared rank rule."""
    if abs(lam) <= 1.0:
        V = R.eval(lam)
    else:
        # evaluate z**(-l) R(z) at lam to avoid overflow; same rank
        acc = np.zeros((R.rows, R.cols), dtype=complex)
        inv = 1.0 / lam
        power = 1.0 + 0.0j
        for k in range(R.degree, -1, -1):
            acc = acc + R.coeff_mats[k] * power
            power = power * inv
        V = acc
    if np.iscomplexobj(V) and np.max(np.abs(V.imag)) > 0:
        real = np.block([[V.real, -V.imag], [V.imag, V.real]])
        return numerical_rank(real, cfg) // 2
    return numerical_rank(np.real(V), cfg)


def _companion_pencil(C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First companion linearization (A, B) of a square matrix polynomial."""
    ell = C.shape[0] - 1
    n = C.shape[1]
    N = n * ell
    A = np.zeros((N, N))
    B = np.eye(N)
    for k in range(ell - 1):
        A[k * n : (k + 1) * n, (k + 1) * n : (k + 2) * n] = np.eye(n)
    for k in range(ell):
        A[(ell - 1) * n :, k * n : (k + 1) * n] = -C[k]
    B[(ell - 1) * n :, (ell - 1) * n :] = C[ell]
    return A, B


def is_left_prime(R: MatPoly, cfg: ToleranceConfig = DEFAULT_CONFIG) -> bool:
    """True when R(lam) keeps full row rank at every finite lam.

    Candidate points where the rank could drop are the finite eigenvalues of a
    companion linearization pencil; a wide R is first padded to square with
    constant pseudo-random rows, which for generic padding turns row-rank drops
    of R into determinant roots of the padded matrix.
    """
    p, q = R.rows, R.cols
    if p > q:
        raise InvalidRepresentationError(f"more rows than columns ({p} > {q})")
    if p == 0:
        return True
    generic = max(_rank_at(R, x, cfg) for x in _GENERIC_POINTS)
    if generic < p:
        raise InvalidRepresentationError(
            f"generically row-rank-deficient representation (rank {generic} < {p})"
        )
    if R.degree == 0:
        return True

    rng = np.random.default_rng(0x51A7E)
    for _ in range(4):
        if p == q:
            C = np.array(R.coeff_mats)
        else:
            C = np.zeros((R.degree + 1, q, q))
            C[:, :p, :] = R.coeff_mats
            C[0, p:, :] = rng.standard_normal((q - p, q))
        Acomp, Bcomp = _companion_pencil(C)
        eigs = scipy.linalg.eigvals(Acomp, Bcomp)
        if not np.any(np.isnan(eigs)):
            break
        if p == q:
            raise NumericFailureError("singular linearization pencil for a square input")
    else:
        raise NumericFailureError("could not form a regular linearization pencil")

    candidates = eigs[np.isfinite(eigs) & (np.abs(eigs) < 1e8)]
    for lam in candidates:
        if _rank_at(R, complex(lam), cfg) <= p - 1:
            return False
    return True


# -- minimal-degree polynomial bases ----------------------------------------

def poly_product_matrix(R: MatPoly, d: int) -> np.ndarray:
    """Matrix of v -> coefficients of R(z) v(z) over deg(v) <= d.

    Shape (rows * (deg R + d + 1), cols * (d + 1)); its right null space is the
    space of polynomial vectors annihilated by R.
    """
    ell, p, q = R.degree, R.rows, R.cols
    G = np.zeros((p * (ell + d + 1), q * (d + 1)))
    for k in range(ell + 1):
        for j in range(d + 1):
            G[(k + j) * p : (k + j + 1) * p, j * q : (j + 1) * q] = R.coeff_mats[k]
    return G


# Singular values of projected candidates below this are treated as "nothing
# new"; genuine new directions in exact-data problems sit many orders higher.
_NEW_DIR_TOL = 1e-7


def degreewise_minimal_basis(
    space_fn,
    blocksize: int,
    target: int | None,
    cap_degree: int,
    cfg: ToleranceConfig,
) -> list[tuple[np.ndarray, int]]:
    """Greedy minimal-degree basis of a shift-invariant polynomial vector space.

    ``space_fn(d)`` must return an orthonormal-column basis of the degree-<=d
    slice of the space, embedded in R^(blocksize*(d+1)) with coefficient blocks
    in ascending powers.  At each degree the shifts z**s of already-picked
    vectors are projected out; what remains is genuinely new and is added with
    degree d.  Returns a list of (vector, degree) pairs.
    """
    picked: list[tuple[np.ndarray, int]] = []
    for d in range(cap_degree + 1):
        V = space_fn(d)
        k = V.shape[1]
        if k == 0:
            continue
        shift_cols = []
        for vec, deg in picked:
            width = blocksize * (deg + 1)
            for s in range(d - deg + 1):
                col = np.zeros(blocksize * (d + 1))
                col[s * blocksize : s * blocksize + width] = vec
                shift_cols.append(col)
        expected = k - len(shift_cols)
        if expected <= 0:
            continue
        if shift_cols:
            Q, _ = np.linalg.qr(np.column_stack(shift_cols))
            W = V - Q @ (Q.T @ V)
        else:
            W = V
        U, s, _ = np.linalg.svd(W, full_matrices=False)
        solid = int(np.count_nonzero(s > _NEW_DIR_TOL))
        take = min(expected, solid)
        for idx in range(take):
            picked.append((U[:, idx].copy(), d))
        if target is not None and len(picked) >= target:
            break
    return picked


def minimal_right_null_basis(
    N: MatPoly,
    cfg: ToleranceConfig = DEFAULT_CONFIG,
    target: int | None = None,
    cap_degree: int | None = None,
) -> MatPoly:
    """Minimal-degree polynomial basis of {v(z) : N(z) v(z) = 0} as columns.

    Raises AlgorithmFailureError when fewer than ``target`` independent columns
    exist up to ``cap_degree``, and NumericFailureError when degree counting
    overshoots the target (which indicates inconsistent rank decisions).
    """
    qtot = N.cols
    if cap_degree is None:
        cap_degree = max(N.rows, 1) * max(N.degree, 1) + 1

    def space(d: int) -> np.ndarray:
        G = poly_product_matrix(N, d)
        if G.shape[0] == 0:
            return np.eye(qtot * (d + 1))
        return right_null_basis(G, cfg)

    picks = degreewise_minimal_basis(space, qtot, target, cap_degree, cfg)
    if target is not None:
        if len(picks) < target:
            raise AlgorithmFailureError(
                f"found {len(picks)} null directions up to degree {cap_degree}, "
                f"needed {target}"
            )
        if len(picks) > target:
            raise NumericFailureError(
                f"null-space degree counting overshot: {len(picks)} > {target}"
            )
    if not picks:
        return MatPoly.empty(qtot, 0)
    ell = max(deg for _, deg in picks)
    C = np.zeros((ell + 1, qtot, len(picks)))
    for j, (vec, deg) in enumerate(picks):
        C[: deg + 1, :, j] = vec.reshape(deg + 1, qtot)
    return canonical_cols(MatPoly(C))
