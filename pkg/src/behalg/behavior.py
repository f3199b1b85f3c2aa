"""Behaviors: complexity identification, membership, synthesis, conversions.

A behavior is a shift-invariant set of q-variate trajectories.  It can be
handed to us three ways: as the kernel of a matrix polynomial in the shift, as
the image of one, or as a single long trajectory.  Everything here reduces
questions about the set to ranks of structured matrices built from whichever
representation is on hand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlgorithmFailureError,
    InconsistentDataError,
    InvalidInputError,
    InvalidRepresentationError,
    NumericFailureError,
    UncontrollableError,
)
from .numkernel import (
    DEFAULT_CONFIG,
    ToleranceConfig,
    column_space_basis,
    numerical_rank,
    right_null_basis,
    subspace_distance,
)
from .polyalg import (
    MatPoly,
    canonical_rows,
    degreewise_minimal_basis,
    is_left_prime,
    matpoly_multiply,
    minimal_right_null_basis,
)
from .structmat import (
    Trajectory,
    block_hankel,
    block_toeplitz,
    convolution_matrix,
    per_row_toeplitz,
)

# Evaluation points for generic-rank decisions about matrix polynomials.
_PROBE_POINTS = (0.3719, -0.8241, 1.1774, -1.4303)


@dataclass(frozen=True)
class Complexity:
    """Integer invariants (q, m, n, p, lag) of an LTI behavior.

    q counts variables, m inputs, p outputs, n the order (dimension of the
    state / initial-condition space), lag the longest memory of a minimal
    kernel representation.
    """

    q: int
    m: int
    n: int
    p: int
    lag: int

    def __post_init__(self):
        for name in ("q", "m", "n", "p", "lag"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise InvalidInputError(f"{name} must be a nonnegative integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.q < 1:
            raise InvalidInputError("q must be at least 1")
        if self.m + self.p != self.q:
            raise InvalidInputError(
                f"inputs plus outputs must equal variables: {self.m}+{self.p} != {self.q}"
            )
        if self.p == 0 and (self.n != 0 or self.lag != 0):
            raise InvalidInputError("a system with no outputs has order 0 and lag 0")
        if self.p > 0:
            low = -(-self.n // self.p)  # ceil(n/p)
            if not (low <= self.lag <= max(self.n, 0)):
                raise InvalidInputError(
                    f"lag {self.lag} outside [{low}, {self.n}] for n={self.n}, p={self.p}"
                )


def restricted_dimension(c: Complexity, L: int) -> int:
    """Dimension n + L*m of the behavior cut to windows of length L >= lag."""
    if L < c.lag:
        raise InvalidInputError(f"window {L} below lag {c.lag}; formula not applicable")
    return c.n + L * c.m


def complexity_from_trajectory(w: Trajectory, cfg: ToleranceConfig = DEFAULT_CONFIG) -> Complexity:
    """Identify (q, m, n, p, lag) from one exact trajectory.

    Uses the two Hankel ranks at depths L and L-1 with L = (T+1) div (q+1),
    solves the resulting 2x2 linear system for (m, n) and rounds.  The data
    must come from an exact LTI system that the window can resolve; anything
    else trips the integrality or range checks.
    """
    r1, r2, L = _hankel_rank_pair(w, cfg)
    q = w.q
    A = np.array([[L, 1.0], [L - 1.0, 1.0]])
    mn = np.linalg.solve(A, np.array([float(r1), float(r2)]))
    rounded = np.round(mn)
    if np.max(np.abs(mn - rounded)) > 0.25:
        raise InconsistentDataError(
            "trajectory inconsistent with exact LTI model (non-integer complexity)"
        )
    m, n = int(rounded[0]), int(rounded[1])
    p = q - m
    if not (0 <= m <= q) or n < 0 or (p == 0 and n > 0):
        raise InconsistentDataError(
            f"trajectory inconsistent with exact LTI model (m={m}, n={n}, q={q})"
        )
    lag = -(-n // p) if p > 0 else 0
    if p > 0 and lag > L - 1:
        raise InconsistentDataError(
            f"trajectory too short to certify order {n} with {p} outputs"
        )
    return Complexity(q=q, m=m, n=n, p=p, lag=lag)


def _hankel_rank_pair(w: Trajectory, cfg: ToleranceConfig) -> tuple[int, int, int]:
    """Ranks of the depth-L and depth-(L-1) Hankel matrices, L = (T+1) div (q+1)."""
    T, q = w.length, w.q
    L = (T + 1) // (q + 1)
    if L < 2:
        raise InconsistentDataError(
            f"trajectory too short: need T >= {2 * (q + 1)} samples for q={q}, got {T}"
        )
    r1 = numerical_rank(block_hankel(w, L), cfg)
    r2 = numerical_rank(block_hankel(w, L - 1), cfg)
    return r1, r2, L


def is_persistently_exciting(u: Trajectory, order: int, cfg: ToleranceConfig = DEFAULT_CONFIG) -> bool:
    """Full-row-rank test of the depth-``order`` Hankel matrix of ``u``."""
    if order < 1 or order > u.length:
        raise InvalidInputError(f"order {order} outside [1, {u.length}]")
    H = block_hankel(u, order)
    return numerical_rank(H, cfg) == H.shape[0]


# -- window bases ------------------------------------------------------------

def _kernel_window_basis(R: MatPoly, L: int, cfg: ToleranceConfig) -> np.ndarray:
    """Orthonormal basis of the length-L windows of trajectories killed by R.

    Works for any R, minimal or not.  Satisfying every row at every shift of
    the window itself is not enough when R is redundant or has unbalanced row
    degrees: spurious windows survive near the edges where high-degree rows
    run out of shifts.  So the constraints are imposed on an extended window
    with a margin of the total row degree on both sides, and the middle block
    is projected out; the margin exceeds the stabilization depth of any
    Sylvester-type combination of the rows, making the projection exact.
    """
    q = R.cols
    degs = [d for d in R.row_degrees() if d >= 0]
    if not degs:
        return np.eye(q * L)
    # margins are asymmetric on purpose.  Left of the window the only
    # constraints a raw stack can miss are shift-saturated ones, whose reach
    # is bounded by the largest row degree.  Right of the window a hidden
    # combination needs room for its whole Sylvester span, bounded by the
    # total row degree.  Keeping the left margin small also keeps decaying
    # modes representable: a mode with root r retains |r|^left of its mass
    # in the slab, so a symmetric total-degree margin would push fast modes
    # below the rank tolerance and silently drop dimensions.
    left = max(degs)
    right = sum(degs)
    K = right_null_basis(per_row_toeplitz(R, L + left + right), cfg)
    if left == 0 and right == 0:
        return K
    return column_space_basis(K[q * left : q * (left + L), :], cfg)


def _image_window_basis(M: MatPoly, L: int, cfg: ToleranceConfig) -> np.ndarray:
    if M.cols == 0:
        return np.zeros((M.rows * L, 0))
    return column_space_basis(convolution_matrix(M, L), cfg)


def _data_window_basis(w: Trajectory, L: int, cfg: ToleranceConfig) -> np.ndarray:
    return column_space_basis(block_hankel(w, L), cfg)


# -- annihilator extraction --------------------------------------------------

def _annihilator_rows(window_fn, q: int, target: int | None, cap_degree: int,
                      cfg: ToleranceConfig) -> MatPoly:
    """Minimal-degree polynomial rows annihilating a window-space family.

    ``window_fn(W)`` must return an orthonormal basis of the length-W window
    space.  A degree-d annihilator is a coefficient row orthogonal to the
    length-(d+1) window space; the family is shift-invariant, so the shared
    greedy engine extracts a minimal basis.  Returns a (possibly 0-row) q-column
    matrix polynomial in canonical row form.
    """

    def space(d: int) -> np.ndarray:
        W = window_fn(d + 1)
        rows = q * (d + 1)
        if W.shape[1] == 0:
            return np.eye(rows)
        if W.shape[1] >= rows:
            return np.zeros((rows, 0))
        return right_null_basis(W.T, cfg)

    picks = degreewise_minimal_basis(space, q, target, cap_degree, cfg)
    if not picks:
        return MatPoly(np.zeros((1, 0, q)))
    ell = max(d for _, d in picks)
    C = np.zeros((ell + 1, len(picks), q))
    for i, (vec, d) in enumerate(picks):
        C[: d + 1, i, :] = vec.reshape(d + 1, q)
    return canonical_rows(MatPoly(C))


def _generic_rank(R: MatPoly, cfg: ToleranceConfig) -> int:
    if R.rows == 0 or R.cols == 0:
        return 0
    return max(numerical_rank(R.eval(x), cfg) for x in _PROBE_POINTS)


def minimize_kernel(R: MatPoly, cfg: ToleranceConfig = DEFAULT_CONFIG) -> MatPoly:
    """Minimal kernel representation of the behavior cut out by R.

    Extracts a minimal-degree basis of the annihilator space of ker R(shift);
    the result has full row rank, row count q minus the number of inputs, and
    row degrees summing to the order.  Redundant or divisible rows of R are
    discarded in the process.
    """
    q = R.cols
    if q == 0:
        raise InvalidInputError("representation must have at least one column")
    p = _generic_rank(R, cfg)
    if p == 0:
        return MatPoly(np.zeros((1, 0, q)))
    out = _annihilator_rows(
        lambda W: _kernel_window_basis(R, W, cfg), q, p, max(R.degree, 0), cfg
    )
    if out.rows != p:
        raise AlgorithmFailureError(
            f"minimization found {out.rows} annihilator rows, expected {p}"
        )
    return out


def kernel_from_data(w: Trajectory, cfg: ToleranceConfig = DEFAULT_CONFIG) -> MatPoly:
    """Identify a minimal kernel representation from one exact trajectory.

    The complexity fixes how many annihilator rows to expect; the rows are the
    minimal-degree left null vectors of the data Hankel matrices, found degree
    by degree.  Row degrees must add up to the identified order, otherwise the
    trajectory does not define a consistent behavior at this window.
    """
    c = complexity_from_trajectory(w, cfg)
    q = w.q
    if c.p == 0:
        return MatPoly(np.zeros((1, 0, q)))
    cap = min(c.n + 1, w.length - 1)
    out = _annihilator_rows(lambda W: _data_window_basis(w, W, cfg), q, c.p, cap, cfg)
    degs = out.row_degrees()
    if out.rows != c.p or sum(degs) != c.n:
        raise InconsistentDataError(
            f"annihilator extraction disagrees with identified complexity: "
            f"{out.rows} rows of degrees {degs}, expected {c.p} rows of total degree {c.n}"
        )
    return out


def random_trajectory_from_kernel(R: MatPoly, T: int, seed: int,
                                  cfg: ToleranceConfig = DEFAULT_CONFIG) -> Trajectory:
    """Seeded random element of ker R(shift) on a length-T window.

    Draws a random combination of a kernel basis of the banded operator of R,
    normalized to unit Euclidean norm; deterministic for a fixed seed.  When
    the kernel is trivial (zero behavior) the zero trajectory comes back.
    """
    q = R.cols
    if T < R.degree + 1:
        raise InvalidInputError(f"window {T} shorter than degree {R.degree} + 1")
    if R.rows == 0:
        basis = np.eye(q * T)
    else:
        basis = right_null_basis(block_toeplitz(R, T), cfg)
    if basis.shape[1] == 0:
        return Trajectory(np.zeros((T, q)))
    rng = np.random.default_rng(seed)
    v = basis @ rng.standard_normal(basis.shape[1])
    v /= np.linalg.norm(v)
    return Trajectory(v.reshape(T, q))


def data_trajectory_span(w: Trajectory, L: int, cfg: ToleranceConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Orthonormal basis of all length-L windows reachable from the data.

    Valid as a window space of the underlying behavior whenever the data is an
    exact trajectory rich enough for the rank identity at L; the identity is
    checked whenever the identified lag allows it.
    """
    c = complexity_from_trajectory(w, cfg)
    if w.q * L >= w.length - L + 1:
        raise InvalidInputError(
            f"Hankel matrix at window {L} is not wider than tall for T={w.length}"
        )
    B = _data_window_basis(w, L, cfg)
    if L >= c.lag and B.shape[1] != restricted_dimension(c, L):
        raise InconsistentDataError(
            f"window span dimension {B.shape[1]} disagrees with n + L*m = "
            f"{restricted_dimension(c, L)}"
        )
    return B


def image_to_kernel(M: MatPoly, cfg: ToleranceConfig = DEFAULT_CONFIG) -> MatPoly:
    """Minimal kernel representation of the image of M(shift).

    The rows are the minimal-degree annihilators of the window spaces spanned
    by the convolution operator of M, searched up to degree 2 deg(M) + 1.
    """
    q, mcols = M.rows, M.cols
    if _generic_rank(M, cfg) < mcols:
        raise InvalidRepresentationError("image representation lacks full generic column rank")
    p = q - mcols
    if p == 0:
        return MatPoly(np.zeros((1, 0, q)))
    out = _annihilator_rows(
        lambda W: _image_window_basis(M, W, cfg), q, p, 2 * max(M.degree, 0) + 1, cfg
    )
    if out.rows != p:
        raise AlgorithmFailureError(
            f"found {out.rows} annihilator rows for an image of {mcols} generators, expected {p}"
        )
    _check_zero_product(out, M, "kernel times image")
    return out


def _kernel_of_image_span(M: MatPoly, cfg: ToleranceConfig) -> MatPoly:
    # like image_to_kernel but tolerant of rank-deficient generator sets
    q = M.rows
    p = q - _generic_rank(M, cfg)
    if p == 0 or M.cols == 0:
        if M.cols == 0:
            return MatPoly.identity(q)
        return MatPoly(np.zeros((1, 0, q)))
    cap = max(2, q) * max(M.degree, 1) + 1
    out = _annihilator_rows(lambda W: _image_window_basis(M, W, cfg), q, p, cap, cfg)
    if out.rows != p:
        raise AlgorithmFailureError(
            f"found {out.rows} annihilator rows for a generator span of rank {q - p}"
        )
    return out


def kernel_to_image(R: MatPoly, cfg: ToleranceConfig = DEFAULT_CONFIG) -> MatPoly:
    """Image representation of ker R(shift); exists only when R is left prime."""
    if not is_left_prime(R, cfg):
        raise UncontrollableError(
            "behavior is not controllable: kernel representation is not left prime"
        )
    p, q = R.rows, R.cols
    M = minimal_right_null_basis(R, cfg, target=q - p)
    _check_zero_product(R, M, "kernel times image")
    if _generic_rank(M, cfg) < M.cols:
        raise NumericFailureError("computed image generators are generically dependent")
    return M


def _check_zero_product(A: MatPoly, B: MatPoly, what: str) -> None:
    if A.rows == 0 or B.cols == 0:
        return
    prod = matpoly_multiply(A, B)
    worst = float(np.max(np.abs(prod.coeff_mats)))
    if worst > 1e-8:
        raise NumericFailureError(f"{what} deviates from zero by {worst:.3e}")


# -- the Behavior object -----------------------------------------------------

class Behavior:
    """A q-variate LTI behavior carrying one or more representations.

    Immutable; the complexity is identified at construction from the strongest
    representation available (kernel, then image, then data) and all present
    representations are cross-checked against each other on a window two past
    the lag.
    """

    __slots__ = ("q", "kernel_rep", "image_rep", "data_rep", "complexity",
                 "cfg", "_min_kernel", "_image_cache")

    def __init__(self, kernel_rep: MatPoly | None = None,
                 image_rep: MatPoly | None = None,
                 data_rep: Trajectory | None = None,
                 cfg: ToleranceConfig = DEFAULT_CONFIG):
        if kernel_rep is None and image_rep is None and data_rep is None:
            raise InvalidInputError("behavior needs at least one representation")
        qs = set()
        if kernel_rep is not None:
            qs.add(kernel_rep.cols)
        if image_rep is not None:
            qs.add(image_rep.rows)
        if data_rep is not None:
            qs.add(data_rep.q)
        if len(qs) != 1:
            raise InvalidInputError(f"representations disagree on variable count: {sorted(qs)}")
        q = qs.pop()
        if q < 1:
            raise InvalidInputError("behavior needs at least one variable")
        self.q = q
        self.kernel_rep = kernel_rep
        self.image_rep = image_rep
        self.data_rep = data_rep
        self.cfg = cfg
        self._min_kernel = None
        self._image_cache = None

        if kernel_rep is not None and kernel_rep.rows > 0:
            # independence of the rows as constant vectors; full minimality is
            # a module property and is handled by minimize_kernel
            flat = kernel_rep.coeff_mats.transpose(1, 0, 2).reshape(kernel_rep.rows, -1)
            if numerical_rank(flat, cfg) < kernel_rep.rows:
                raise InvalidRepresentationError(
                    "kernel representation rows are linearly dependent"
                )

        if kernel_rep is not None:
            self._min_kernel = minimize_kernel(kernel_rep, cfg)
            self.complexity = _complexity_of_minimal_kernel(self._min_kernel)
        elif image_rep is not None:
            self._min_kernel = _kernel_of_image_span(image_rep, cfg)
            self.complexity = _complexity_of_minimal_kernel(self._min_kernel)
        else:
            self.complexity = complexity_from_trajectory(data_rep, cfg)

        self._check_representations_agree()

    @classmethod
    def from_kernel(cls, R: MatPoly, cfg: ToleranceConfig = DEFAULT_CONFIG) -> "Behavior":
        return cls(kernel_rep=R, cfg=cfg)

    @classmethod
    def from_image(cls, M: MatPoly, cfg: ToleranceConfig = DEFAULT_CONFIG) -> "Behavior":
        return cls(image_rep=M, cfg=cfg)

    @classmethod
    def from_data(cls, w: Trajectory, cfg: ToleranceConfig = DEFAULT_CONFIG) -> "Behavior":
        return cls(data_rep=w, cfg=cfg)

    def _check_representations_agree(self) -> None:
        reps = []
        if self.kernel_rep is not None:
            reps.append(("kernel", lambda L: _kernel_window_basis(self.kernel_rep, L, self.cfg)))
        if self.image_rep is not None:
            reps.append(("image", lambda L: _image_window_basis(self.image_rep, L, self.cfg)))
        if self.data_rep is not None:
            reps.append(("data", lambda L: _data_window_basis(self.data_rep, L, self.cfg)))
        if len(reps) < 2:
            return
        L = self.complexity.lag + 2
        if self.data_rep is not None and L > self.data_rep.length:
            raise InvalidRepresentationError(
                f"data representation too short to cross-check at window {L}"
            )
        bases = [(name, fn(L)) for name, fn in reps]
        for (na, Ba), (nb, Bb) in zip(bases, bases[1:]):
            d = subspace_distance(Ba, Bb)
            if d > self.cfg.subspace_eq_tol:
                raise InvalidRepresentationError(
                    f"{na} and {nb} representations disagree at window {L} "
                    f"(subspace distance {d:.3e})"
                )

    def minimal_kernel(self) -> MatPoly:
        """Minimal kernel representation; derived and cached on first use."""
        if self._min_kernel is None:
            self._min_kernel = kernel_from_data(self.data_rep, self.cfg)
        return self._min_kernel

    def kernel_representation(self) -> MatPoly:
        """The stored kernel representation, or the derived minimal one."""
        if self.kernel_rep is not None:
            return self.kernel_rep
        return self.minimal_kernel()

    def image_representation(self) -> MatPoly:
        """The stored image representation, or one derived from the kernel.

        Raises UncontrollableError for behaviors with no image representation.
        """
        if self.image_rep is not None:
            return self.image_rep
        if self._image_cache is None:
            self._image_cache = kernel_to_image(self.minimal_kernel(), self.cfg)
        return self._image_cache

    def window_basis(self, L: int) -> np.ndarray:
        """Orthonormal basis of the restriction to length-L windows."""
        if L < 1:
            raise InvalidInputError("window length must be positive")
        if self._min_kernel is not None:
            # minimal rows carry the smallest margins, so this path is both
            # exact and the cheapest one available
            return _kernel_window_basis(self._min_kernel, L, self.cfg)
        if L <= self.data_rep.length:
            return _data_window_basis(self.data_rep, L, self.cfg)
        return _kernel_window_basis(self.minimal_kernel(), L, self.cfg)

    def to_json_dict(self, data_path: str | None = None) -> dict:
        doc = {
            "q": self.q,
            "kernel": self.kernel_rep.to_json_dict() if self.kernel_rep is not None else None,
            "image": self.image_rep.to_json_dict() if self.image_rep is not None else None,
            "data": data_path,
        }
        return doc

    @classmethod
    def from_json_dict(cls, d: dict, base_dir: str = ".",
                       cfg: ToleranceConfig = DEFAULT_CONFIG) -> "Behavior":
        import pathlib

        if not isinstance(d, dict) or "q" not in d:
            raise InvalidInputError("behavior document must be an object with a 'q' field")
        kernel = image = data = None
        if d.get("kernel") is not None:
            kernel = MatPoly.from_json_dict(d["kernel"])
        if d.get("image") is not None:
            image = MatPoly.from_json_dict(d["image"])
        if d.get("data") is not None:
            path = pathlib.Path(base_dir) / str(d["data"])
            data = Trajectory.from_csv(path)
        b = cls(kernel_rep=kernel, image_rep=image, data_rep=data, cfg=cfg)
        if b.q != int(d["q"]):
            raise InvalidInputError(
                f"declared q={d['q']} disagrees with representations (q={b.q})"
            )
        return b

    def __repr__(self) -> str:
        have = [n for n, r in (("kernel", self.kernel_rep), ("image", self.image_rep),
                               ("data", self.data_rep)) if r is not None]
        c = self.complexity
        return f"Behavior(q={c.q}, m={c.m}, n={c.n}, reps={'+'.join(have)})"


def _complexity_of_minimal_kernel(R: MatPoly) -> Complexity:
    q = R.cols
    degs = [d for d in R.row_degrees() if d >= 0]
    p = len(degs)
    n = sum(degs)
    lag = max(degs) if degs else 0
    return Complexity(q=q, m=q - p, n=n, p=p, lag=lag)


def membership_residual(w: Trajectory, B: Behavior,
                        cfg: ToleranceConfig = DEFAULT_CONFIG) -> float:
    """Scaled residual of the banded kernel operator applied to the trajectory."""
    if w.q != B.q:
        raise InvalidInputError(f"trajectory has q={w.q}, behavior has q={B.q}")
    R = B.kernel_representation()
    if R.rows == 0:
        return 0.0
    if w.length < R.degree + 1:
        raise InvalidInputError(
            f"trajectory length {w.length} below degree {R.degree} + 1"
        )
    v = w.window(0, w.length)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return 0.0
    return float(np.linalg.norm(block_toeplitz(R, w.length) @ v) / nv)


def is_member(w: Trajectory, B: Behavior, cfg: ToleranceConfig = DEFAULT_CONFIG) -> bool:
    """Whether the trajectory lies in the behavior, up to the subspace tolerance."""
    return membership_residual(w, B, cfg) <= cfg.subspace_eq_tol


def behaviors_equal(B1: Behavior, B2: Behavior,
                    cfg: ToleranceConfig = DEFAULT_CONFIG) -> bool:
    """Set equality, certified on a window two past the larger lag."""
    if B1.q != B2.q:
        return False
    L = max(B1.complexity.lag, B2.complexity.lag) + 2
    Ba = B1.window_basis(L)
    Bb = B2.window_basis(L)
    if Ba.shape[1] != Bb.shape[1]:
        return False
    return subspace_distance(Ba, Bb) <= cfg.subspace_eq_tol
