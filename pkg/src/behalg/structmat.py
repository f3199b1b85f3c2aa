"""Trajectories and the structured matrices built from them.

A length-T trajectory with q variables is a (T, q) array; time runs down the
rows.  All window stacking is column-major in time: a length-L window starting
at t occupies one column with w(t), w(t+1), ..., w(t+L-1) concatenated.
"""
from __future__ import annotations

import io
import pathlib

import numpy as np

from .errors import InvalidInputError
from .polyalg import MatPoly


class Trajectory:
    """Finite vector time series; immutable (T, q) float array."""

    __slots__ = ("data",)

    def __init__(self, data):
        W = np.asarray(data, dtype=float)
        if W.ndim == 1:
            W = W.reshape(-1, 1)
        if W.ndim != 2 or W.shape[0] == 0 or W.shape[1] == 0:
            raise InvalidInputError("trajectory needs a non-empty (T, q) array")
        if not np.all(np.isfinite(W)):
            raise InvalidInputError("trajectory samples must be finite")
        W = W.copy()
        W.setflags(write=False)
        self.data = W

    @property
    def length(self) -> int:
        return self.data.shape[0]

    @property
    def q(self) -> int:
        return self.data.shape[1]

    def window(self, t0: int, L: int) -> np.ndarray:
        """Samples t0 .. t0+L-1 stacked into a single vector of length q*L."""
        if t0 < 0 or L < 1 or t0 + L > self.length:
            raise InvalidInputError(
                f"window [{t0}, {t0 + L}) outside trajectory of length {self.length}"
            )
        return self.data[t0 : t0 + L].ravel()

    def to_csv(self, path) -> None:
        header = "t," + ",".join(f"w{j + 1}" for j in range(self.q))
        body = np.column_stack([np.arange(self.length), self.data])
        fmt = ["%d"] + ["%.17g"] * self.q
        np.savetxt(path, body, delimiter=",", header=header, comments="", fmt=fmt)

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        text = pathlib.Path(path).read_text()
        lines = text.strip().splitlines()
        if not lines:
            raise InvalidInputError(f"empty trajectory file: {path}")
        head = [h.strip() for h in lines[0].split(",")]
        if head[0] != "t" or any(h != f"w{j + 1}" for j, h in enumerate(head[1:])):
            raise InvalidInputError(
                f"bad trajectory header {head!r}; expected t,w1,...,wq"
            )
        q = len(head) - 1
        if q == 0:
            raise InvalidInputError("trajectory file has no variable columns")
        try:
            body = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",", ndmin=2)
        except ValueError as exc:
            raise InvalidInputError(f"unparseable trajectory body: {exc}") from exc
        if body.shape[1] != q + 1:
            raise InvalidInputError(
                f"row width {body.shape[1]} disagrees with header width {q + 1}"
            )
        t = body[:, 0]
        if not np.array_equal(t, t[0] + np.arange(len(t))):
            raise InvalidInputError("time column must ascend by 1 with no gaps")
        return cls(body[:, 1:])

    def __repr__(self) -> str:
        return f"Trajectory(length={self.length}, q={self.q})"


def block_hankel(w: Trajectory, L: int) -> np.ndarray:
    """Depth-L block Hankel matrix of a trajectory.

    Shape (q*L, T-L+1); column j holds the window starting at time j.
    """
    T, q = w.length, w.q
    if L < 1 or L > T:
        raise InvalidInputError(f"Hankel depth {L} outside [1, {T}]")
    ncols = T - L + 1
    H = np.empty((q * L, ncols))
    for j in range(ncols):
        H[:, j] = w.window(j, L)
    return H


def _check_rep(R: MatPoly, what: str) -> None:
    if R.rows == 0:
        raise InvalidInputError(f"{what} must have at least one row")
    if R.cols == 0:
        raise InvalidInputError(f"{what} must have at least one column")


def block_toeplitz(R: MatPoly, L: int) -> np.ndarray:
    """Banded multiplication operator of R on length-L windows.

    Shape (p*(L - l), q*L) for a p x q representation of degree l.  Rows are
    grouped by row of R: first all L - l shifts of row 0, then of row 1, and
    so on, each shift moving the band [R0 ... Rl] right by q columns.  Applied
    to a stacked window it evaluates every full shift of R; as a left factor
    it maps the coefficients of a row multiplier of degree < L - l to those
    of the product row.
    """
    _check_rep(R, "representation")
    ell, p, q = R.degree, R.rows, R.cols
    if L <= ell:
        raise InvalidInputError(f"window length {L} must exceed degree {ell}")
    nsh = L - ell
    Tm = np.zeros((p * nsh, q * L))
    for i in range(p):
        for t in range(nsh):
            for k in range(ell + 1):
                Tm[i * nsh + t, (t + k) * q : (t + k + 1) * q] = R.coeff_mats[k, i, :]
    return Tm


def per_row_toeplitz(R: MatPoly, L: int) -> np.ndarray:
    """Multiplication operator with each row shifted to its own degree.

    Row i of R contributes L - deg_i stacked shifts instead of the uniform
    L - max_deg, so the right kernel is exactly the window space cut out by
    all rows of R whenever L exceeds every row degree.  Zero rows contribute
    nothing.
    """
    _check_rep(R, "representation")
    q = R.cols
    degs = R.row_degrees()
    blocks = []
    for i, di in enumerate(degs):
        if di < 0:
            continue
        if L <= di:
            raise InvalidInputError(f"window length {L} must exceed row degree {di}")
        row = np.zeros((L - di, q * L))
        for t in range(L - di):
            for k in range(di + 1):
                row[t, (t + k) * q : (t + k + 1) * q] = R.coeff_mats[k, i, :]
        blocks.append(row)
    if not blocks:
        return np.zeros((0, q * L))
    return np.vstack(blocks)


def sylvester_stack(Ra: MatPoly, Rb: MatPoly, L: int) -> np.ndarray:
    """Stacked multiplication operators used to match row multipliers.

    A left null vector [za, zb] satisfies za(z) Ra(z) = zb(z) Rb(z) with both
    multiplier degrees below L minus the respective representation degree.
    """
    if Ra.cols != Rb.cols:
        raise InvalidInputError("representations act on different variable counts")
    return np.vstack([block_toeplitz(Ra, L), -block_toeplitz(Rb, L)])


def convolution_matrix(M: MatPoly, L: int) -> np.ndarray:
    """Map from latent windows to manifest windows for w = M(shift) latent.

    Shape (q*L, m*(L + l)); length-L manifest windows are images of
    length-(L + l) latent windows, so the column space spans the window
    space of the induced behavior.
    """
    _check_rep(M, "image representation")
    ell, q, m = M.degree, M.rows, M.cols
    if L < 1:
        raise InvalidInputError("window length must be positive")
    C = np.zeros((q * L, m * (L + ell)))
    for t in range(L):
        for k in range(ell + 1):
            C[t * q : (t + 1) * q, (t + k) * m : (t + k + 1) * m] = M.coeff_mats[k]
    return C
