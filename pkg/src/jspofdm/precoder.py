"""Joint spectral precoder: inner projection, SVD tail basis, outer projection.

The precoder ``P`` (M x N) maps N data symbols onto the M employed carriers.
Three groups of out-of-band frequencies drive the construction:

* ``omega_a`` - zero-forcing points of the inner projection,
* ``omega_o`` - optimized-region points whose leakage the SVD step minimizes,
* ``omega_b`` - zero-forcing points of the outer projection.

Only the outer null survives composition exactly; the other two goals are
traded away to keep ``P`` well conditioned.
"""

from dataclasses import dataclass, field, replace
from typing import Literal, Optional

import numpy as np

from .errors import ConditioningError, InfeasibleDesignError
from .grid import SubcarrierGrid
from .spectral import frequency_set, response_matrix

# Relative singular-value threshold for every rank decision in the package.
SINGULAR_TOL = 1e-10

Kind = Literal["jsp", "projection_only", "svd_only", "identity"]


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def nullspace_projector(C) -> np.ndarray:
    """Orthogonal projector onto the nullspace of ``C``.

    Equivalent to ``I - C^T (C C^T)^{-1} C`` for a full-row-rank ``C`` of
    shape F x M, but evaluated as ``Z^T Z`` from the nullspace rows ``Z`` of
    the full SVD of ``C``.

    Raises
    ------
    ConditioningError
        If ``C`` is numerically row-rank deficient.
    """
    C = np.atleast_2d(np.asarray(C, dtype=float))
    F, M = C.shape
    if F == 0:
        return np.eye(M)
    if F > M:
        raise ConditioningError(f"{F} constraints exceed dimension {M}", 0.0, SINGULAR_TOL)
    _, s, Vt = np.linalg.svd(C, full_matrices=True)
    ratio = s[-1] / s[0] if s[0] > 0 else 0.0
    if ratio < SINGULAR_TOL:
        raise ConditioningError("constraint matrix is rank deficient", ratio, SINGULAR_TOL)
    # Built from the nullspace basis so the rank is exactly M - F.
    Z = Vt[F:]
    Pi = Z.T @ Z
    return 0.5 * (Pi + Pi.T)


@dataclass(frozen=True)
class SvdReport:
    """Singular values of the optimized-region response after the inner projection.

    ``singular_values`` is padded with zeros to length M so that the first
    M - N entries are the discarded ones and the last N are kept.
    """

    singular_values: np.ndarray
    n_keep: int

    @property
    def discarded(self) -> np.ndarray:
        return self.singular_values[:len(self.singular_values) - self.n_keep]

    @property
    def retained(self) -> np.ndarray:
        return self.singular_values[len(self.singular_values) - self.n_keep:]

    @property
    def residual(self) -> float:
        """Frobenius norm of ``C_op @ P_o`` implied by the retained values."""
        return float(np.sqrt(np.sum(self.retained ** 2)))


def svd_tail_basis(C_op, N: int):
    """Right singular vectors of ``C_op`` belonging to its N smallest singular values.

    Returns
    -------
    P_o : np.ndarray
        M x N matrix with orthonormal columns minimizing ``||C_op P_o||_F``.
    report : SvdReport
    """
    C_op = np.atleast_2d(np.asarray(C_op, dtype=float))
    K, M = C_op.shape
    if not 1 <= N <= M:
        raise ValueError(f"N must lie in [1, {M}], got {N}")
    if K == 0:
        return np.eye(M)[:, M - N:], SvdReport(_readonly(np.zeros(M)), N)
    _, s, Vt = np.linalg.svd(C_op, full_matrices=True)
    padded = np.zeros(M)
    padded[:len(s)] = s
    return Vt[M - N:].T.copy(), SvdReport(_readonly(padded), N)


def condition_number(A) -> float:
    """Ratio of extreme singular values; ``inf`` when the smallest is below tolerance."""
    s = np.linalg.svd(np.atleast_2d(A), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        raise ValueError("condition number of a zero matrix is undefined")
    if s[-1] < SINGULAR_TOL * s[0]:
        return float("inf")
    return float(s[0] / s[-1])


def decoder_matrix(P) -> np.ndarray:
    """Left pseudo-inverse ``(P^T P)^{-1} P^T`` of a full-column-rank ``P``."""
    P = np.asarray(P, dtype=float)
    U, s, Vt = np.linalg.svd(P, full_matrices=False)
    if s.size == 0 or s[-1] < SINGULAR_TOL * s[0]:
        ratio = s[-1] / s[0] if s.size and s[0] else 0.0
        raise ConditioningError("precoder is not full column rank", ratio, SINGULAR_TOL)
    return (Vt.T / s) @ U.T


@dataclass(frozen=True, eq=False)
class Precoder:
    """A designed precoding matrix together with its decoder and provenance."""

    P: np.ndarray
    decoder: np.ndarray
    alpha: float
    grid: SubcarrierGrid
    kind: Kind
    omega_a: np.ndarray = field(default_factory=lambda: _readonly([]))
    omega_b: np.ndarray = field(default_factory=lambda: _readonly([]))
    omega_o: np.ndarray = field(default_factory=lambda: _readonly([]))
    svd: Optional[SvdReport] = None

    @classmethod
    def from_matrix(cls, P, grid: SubcarrierGrid, kind: Kind = "jsp", **freqs):
        """Wrap an existing M x N matrix (e.g. one loaded from disk)."""
        P = np.asarray(P, dtype=float)
        if P.shape != (grid.M, grid.N):
            raise ValueError(f"P must be {grid.M}x{grid.N}, got {P.shape}")
        sets = {k: frequency_set(v, grid) for k, v in freqs.items()}
        return cls(_readonly(P), _readonly(decoder_matrix(P)), condition_number(P),
                   grid, kind, **sets)

    @property
    def M(self) -> int:
        return self.P.shape[0]

    @property
    def N(self) -> int:
        return self.P.shape[1]

    def encode(self, d) -> np.ndarray:
        """Precode data vectors; the last axis of ``d`` has length N."""
        return np.asarray(d) @ self.P.T

    def decode(self, s) -> np.ndarray:
        """Apply the pseudo-inverse decoder; the last axis of ``s`` has length M."""
        return np.asarray(s) @ self.decoder.T

    def summary(self) -> dict:
        return {
            "kind": self.kind, "M": self.M, "N": self.N, "R": self.M - self.N,
            "alpha": self.alpha,
            "omega_a": self.omega_a.tolist(), "omega_b": self.omega_b.tolist(),
            "omega_o": self.omega_o.tolist(),
        }


def _finish(P, grid, kind, svd=None, **freqs):
    U, s, Vt = np.linalg.svd(P, full_matrices=False)
    if s[-1] < SINGULAR_TOL * s[0]:
        raise ConditioningError("composed precoder is not full column rank",
                                s[-1] / s[0], SINGULAR_TOL)
    decoder = (Vt.T / s) @ U.T
    # same routine as condition_number so reported alphas match it bit for bit
    return Precoder(_readonly(P), _readonly(decoder), condition_number(P), grid, kind,
                    svd=svd, **{k: _readonly(v) for k, v in freqs.items()})


def identity_precoder(grid: SubcarrierGrid) -> Precoder:
    """No precoding: data on the data carriers, zeros on the reserved ones."""
    return _finish(grid.embedding_matrix(), grid, "identity")


def _row_basis(C):
    """Orthonormal basis (rows) of the row space of a full-row-rank ``C``."""
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if C.shape[0] == 0:
        return np.zeros((0, C.shape[1]))
    _, s, Vt = np.linalg.svd(C, full_matrices=False)
    if s[-1] < SINGULAR_TOL * s[0]:
        raise ConditioningError("constraint matrix is rank deficient", s[-1] / s[0],
                                SINGULAR_TOL)
    return Vt


def _jsp_parts(grid, wa, wb, wo, Pi_a=None):
    """Orthonormal ``P_o`` and the row basis ``V_b`` with ``Pi_b = I - V_b^T V_b``."""
    if Pi_a is None:
        Pi_a = nullspace_projector(response_matrix(wa, grid))
    if wo.size:
        C_op = response_matrix(wo, grid) @ Pi_a
        s = np.linalg.svd(C_op, compute_uv=False)
        ratio = s[-1] / s[0] if s[0] > 0 else 0.0
        if ratio < SINGULAR_TOL:
            raise ConditioningError("projected optimized-region response is singular",
                                    ratio, SINGULAR_TOL)
        P_o, report = svd_tail_basis(C_op, grid.N)
    else:
        # Nothing to optimize: keep the data carriers as they are.
        P_o, report = grid.embedding_matrix(), None
    return P_o, _row_basis(response_matrix(wb, grid)), report


def _jsp_alpha(P_o, Vb) -> float:
    """Condition number of ``(I - V_b^T V_b) P_o`` without forming it.

    With orthonormal ``P_o`` the Gram matrix is ``I - W W^T`` for
    ``W = P_o^T V_b^T``, so only the singular values of ``W`` are needed.
    """
    w = np.linalg.svd(P_o.T @ Vb.T, compute_uv=False)
    ev = 1.0 - w ** 2
    if P_o.shape[1] > w.size:
        ev = np.append(ev, 1.0)
    lo, hi = ev.min(), ev.max()
    if lo <= (SINGULAR_TOL ** 2) * hi:
        return float("inf")
    return float(np.sqrt(hi / lo))


def _jsp_matrix(grid, wa, wb, wo, Pi_a=None):
    """Compose ``P = Pi_b P_o`` from validated frequency sets."""
    P_o, Vb, report = _jsp_parts(grid, wa, wb, wo, Pi_a)
    return P_o - Vb.T @ (Vb @ P_o), report


def compose_jsp(grid: SubcarrierGrid, omega_a, omega_b, omega_o=None) -> Precoder:
    """Build the three-step joint spectral precoder.

    Parameters
    ----------
    grid : SubcarrierGrid
    omega_a : array_like
        Inner zero-forcing frequencies (N_a points).
    omega_b : array_like
        Outer zero-forcing frequencies (N_b points); ``C_b @ P == 0``.
    omega_o : array_like, optional
        Optimized-region frequencies (K points). Defaults to ``omega_b``.

    Raises
    ------
    ConditioningError
        When a constraint matrix, the projected optimized-region response or
        the composed precoder is numerically rank deficient.
    """
    wa = frequency_set(omega_a, grid)
    wb = frequency_set(omega_b, grid)
    wo = wb if omega_o is None else frequency_set(omega_o, grid)
    P, report = _jsp_matrix(grid, wa, wb, wo)
    return _finish(P, grid, "jsp", report, omega_a=wa, omega_b=wb, omega_o=wo)


def baseline_precoder(kind: Literal["projection_only", "svd_only"],
                      grid: SubcarrierGrid, freqs) -> Precoder:
    """Single-step reference precoders.

    ``projection_only`` projects the embedded data vector onto the nullspace
    of the envelope response at ``freqs``. ``svd_only`` keeps the N right
    singular vectors of that response with the smallest singular values.
    """
    fs = frequency_set(freqs, grid)
    C = response_matrix(fs, grid)
    if kind == "projection_only":
        P = nullspace_projector(C) @ grid.embedding_matrix()
        return _finish(P, grid, kind, omega_b=fs)
    if kind == "svd_only":
        P, report = svd_tail_basis(C, grid.N)
        return _finish(P, grid, kind, report, omega_o=fs)
    raise ValueError(f"unknown baseline kind {kind!r}")


def normalize_power(pre: Precoder) -> Precoder:
    """Rescale ``P`` to unit average power per employed carrier."""
    scale = np.sqrt(pre.M / np.sum(pre.P ** 2))
    return replace(pre, P=_readonly(pre.P * scale), decoder=_readonly(pre.decoder / scale))


# ----------------------------------------------------------------------------
# Design under a condition-number constraint
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class DesignSpec:
    """Knobs of the constrained design scan.

    Case ``A`` keeps ``omega_a0`` fixed and walks ``omega_b`` away from the
    mainlobe; case ``B`` keeps ``omega_b0`` fixed and walks ``omega_a``.
    ``omega_o=None`` makes the optimized region track ``omega_b``.
    """

    alpha0: float
    omega_a0: tuple
    omega_b0: tuple
    case: Literal["A", "B"] = "A"
    side: Literal["double", "single_low", "single_high"] = "double"
    delta_omega: float = 0.25
    omega_o: Optional[tuple] = None
    max_iterations: int = 10_000
    min_spacing: float = 0.5
    max_reserved: int = 4

    @property
    def n_a(self) -> int:
        return len(self.omega_a0)

    @property
    def n_b(self) -> int:
        return len(self.omega_b0)

    @property
    def k(self) -> int:
        return self.n_b if self.omega_o is None else len(self.omega_o)

    def validate(self, grid: SubcarrierGrid) -> None:
        """Raise ``ValueError`` when the spec cannot be run on ``grid``."""
        R = grid.R
        if not self.alpha0 >= 1:
            raise ValueError(f"alpha0 must be >= 1, got {self.alpha0}")
        if self.case not in ("A", "B"):
            raise ValueError(f"case must be 'A' or 'B', got {self.case!r}")
        if not self.delta_omega > 0:
            raise ValueError("delta_omega must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if R > self.max_reserved:
            raise ValueError(f"R={R} exceeds the guard max_reserved={self.max_reserved}")
        if R >= 1 and self.n_a > R:
            raise ValueError(f"N_a={self.n_a} exceeds R={R}")
        if R == 1 and self.n_a != 1:
            raise ValueError("R=1 requires N_a=1")
        if self.n_b > R:
            raise ValueError(f"N_b={self.n_b} exceeds R={R}")
        if self.k < R:
            raise ValueError(f"K={self.k} must be at least R={R}")
        lo, hi = grid.band_edges
        for name in ("omega_a0", "omega_b0"):
            pts = np.asarray(getattr(self, name), dtype=float)
            frequency_set(pts, grid)
            if self.side == "single_high" and np.any(pts <= hi):
                raise ValueError(f"{name} must lie above the band for single_high")
            if self.side == "single_low" and np.any(pts >= lo):
                raise ValueError(f"{name} must lie below the band for single_low")
            if self.side == "double" and pts.size and not (np.any(pts < lo) and np.any(pts > hi)):
                raise ValueError(f"{name} must have points on both sides for double")


@dataclass(frozen=True)
class DesignStep:
    iteration: int
    omega_a: tuple
    omega_b: tuple
    alpha: float


@dataclass(frozen=True)
class DesignResult:
    """Outcome of :func:`design_under_constraint`.

    ``trace`` holds every evaluated iterate, including the first one that
    violated the constraint (unless the scan was truncated).
    """

    precoder: Precoder
    trace: tuple
    truncated: bool

    @property
    def iterations(self) -> int:
        return len(self.trace)


def _outward(points, grid):
    """Unit step direction moving each point away from the band centre."""
    return np.where(np.asarray(points, float) > grid.band_center, 1.0, -1.0)


def _check_spacing(points, min_spacing):
    pts = np.sort(np.asarray(points, float))
    if pts.size > 1 and np.min(np.diff(pts)) < min_spacing:
        raise ConditioningError(
            f"adjusted frequencies closer than {min_spacing}", float(np.min(np.diff(pts))),
            min_spacing)


def design_under_constraint(spec: DesignSpec, grid: SubcarrierGrid) -> DesignResult:
    """Scan the adjustable frequency group until the condition number exceeds alpha0.

    Every iteration builds the JSP factors and evaluates the condition
    number of their product; the last iterate with ``alpha <= alpha0`` is
    composed and returned.

    Raises
    ------
    InfeasibleDesignError
        The very first iterate already violates ``alpha0``.
    ConditioningError
        The adjusted group is too tightly spaced, or the first iterate is
        numerically singular.
    """
    spec.validate(grid)
    fixed = np.asarray(spec.omega_a0 if spec.case == "A" else spec.omega_b0, float)
    start = np.asarray(spec.omega_b0 if spec.case == "A" else spec.omega_a0, float)
    _check_spacing(start, spec.min_spacing)
    step = spec.delta_omega * _outward(start, grid)

    trace = []
    best = None
    fixed_set = frequency_set(fixed, grid)
    wo_fixed = None if spec.omega_o is None else frequency_set(spec.omega_o, grid)
    # The inner projector only changes when omega_a moves.
    Pi_a = nullspace_projector(response_matrix(fixed_set, grid)) if spec.case == "A" else None
    for i in range(spec.max_iterations):
        moving = frequency_set(start + i * step, grid)
        wa, wb = (fixed_set, moving) if spec.case == "A" else (moving, fixed_set)
        wo = wb if wo_fixed is None else wo_fixed
        try:
            P_o, Vb, _ = _jsp_parts(grid, wa, wb, wo, Pi_a)
            alpha = _jsp_alpha(P_o, Vb)
        except ConditioningError:
            if best is None:
                raise
            alpha = float("inf")
        trace.append(DesignStep(i + 1, tuple(wa.tolist()), tuple(wb.tolist()), alpha))
        if alpha > spec.alpha0:
            if best is None:
                raise InfeasibleDesignError(alpha, spec.alpha0)
            return DesignResult(compose_jsp(grid, *best, spec.omega_o), tuple(trace),
                                truncated=False)
        best = (wa, wb)
    return DesignResult(compose_jsp(grid, *best, spec.omega_o), tuple(trace), truncated=True)
