"""Schur-complement conjugate gradients for ``[A B^T; B 0] [u; L] = [f; G]``.

Dirichlet dofs are eliminated symmetrically; the multiplier system
``B A^-1 B^T L = B A^-1 f - G`` is solved with CG, each product reusing one
sparse factorization of the constrained stiffness matrix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import qdldl
import scipy.sparse as sp

from .errors import ConvergenceError, DefinitenessError, RankError
from .fem import FeSpace

log = logging.getLogger(__name__)


class PrimalFactorization:
    """Sparse ``L D L^T`` factorization (AMD ordering) of an SPD matrix.

    The pivots ``D`` are checked: a non-positive or vanishing pivot means
    ``A`` is not definite, typically because Dirichlet data are missing.
    """

    def __init__(self, A, pivot_tol: float = 1e-12):
        A = sp.csc_matrix(A)
        n = A.shape[0]
        self.shape = A.shape
        if n == 0:
            self._ldl = None
            self.nnz = 0
            return
        scale = float(np.abs(A.diagonal()).max()) if A.nnz else 0.0
        if scale <= 0:
            raise DefinitenessError("stiffness matrix has an empty diagonal")
        try:
            ldl = qdldl.Solver(sp.triu(A, format="csc"))
        except RuntimeError as exc:
            raise DefinitenessError(f"factorization failed ({exc}); is the problem constrained?") from exc
        L, d, _ = ldl.factors()
        if d.min() <= pivot_tol * scale:
            raise DefinitenessError(f"non-positive pivot {d.min():.3e} (scale {scale:.3e}); missing Dirichlet constraints?")
        self._ldl = ldl
        self.nnz = int(L.nnz + n)

    def solve(self, b: np.ndarray) -> np.ndarray:
        if self._ldl is None:
            return np.zeros_like(b)
        return self._ldl.solve(np.ascontiguousarray(b, dtype=float))


def factor_primal(A) -> PrimalFactorization:
    return PrimalFactorization(A)


@dataclass(frozen=True, eq=False)
class SaddleSystem:
    """Full (unconstrained) blocks plus the constrained space.

    ``A`` is ``n x n``, ``B`` is ``k x n``; Dirichlet data live in ``space``.
    """

    space: FeSpace
    A: sp.csr_matrix
    B: sp.csr_matrix
    f: np.ndarray
    G: np.ndarray

    @property
    def n_multipliers(self) -> int:
        return self.B.shape[0]

    def reduced(self):
        """Blocks on free dofs with the Dirichlet lifting moved to the right-hand sides."""
        free = self.space.free
        lift = self.space.lifting()
        A_ff = self.A[free][:, free].tocsc()
        B_f = self.B[:, free].tocsr()
        f_f = self.f[free] - (self.A @ lift)[free]
        g = self.G - self.B @ lift
        return A_ff, B_f, f_f, g


@dataclass
class SolveReport:
    outer_iters: int = 0
    schur_res: float = 0.0
    primal_res: float = 0.0
    factor_nnz: int = 0
    history: list = field(default_factory=list, repr=False)

    CSV_HEADER = "outer_iters,schur_res,primal_res,factor_nnz"

    def csv_row(self) -> str:
        return f"{self.outer_iters},{self.schur_res:.17g},{self.primal_res:.17g},{self.factor_nnz}"


def verify_residuals(system: SaddleSystem, u: np.ndarray, lam: np.ndarray, report: SolveReport | None = None):
    """Recompute ``||B u - G||`` and ``||A u + B^T L - f||`` (free dofs) from the solution."""
    report = report or SolveReport()
    free = system.space.free
    lam = np.asarray(lam, dtype=float).reshape(-1)
    report.schur_res = float(np.linalg.norm(system.B @ u - system.G)) if len(lam) else 0.0
    r = system.A @ u - system.f
    if len(lam):
        r = r + system.B.T @ lam
    report.primal_res = float(np.linalg.norm(r[free]))
    return report


def solve_saddle(
    system: SaddleSystem,
    tol: float = 1e-10,
    max_iter: int = 500,
    factor: PrimalFactorization | None = None,
    x0: np.ndarray | None = None,
):
    """Solve the saddle system; returns ``(u, multipliers, report)``.

    Stops when ``||B u - G|| <= tol * max(1, ||G||)``.  ``factor`` may be a
    factorization of the constrained stiffness from a previous call with the
    same mesh, material and constrained dofs.
    """
    A_ff, B_f, f_f, g = system.reduced()
    if factor is None:
        factor = factor_primal(A_ff)
    k = system.n_multipliers
    space = system.space
    report = SolveReport(factor_nnz=factor.nnz)
    threshold = tol * max(1.0, float(np.linalg.norm(system.G)))

    def primal(lam):
        rhs = f_f - B_f.T @ lam if k else f_f
        u = space.lifting()
        u[space.free] = factor.solve(rhs)
        return u

    lam = np.zeros(k) if x0 is None else np.array(x0, dtype=float).reshape(k)
    if k:
        BT = B_f.T.tocsr()

        def schur(p):
            return B_f @ factor.solve(BT @ p)

        # CG residual rhs - S lam equals the constraint defect B u(lam) - g
        r = B_f @ factor.solve(f_f - BT @ lam) - g
        it = 0
        while True:
            rnorm = float(np.linalg.norm(r))
            report.history.append(rnorm)
            if rnorm <= threshold:
                break
            # plain CG from the current iterate; restarted if round-off drift is detected
            p = r.copy()
            rr = rnorm**2
            rayleigh_max = 0.0
            converged = False
            while it < max_iter:
                Sp = schur(p)
                pSp = float(p @ Sp)
                pp = float(p @ p)
                rayleigh_max = max(rayleigh_max, pSp / pp)
                if pSp <= 1e-14 * rayleigh_max * pp:
                    raise RankError(
                        "Schur complement is singular: coupling rows are dependent "
                        "(overlapping inclusions or an under-resolved mesh?)"
                    )
                alpha = rr / pSp
                lam = lam + alpha * p
                r = r - alpha * Sp
                it += 1
                rr_new = float(r @ r)
                report.history.append(np.sqrt(rr_new))
                if np.sqrt(rr_new) <= threshold:
                    converged = True
                    break
                p = r + (rr_new / rr) * p
                rr = rr_new
            r = B_f @ factor.solve(f_f - BT @ lam) - g
            if converged and float(np.linalg.norm(r)) <= threshold:
                break
            if it >= max_iter:
                report.outer_iters = it
                u = primal(lam)
                verify_residuals(system, u, lam, report)
                raise ConvergenceError(
                    f"Schur CG did not reach {threshold:.3e} in {max_iter} iterations "
                    f"(residual {np.linalg.norm(r):.3e})",
                    report,
                )
        report.outer_iters = it
    u = primal(lam)
    verify_residuals(system, u, lam, report)
    log.debug("saddle solve: %d CG iterations, residuals %.2e / %.2e", report.outer_iters, report.schur_res, report.primal_res)
    return u, lam, report


def schur_matrix(system: SaddleSystem, factor: PrimalFactorization | None = None) -> np.ndarray:
    """Dense ``B A^-1 B^T`` on free dofs (small systems and diagnostics only)."""
    A_ff, B_f, _, _ = system.reduced()
    factor = factor or factor_primal(A_ff)
    Z = np.column_stack([factor.solve(col) for col in B_f.T.toarray().T]) if system.n_multipliers else np.zeros((0, 0))
    return B_f @ Z
