"""Baselines and oracles: Dantzig-rule primal simplex on the equality
standard form, the bounded-variable conversion feeding it, and a brute-force
enumerator over facet bases used as ground truth in tests.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from facetlp.errors import TooLarge, UnboundedBelowVariable
from facetlp.facet import SolveAudit, SolveOutcome, Status
from facetlp.model import GeneralLP, StandardGeneralLP

ENUMERATION_CAP = 2_000_000
TOL = 1e-9


@dataclass
class StandardFormLP:
    """min c.x subject to A x = b, x >= 0, plus the projection back to the
    original coordinates (first ``original_dim`` entries, shifted)."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    original_dim: int
    shift: np.ndarray
    objective_offset: float = 0.0

    def project(self, x_std: np.ndarray) -> np.ndarray:
        return x_std[: self.original_dim] + self.shift


def to_standard_form(p: GeneralLP, big_m: float | None = None) -> StandardFormLP:
    """Rewrite a general problem as equalities over nonnegative variables.

    Inequality rows gain surplus columns. Variables are shifted down by their
    (finite) lower bound so nonnegativity encodes it exactly; a variable with
    a finite upper bound then gets the bounded-variable row pair

        x + y = u - lower,   x - z = 0,   y, z >= 0,

    stacked after the equality block. Variables with no finite upper bound
    contribute no extra rows. A -inf lower bound is an error unless a big-M
    substitute is requested.
    """
    lower = p.lower.copy()
    upper = p.upper.copy()
    if big_m is not None:
        lower = np.where(np.isneginf(lower), -float(big_m), lower)
        upper = np.where(np.isposinf(upper), float(big_m), upper)
    if np.any(np.isneginf(lower)):
        i = int(np.argmax(np.isneginf(lower)))
        raise UnboundedBelowVariable(
            f"variable {i} has lower bound -inf; pass big_m to substitute"
        )

    d, m, n = p.d, p.num_eq, p.num_ineq
    shift = lower
    b_eq = p.b_eq - p.A_eq @ shift
    b_ineq = p.b_ineq - p.A_ineq @ shift
    u_shifted = upper - shift
    bounded = np.flatnonzero(np.isfinite(u_shifted))
    nb = bounded.size

    n_cols = d + 2 * nb + n
    n_rows = m + n + 2 * nb
    A = np.zeros((n_rows, n_cols))
    b = np.zeros(n_rows)

    A[:m, :d] = p.A_eq
    b[:m] = b_eq
    A[m : m + n, :d] = p.A_ineq
    b[m : m + n] = b_ineq
    for j in range(n):  # surplus columns for >= rows
        A[m + j, d + 2 * nb + j] = -1.0
    for k, i in enumerate(bounded):  # x_i + y_k = u_i
        A[m + n + k, i] = 1.0
        A[m + n + k, d + k] = 1.0
        b[m + n + k] = u_shifted[i]
    for k, i in enumerate(bounded):  # x_i - z_k = 0
        A[m + n + nb + k, i] = 1.0
        A[m + n + nb + k, d + nb + k] = -1.0

    c = np.zeros(n_cols)
    c[:d] = p.c
    offset = float(p.c @ shift) + p.objective_offset
    return StandardFormLP(
        A=A, b=b, c=c, original_dim=d, shift=shift, objective_offset=offset
    )


# ---------------------------------------------------------------------------
# Dantzig most-negative-rule primal simplex (tableau form)
# ---------------------------------------------------------------------------

@dataclass
class _Tableau:
    T: np.ndarray            # (k+1, N+1); row 0 = reduced costs, last col = rhs
    basis: np.ndarray        # basic column per constraint row

    @property
    def num_rows(self) -> int:
        return self.T.shape[0] - 1

    @property
    def num_cols(self) -> int:
        return self.T.shape[1] - 1

    def price_out(self, cost: np.ndarray) -> None:
        self.T[0, :-1] = cost
        self.T[0, -1] = 0.0
        for i, j in enumerate(self.basis):
            cj = self.T[0, j]
            if cj != 0.0:
                self.T[0] -= cj * self.T[i + 1]

    def pivot(self, row: int, col: int) -> None:
        self.T[row + 1] /= self.T[row + 1, col]
        piv = self.T[row + 1]
        for i in range(self.T.shape[0]):
            if i != row + 1 and self.T[i, col] != 0.0:
                self.T[i] -= self.T[i, col] * piv
        self.basis[row] = col

    def solution(self) -> np.ndarray:
        x = np.zeros(self.num_cols)
        x[self.basis] = self.T[1:, -1]
        return x


def _enter_column(
    t: _Tableau, allowed: np.ndarray, bland: bool
) -> int | None:
    costs = t.T[0, :-1]
    if bland:
        for j in np.flatnonzero(allowed):
            if costs[j] < -TOL:
                return int(j)
        return None
    masked = np.where(allowed, costs, np.inf)
    j = int(np.argmin(masked))
    return j if masked[j] < -TOL else None


def _leave_row(t: _Tableau, col: int, bland: bool) -> int | None:
    column = t.T[1:, col]
    rhs = t.T[1:, -1]
    eligible = column > TOL
    if not eligible.any():
        return None
    ratios = np.where(eligible, rhs / np.where(eligible, column, 1.0), np.inf)
    best = float(ratios.min())
    tau = 1e-12 * (1.0 + abs(best))
    tied = np.flatnonzero(ratios <= best + tau)
    if bland:
        # Bland's guarantee needs the least basic-variable index among ties
        return int(tied[np.argmin(t.basis[tied])])
    return int(tied[0])


def _run_simplex(
    t: _Tableau,
    allowed: np.ndarray,
    bland: bool,
    max_pivots: int,
    seen: set[frozenset[int]] | None,
    audit: SolveAudit | None,
) -> tuple[str, int]:
    pivots = 0
    while pivots < max_pivots:
        col = _enter_column(t, allowed, bland)
        if col is None:
            return "optimal", pivots
        row = _leave_row(t, col, bland)
        if row is None:
            return "unbounded", pivots
        t.pivot(row, col)
        pivots += 1
        if seen is not None:
            key = frozenset(int(j) for j in t.basis)
            if key in seen and audit is not None:
                audit.base_repeated = True
            seen.add(key)
            if audit is not None:
                audit.pivots_checked += 1
    return "limit", pivots


def dantzig_solve(
    sf: StandardFormLP,
    max_iter: int = 100_000,
    bland: bool = False,
    audit: bool = False,
) -> SolveOutcome:
    """Two-phase primal simplex with the most-negative entering rule.

    Rows already covered by a unit column start basic; only uncovered rows
    receive unit-cost artificial variables, so problems whose slack basis is
    feasible skip Phase 1 entirely. Ratio ties leave the basic variable with
    the least index. ``bland`` switches both choices to Bland's least-index
    rule, which guarantees termination on degenerate instances.
    """
    A = sf.A.copy()
    b = sf.b.copy()
    k, N = A.shape
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # scan right to left so the appended slack/bound columns seed the basis,
    # the classic all-slack start when one exists
    basis = np.full(k, -1, dtype=int)
    for j in range(N - 1, -1, -1):
        col = A[:, j]
        nz = np.flatnonzero(col != 0.0)
        if nz.size == 1 and col[nz[0]] == 1.0 and basis[nz[0]] < 0:
            basis[nz[0]] = j
    uncovered = np.flatnonzero(basis < 0)
    n_art = uncovered.size

    T = np.zeros((k + 1, N + n_art + 1))
    T[1:, :N] = A
    T[1:, -1] = b
    for a, i in enumerate(uncovered):
        T[1 + i, N + a] = 1.0
        basis[i] = N + a

    t = _Tableau(T=T, basis=basis)
    audit_log = SolveAudit() if audit else None
    seen: set[frozenset[int]] | None = set() if audit else None
    if seen is not None:
        seen.add(frozenset(int(j) for j in t.basis))

    phase1 = 0
    if n_art:
        cost1 = np.zeros(N + n_art)
        cost1[N:] = 1.0
        t.price_out(cost1)
        allowed = np.ones(N + n_art, dtype=bool)
        status, phase1 = _run_simplex(
            t, allowed, bland, max_iter, seen, audit_log
        )
        if status == "limit":
            return SolveOutcome(
                status=Status.ITERATION_LIMIT, x_opt=None, objective=None,
                iterations=phase1, audit=audit_log,
                phase1_iterations=phase1, phase2_iterations=0,
            )
        if t.T[0, -1] < -TOL * (1.0 + float(np.abs(b).max(initial=0.0))):
            # phase-1 objective is -sum(artificials) in the rhs cell
            x = sf.project(t.solution()[:N])
            return SolveOutcome(
                status=Status.INFEASIBLE, x_opt=x, objective=None,
                iterations=phase1, audit=audit_log,
                phase1_iterations=phase1, phase2_iterations=0,
            )
        # drive leftover artificials out of the basis, dropping redundant rows
        drop: list[int] = []
        for i in range(k):
            if t.basis[i] < N:
                continue
            row = t.T[1 + i, :N]
            cands = np.flatnonzero(np.abs(row) > TOL)
            if cands.size:
                t.pivot(i, int(cands[0]))
            else:
                drop.append(1 + i)
        if drop:
            keep = [r for r in range(t.T.shape[0]) if r not in drop]
            t.T = t.T[keep]
            t.basis = np.array(
                [t.basis[i] for i in range(k) if (1 + i) not in drop], dtype=int
            )
            k = t.basis.size

    allowed = np.ones(N + n_art, dtype=bool)
    allowed[N:] = False
    t.T[:, N : N + n_art] = 0.0  # retire artificial columns
    t.price_out(np.concatenate([sf.c, np.zeros(n_art)]))
    status, phase2 = _run_simplex(
        t, allowed, bland, max_iter - phase1, seen, audit_log
    )

    iterations = phase1 + phase2
    if status == "limit":
        return SolveOutcome(
            status=Status.ITERATION_LIMIT, x_opt=None, objective=None,
            iterations=iterations, audit=audit_log,
            phase1_iterations=phase1, phase2_iterations=phase2,
        )
    x_std = t.solution()[:N]
    x = sf.project(x_std)
    if status == "unbounded":
        return SolveOutcome(
            status=Status.UNBOUNDED, x_opt=x, objective=None,
            iterations=iterations, audit=audit_log,
            phase1_iterations=phase1, phase2_iterations=phase2,
        )
    objective = float(sf.c @ x_std) + sf.objective_offset
    return SolveOutcome(
        status=Status.OPTIMAL, x_opt=x, objective=objective,
        iterations=iterations, audit=audit_log,
        phase1_iterations=phase1, phase2_iterations=phase2,
    )


# ---------------------------------------------------------------------------
# Brute-force enumeration over facet bases
# ---------------------------------------------------------------------------

def brute_force_optimal(
    sp: StandardGeneralLP, cap: int = ENUMERATION_CAP
) -> SolveOutcome:
    """Enumerate every d-subset of facets, solve the square systems in bulk,
    and keep the best feasible basic solution.

    This is the ground-truth oracle: a basic optimal solution exists whenever
    an optimum does, so exhaustive enumeration is exact at desk scale. On
    ties the non-artificial base wins; an optimum that can only be attained
    on an artificial big-M facet means the true problem is unbounded.
    """
    N, d = sp.num_rows, sp.d
    count = math.comb(N, d)
    if count > cap:
        raise TooLarge(f"{count} bases exceed the enumeration cap {cap}")

    combos = np.array(list(itertools.combinations(range(N), d)), dtype=int)
    A_stack = sp.A[combos]
    b_stack = sp.b[combos]

    dets = np.linalg.det(A_stack)
    row_norms = np.linalg.norm(sp.A, axis=1)
    hadamard = np.prod(row_norms[combos], axis=1)
    nonsingular = np.abs(dets) > 1e-10 * np.maximum(hadamard, np.finfo(float).tiny)
    if not nonsingular.any():
        return SolveOutcome(
            status=Status.INFEASIBLE, x_opt=None, objective=None,
            iterations=int(count),
        )

    combos = combos[nonsingular]
    X = np.linalg.solve(A_stack[nonsingular], b_stack[nonsingular][..., None])[..., 0]

    sigma = X @ sp.A.T - sp.b
    tols = sp.row_tolerances()
    feas = np.all(np.abs(sigma[:, : sp.m]) <= tols[: sp.m], axis=1)
    feas &= np.all(sigma[:, sp.m :] >= -tols[sp.m :], axis=1)
    if not feas.any():
        return SolveOutcome(
            status=Status.INFEASIBLE, x_opt=None, objective=None,
            iterations=int(count),
        )

    combos = combos[feas]
    X = X[feas]
    objectives = X @ sp.c_original + sp.objective_offset
    best = float(objectives.min())
    tie = objectives <= best + 1e-9 * (1.0 + abs(best))

    artificial = sp.artificial_rows
    winner = None
    for idx in np.flatnonzero(tie):
        if not (set(combos[idx].tolist()) & artificial):
            winner = idx
            break
    if winner is None:
        winner = int(np.flatnonzero(tie)[0])
        art_row = sorted(set(combos[winner].tolist()) & artificial)[0]
        return SolveOutcome(
            status=Status.UNBOUNDED, x_opt=X[winner],
            objective=float(objectives[winner]), iterations=int(count),
            certificate=int(art_row),
            basis_rows=tuple(int(r) for r in combos[winner]),
        )
    return SolveOutcome(
        status=Status.OPTIMAL, x_opt=X[winner],
        objective=float(objectives[winner]), iterations=int(count),
        basis_rows=tuple(int(r) for r in combos[winner]),
    )
