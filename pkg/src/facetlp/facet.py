"""Facet pivot simplex engine.

The solver walks among *bases*: sets of d independent rows (facets) of the
stacked constraint matrix. Every iterate x solves A_B x = b_B and carries
objective expansion coefficients y_c with A_B^T y_c = c and y_c >= 0 on the
inequality members of the base. Iterates are basic but generally infeasible;
each pivot swaps one violated non-base facet into the base so that the sign
condition is preserved and the objective never decreases. The first feasible
iterate is therefore optimal.

Per iteration a single LU factorization of the base serves both linear
solves: the transpose solve for the entering facet's expansion and the
rank-one update of the iterate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from facetlp import linalg
from facetlp.errors import NoLeavingCandidate, SingularMatrix
from facetlp.model import StandardGeneralLP, TOL_FEAS_BASE

TOL_SIGN = 1e-9
TOL_LIN = 1e-9
TOL_OBJ_BASE = 1e-9
YC_REFRESH_PERIOD = 50
YC_DRIFT_FACTOR = 10.0
STALL_ITERATIONS = 200


class PivotRule(Enum):
    MAX_DEVIATION = "max-dev"
    MAX_NORMALIZED_DEVIATION = "max-norm-dev"
    LEAST_INDEX = "least-index"


class Status(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITERATION_LIMIT = "IterationLimit"
    RANK_DEFICIENT_EQUALITY = "RankDeficientEquality"


@dataclass
class Base:
    """Ordered set of d facet indices with its current factorization."""

    indices: np.ndarray
    is_eq: np.ndarray
    fact: linalg.SquareFactorization

    def slot_of(self, row: int) -> int:
        slots = np.flatnonzero(self.indices == row)
        if slots.size != 1:
            raise KeyError(f"row {row} is not in the base")
        return int(slots[0])

    @property
    def eq_members(self) -> np.ndarray:
        return self.indices[self.is_eq]

    @property
    def ineq_members(self) -> np.ndarray:
        return self.indices[~self.is_eq]


@dataclass
class SolverState:
    """Mutable per-solve bookkeeping; owned exclusively by one solve call."""

    x: np.ndarray
    y_c: np.ndarray
    iteration: int = 0
    removed_rows: set[int] = field(default_factory=set)
    trace: list[TraceRecord] | None = None


@dataclass(frozen=True)
class TraceRecord:
    k: int
    entering: int
    leaving: int
    objective: float
    max_violation: float
    rule: str
    note: str | None = None

    def to_json_dict(self) -> dict:
        doc = {
            "k": self.k,
            "p": self.entering,
            "q": self.leaving,
            "objective": self.objective,
            "max_violation": self.max_violation,
            "rule": self.rule,
        }
        if self.note is not None:
            doc["note"] = self.note
        return doc


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Entering facet whose expansion sign pattern rules out any feasible point."""

    entering_row: int
    case: int
    sigma: float
    y_by_row: dict[int, float]
    note: str | None = None


@dataclass
class SolveAudit:
    """Per-pivot invariant checks and base-revisit accounting."""

    violations: list[str] = field(default_factory=list)
    base_repeated: bool = False
    pivots_checked: int = 0


@dataclass(frozen=True)
class SolveOutcome:
    status: Status
    x_opt: np.ndarray | None
    objective: float | None
    iterations: int
    certificate: InfeasibilityCertificate | int | None = None
    redundant_rows: frozenset[int] = frozenset()
    basis_rows: tuple[int, ...] | None = None
    trace: list[TraceRecord] | None = None
    audit: SolveAudit | None = None
    phase1_iterations: int | None = None
    phase2_iterations: int | None = None


def initial_state(sp: StandardGeneralLP) -> tuple[Base, SolverState]:
    """Start from the signed-diagonal bound block: x0 solves E x0 = b_L and
    the expansion coefficients are the nonnegative adjusted objective."""
    d = sp.d
    rows = np.arange(sp.m + sp.n, sp.m + sp.n + d)
    fact = linalg.factor(sp.A[rows])
    x0 = fact.solve(sp.b[rows])
    base = Base(indices=rows, is_eq=np.zeros(d, dtype=bool), fact=fact)
    state = SolverState(x=x0, y_c=sp.c_bar.astype(float).copy())
    return base, state


def _row_norms(sp: StandardGeneralLP) -> np.ndarray:
    return np.linalg.norm(sp.A, axis=1)


def select_entering(
    sp: StandardGeneralLP,
    base: Base,
    state: SolverState,
    rule: PivotRule,
    sigma: np.ndarray | None = None,
    row_tols: np.ndarray | None = None,
    row_norms: np.ndarray | None = None,
) -> int | None:
    """Pick the violated non-base facet to enter, or None at optimality.

    Violated equality rows take absolute priority over violated inequality
    rows; within the eligible class the pivot rule decides, ties going to the
    least row index.
    """
    if sigma is None:
        sigma = sp.A @ state.x - sp.b
    if row_tols is None:
        row_tols = sp.row_tolerances()
    candidate = np.ones(sp.num_rows, dtype=bool)
    candidate[base.indices] = False
    if state.removed_rows:
        candidate[list(state.removed_rows)] = False

    eq_violated = candidate.copy()
    eq_violated[sp.m:] = False
    eq_violated &= np.abs(sigma) > row_tols

    if eq_violated.any():
        pool = np.flatnonzero(eq_violated)
    else:
        ineq_violated = candidate
        ineq_violated[: sp.m] = False
        ineq_violated &= sigma < -row_tols
        if not ineq_violated.any():
            return None
        pool = np.flatnonzero(ineq_violated)

    if rule is PivotRule.LEAST_INDEX:
        return int(pool[0])
    deviation = np.abs(sigma[pool])
    if rule is PivotRule.MAX_NORMALIZED_DEVIATION:
        if row_norms is None:
            row_norms = _row_norms(sp)
        deviation = deviation / row_norms[pool]
    # np.argmax returns the first maximizer and pool is ascending, so ties
    # resolve to the least row index
    return int(pool[int(np.argmax(deviation))])


def expand_entering(base: Base, a_p: np.ndarray) -> np.ndarray:
    """Coefficients y_p with A_B^T y_p = a_p, aligned with the base slots."""
    return base.fact.solve_transpose(np.asarray(a_p, dtype=float))


def check_infeasible(
    sp: StandardGeneralLP,
    p: int,
    sigma_p: float,
    y_p: np.ndarray,
    base: Base,
    tol_sign: float = TOL_SIGN,
) -> InfeasibilityCertificate | None:
    """Farkas-style test on the entering facet's expansion.

    A violated-from-below facet whose expansion is nonpositive on every
    inequality member, or an over-violated equality facet whose expansion is
    nonnegative there, certifies an empty feasible set.
    """
    ineq_slots = ~base.is_eq
    y_ineq = y_p[ineq_slots]
    certificate = None
    if sigma_p < 0 and np.all(y_ineq <= tol_sign):
        certificate = 1
    elif p < sp.m and sigma_p > 0 and np.all(y_ineq >= -tol_sign):
        certificate = 2
    if certificate is None:
        return None
    note = None
    if p < sp.m and np.all(np.abs(y_ineq) <= tol_sign):
        note = "entering equality depends only on base equalities, rhs inconsistent"
    return InfeasibilityCertificate(
        entering_row=p,
        case=certificate,
        sigma=float(sigma_p),
        y_by_row={int(r): float(v) for r, v in zip(base.indices, y_p)},
        note=note,
    )


def _tie_least_row(rows: np.ndarray, ratios: np.ndarray, best: float) -> int:
    tau = 1e-12 * (1.0 + abs(best))
    tied = rows[np.abs(ratios - best) <= tau]
    return int(tied.min())


def select_leaving(
    p: int,
    sigma_p: float,
    y_p: np.ndarray,
    y_c: np.ndarray,
    base: Base,
    tol_sign: float = TOL_SIGN,
) -> int:
    """Ratio test over the inequality members of the base.

    Violated-from-below entering facet: minimize y_c/y_p over positive y_p.
    Over-violated entering equality: maximize y_c/y_p over negative y_p.
    Either way the updated expansion stays nonnegative on inequality members.
    Ties go to the least row index. Equality members never leave.
    """
    ineq = ~base.is_eq
    if sigma_p < 0:
        eligible = ineq & (y_p > tol_sign)
        if not eligible.any():
            raise NoLeavingCandidate(f"no positive expansion entry for facet {p}")
        ratios = y_c[eligible] / y_p[eligible]
        best = float(ratios.min())
    else:
        eligible = ineq & (y_p < -tol_sign)
        if not eligible.any():
            raise NoLeavingCandidate(f"no negative expansion entry for facet {p}")
        ratios = y_c[eligible] / y_p[eligible]
        best = float(ratios.max())
    return _tie_least_row(base.indices[eligible], ratios, best)


def detect_leaving_redundant(
    q: int, y_p: np.ndarray, base: Base, tol_sign: float = TOL_SIGN
) -> bool:
    """True when every other inequality member has a nonpositive expansion
    entry, which proves the leaving facet can never bind again."""
    s = base.slot_of(q)
    others = ~base.is_eq
    others[s] = False
    return bool(np.all(y_p[others] <= tol_sign))


def detect_nonbase_redundant(
    sp: StandardGeneralLP,
    base: Base,
    state: SolverState,
    sigma: np.ndarray | None = None,
    row_tols: np.ndarray | None = None,
    tol_sign: float = TOL_SIGN,
) -> set[int]:
    """Optional scan for non-base facets provably redundant at this iterate.

    An equality facet exactly satisfied whose expansion avoids every
    inequality member, or a strictly satisfied inequality facet with a
    nonnegative expansion there, never constrains the feasible set. Costs one
    transpose solve per scanned facet, so the solver leaves this off by
    default.
    """
    if sigma is None:
        sigma = sp.A @ state.x - sp.b
    if row_tols is None:
        row_tols = sp.row_tolerances()
    in_base = np.zeros(sp.num_rows, dtype=bool)
    in_base[base.indices] = True
    ineq_slots = ~base.is_eq
    redundant: set[int] = set()
    for r in range(sp.num_rows):
        if in_base[r] or r in state.removed_rows:
            continue
        if r < sp.m:
            if abs(sigma[r]) > row_tols[r]:
                continue
            y_r = expand_entering(base, sp.A[r])
            if np.all(np.abs(y_r[ineq_slots]) <= tol_sign):
                redundant.add(r)
        else:
            if sigma[r] <= row_tols[r]:
                continue
            y_r = expand_entering(base, sp.A[r])
            if np.all(y_r[ineq_slots] >= -tol_sign):
                redundant.add(r)
    return redundant


def pivot(
    sp: StandardGeneralLP,
    base: Base,
    state: SolverState,
    p: int,
    q: int,
    y_p: np.ndarray,
    tol_lin: float = TOL_LIN,
) -> tuple[Base, SolverState]:
    """Swap facet q out for facet p and update the iterate and expansion.

    The iterate moves along w = A_B^{-1} e_q, solved from the same
    factorization that produced y_p, so one LU per iteration covers both
    solves. The result is checked against the new base equations row by row,
    with a direct solve from the fresh factorization as fallback.
    """
    s = base.slot_of(q)
    if abs(y_p[s]) <= TOL_SIGN:
        raise NoLeavingCandidate(f"expansion entry for leaving facet {q} is zero")
    ratio = state.y_c[s] / y_p[s]

    unit = np.zeros(sp.d)
    unit[s] = 1.0
    w = base.fact.solve(unit)
    a_p = sp.A[p]
    step = (sp.b[p] - a_p @ state.x) / y_p[s]
    x_new = state.x + step * w

    indices = base.indices.copy()
    is_eq = base.is_eq.copy()
    indices[s] = p
    is_eq[s] = p < sp.m
    try:
        fact = linalg.factor(sp.A[indices])
        if fact.singular:
            raise SingularMatrix(
                f"base became singular after pivot {p}<->{q}", fact.bad_pivot_index
            )
    except SingularMatrix as exc:
        raise SingularMatrix(
            f"pivot {p}<->{q} produced a singular base, which the independence "
            f"property rules out; numerical breakdown: {exc}",
            exc.pivot_index,
        ) from exc

    # the rank-one step cancels catastrophically when big-M coordinates
    # collapse to small values, so verify row by row at the same tolerance
    # the basic-solution invariant uses and fall back to a direct solve
    b_new = sp.b[indices]
    residual = np.abs(sp.A[indices] @ x_new - b_new)
    if np.any(residual > tol_lin * (1.0 + np.abs(b_new))):
        x_new = fact.solve(b_new)

    y_c = state.y_c - y_p * ratio
    y_c[s] = ratio

    new_base = Base(indices=indices, is_eq=is_eq, fact=fact)
    new_state = SolverState(
        x=x_new,
        y_c=y_c,
        iteration=state.iteration + 1,
        removed_rows=state.removed_rows,
        trace=state.trace,
    )
    return new_base, new_state


def _refresh_y_c(sp: StandardGeneralLP, base: Base) -> np.ndarray:
    return base.fact.solve_transpose(sp.c_original)


def _expansion_residual(sp: StandardGeneralLP, base: Base, y_c: np.ndarray) -> float:
    return float(np.max(np.abs(sp.A[base.indices].T @ y_c - sp.c_original)))


def solve(
    sp: StandardGeneralLP,
    rule: PivotRule = PivotRule.MAX_DEVIATION,
    max_iter: int = 10_000,
    *,
    reduce: bool = False,
    collect_trace: bool = False,
    audit: bool = False,
    tol_feas: float | None = None,
    stall_iterations: int = STALL_ITERATIONS,
) -> SolveOutcome:
    """Run the facet pivot loop to a terminal status.

    ``reduce`` enables the non-base redundancy scan each iteration (off by
    default: it costs a transpose solve per scanned facet). ``tol_feas``
    overrides the per-row violation tolerances with one absolute value.
    ``audit`` checks the four runtime invariants after every pivot and
    records base index sets to detect revisits. After ``stall_iterations``
    pivots without objective progress the rule switches to the least-index
    rule, whose termination guarantee breaks any cycling.
    """
    d = sp.d
    if sp.m > 0 and np.linalg.matrix_rank(sp.A[: sp.m]) >= d:
        return SolveOutcome(
            status=Status.RANK_DEFICIENT_EQUALITY, x_opt=None, objective=None,
            iterations=0,
        )

    c = sp.c_original
    c_scale = 1.0 + float(np.max(np.abs(c), initial=0.0))
    row_tols = (
        np.full(sp.num_rows, tol_feas) if tol_feas is not None
        else sp.row_tolerances(TOL_FEAS_BASE)
    )
    row_norms = _row_norms(sp) if rule is PivotRule.MAX_NORMALIZED_DEVIATION else None

    base, state = initial_state(sp)
    if collect_trace:
        state.trace = []
    audit_log = SolveAudit() if audit else None
    seen_bases: set[frozenset[int]] = set()
    if audit:
        seen_bases.add(frozenset(base.indices.tolist()))

    active_rule = rule
    offset = sp.objective_offset
    objective = float(c @ state.x) + offset
    best_objective = objective
    stall = 0

    while True:
        sigma = sp.A @ state.x - sp.b

        if reduce:
            state.removed_rows |= detect_nonbase_redundant(
                sp, base, state, sigma=sigma, row_tols=row_tols
            )

        p = select_entering(
            sp, base, state, active_rule,
            sigma=sigma, row_tols=row_tols, row_norms=row_norms,
        )
        if p is None:
            x_final = base.fact.solve(sp.b[base.indices]) + 0.0  # clear -0.0
            objective = float(c @ x_final) + offset
            basis = tuple(int(r) for r in base.indices)
            artificial = sorted(set(basis) & sp.artificial_rows)
            if artificial:
                return SolveOutcome(
                    status=Status.UNBOUNDED, x_opt=x_final, objective=objective,
                    iterations=state.iteration, certificate=int(artificial[0]),
                    redundant_rows=frozenset(state.removed_rows), basis_rows=basis,
                    trace=state.trace, audit=audit_log,
                )
            return SolveOutcome(
                status=Status.OPTIMAL, x_opt=x_final, objective=objective,
                iterations=state.iteration,
                redundant_rows=frozenset(state.removed_rows), basis_rows=basis,
                trace=state.trace, audit=audit_log,
            )

        if state.iteration >= max_iter:
            return SolveOutcome(
                status=Status.ITERATION_LIMIT, x_opt=state.x, objective=None,
                iterations=state.iteration,
                redundant_rows=frozenset(state.removed_rows),
                basis_rows=tuple(int(r) for r in base.indices),
                trace=state.trace, audit=audit_log,
            )

        y_p = expand_entering(base, sp.A[p])
        certificate = check_infeasible(sp, p, float(sigma[p]), y_p, base)
        if certificate is not None:
            if state.trace is not None:
                state.trace.append(TraceRecord(
                    k=state.iteration, entering=p, leaving=-1,
                    objective=objective, max_violation=float(abs(sigma[p])),
                    rule=active_rule.value, note=certificate.note or "infeasible",
                ))
            return SolveOutcome(
                status=Status.INFEASIBLE, x_opt=state.x, objective=None,
                iterations=state.iteration, certificate=certificate,
                redundant_rows=frozenset(state.removed_rows),
                basis_rows=tuple(int(r) for r in base.indices),
                trace=state.trace, audit=audit_log,
            )

        q = select_leaving(p, float(sigma[p]), y_p, state.y_c, base)
        if detect_leaving_redundant(q, y_p, base):
            state.removed_rows.add(q)

        max_violation = _max_violation(sp, sigma)
        prev_objective = objective
        base, state = pivot(sp, base, state, p, q, y_p)

        # keep the incremental expansion honest: refresh from scratch
        # periodically or when it drifts
        drift = _expansion_residual(sp, base, state.y_c)
        if (
            drift > YC_DRIFT_FACTOR * TOL_LIN * c_scale
            or state.iteration % YC_REFRESH_PERIOD == 0
        ):
            state.y_c = _refresh_y_c(sp, base)

        objective = float(c @ state.x) + offset
        if state.trace is not None:
            state.trace.append(TraceRecord(
                k=state.iteration - 1, entering=p, leaving=q,
                objective=objective, max_violation=max_violation,
                rule=active_rule.value,
            ))

        if audit_log is not None:
            _audit_pivot(
                sp, base, state, prev_objective, objective, c_scale,
                audit_log, seen_bases,
            )

        tol_obj = TOL_OBJ_BASE * (1.0 + max(abs(objective), abs(best_objective)))
        if objective > best_objective + tol_obj:
            best_objective = objective
            stall = 0
        else:
            stall += 1
            if stall >= stall_iterations and active_rule is not PivotRule.LEAST_INDEX:
                active_rule = PivotRule.LEAST_INDEX
                stall = 0


def _max_violation(sp: StandardGeneralLP, sigma: np.ndarray) -> float:
    eq_part = np.abs(sigma[: sp.m])
    ineq_part = -sigma[sp.m:]
    worst = 0.0
    if eq_part.size:
        worst = float(np.max(eq_part))
    if ineq_part.size:
        worst = max(worst, float(np.max(ineq_part)))
    return max(worst, 0.0)


def _audit_pivot(
    sp: StandardGeneralLP,
    base: Base,
    state: SolverState,
    prev_objective: float,
    objective: float,
    c_scale: float,
    audit_log: SolveAudit,
    seen_bases: set[frozenset[int]],
) -> None:
    k = state.iteration
    audit_log.pivots_checked += 1

    y_ineq = state.y_c[~base.is_eq]
    if y_ineq.size and float(y_ineq.min()) < -TOL_SIGN:
        audit_log.violations.append(
            f"iter {k}: sign maintenance broken, min y_c={y_ineq.min():.3e}"
        )

    drift = _expansion_residual(sp, base, state.y_c)
    if drift > TOL_LIN * c_scale:
        audit_log.violations.append(
            f"iter {k}: expansion residual {drift:.3e} exceeds tolerance"
        )

    b_base = sp.b[base.indices]
    res = float(np.max(np.abs(sp.A[base.indices] @ state.x - b_base)))
    allowed = TOL_LIN * (1.0 + float(np.max(np.abs(b_base), initial=0.0)))
    if res > allowed:
        audit_log.violations.append(
            f"iter {k}: basic-solution residual {res:.3e} exceeds {allowed:.3e}"
        )

    tol_obj = TOL_OBJ_BASE * (1.0 + max(abs(objective), abs(prev_objective)))
    if objective < prev_objective - tol_obj:
        audit_log.violations.append(
            f"iter {k}: objective decreased {prev_objective!r} -> {objective!r}"
        )

    key = frozenset(int(r) for r in base.indices)
    if key in seen_bases:
        audit_log.base_repeated = True
    seen_bases.add(key)


def solve_general(
    p,
    rule: PivotRule = PivotRule.MAX_DEVIATION,
    max_iter: int = 10_000,
    big_M: float | None = None,
    **kwargs,
) -> SolveOutcome:
    """Convenience wrapper: convert a GeneralLP and solve it."""
    from facetlp.model import to_standard_general

    sp = to_standard_general(p, big_M=big_M)
    return solve(sp, rule=rule, max_iter=max_iter, **kwargs)
