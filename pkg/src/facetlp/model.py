"""Problem representations and conversion to the solver-facing stacked form.

A :class:`GeneralLP` is the user-facing problem

    min c.x   s.t.   A_eq x = b_eq,  A_ineq x >= b_ineq,  lower <= x <= upper

with the inequality block uniformly in >= sense (callers negate <= rows on
ingestion). :func:`to_standard_general` rewrites it into a
:class:`StandardGeneralLP`, a single stacked facet matrix

    A = [A_eq; A_ineq; E; F],   b = [b_eq; b_ineq; b_L; b_U]

whose E/F blocks are signed-diagonal bound rows chosen so the objective
expands over E with nonnegative coefficients. Infinite bounds are replaced
by a big-M artificial bound and the affected rows recorded, so a binding
artificial row at termination certifies unboundedness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from facetlp.errors import DimensionMismatch, InconsistentBounds, NonFiniteData

BIG_M_FACTOR = 1e7
TOL_FEAS_BASE = 1e-8


def _as_matrix(a, rows: int | None, cols: int, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        a = a.reshape((0, cols))
    if a.ndim != 2 or a.shape[1] != cols or (rows is not None and a.shape[0] != rows):
        raise DimensionMismatch(f"{name} has shape {a.shape}, expected ({rows}, {cols})")
    return a


@dataclass
class GeneralLP:
    """General-form LP: equality rows, >= inequality rows, and box bounds."""

    c: np.ndarray
    A_eq: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    b_eq: np.ndarray = field(default_factory=lambda: np.zeros(0))
    A_ineq: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    b_ineq: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    names: dict | None = None
    objective_offset: float = 0.0

    def __post_init__(self):
        self.c = np.atleast_1d(np.asarray(self.c, dtype=float))
        d = self.c.shape[0]
        self.b_eq = np.atleast_1d(np.asarray(self.b_eq, dtype=float))
        self.b_ineq = np.atleast_1d(np.asarray(self.b_ineq, dtype=float))
        self.A_eq = _as_matrix(self.A_eq, self.b_eq.shape[0], d, "A_eq")
        self.A_ineq = _as_matrix(self.A_ineq, self.b_ineq.shape[0], d, "A_ineq")
        self.lower = (
            np.zeros(d) if self.lower is None
            else np.atleast_1d(np.asarray(self.lower, dtype=float))
        )
        self.upper = (
            np.full(d, np.inf) if self.upper is None
            else np.atleast_1d(np.asarray(self.upper, dtype=float))
        )
        if self.lower.shape != (d,) or self.upper.shape != (d,):
            raise DimensionMismatch("bound vectors must have length d")
        for arr, label in ((self.c, "c"), (self.A_eq, "A_eq"), (self.b_eq, "b_eq"),
                           (self.A_ineq, "A_ineq"), (self.b_ineq, "b_ineq")):
            if not np.all(np.isfinite(arr)):
                raise NonFiniteData(f"{label} contains a non-finite entry")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise NonFiniteData("bounds contain NaN")
        if np.any(self.lower > self.upper):
            i = int(np.argmax(self.lower > self.upper))
            raise InconsistentBounds(
                f"lower[{i}]={self.lower[i]} exceeds upper[{i}]={self.upper[i]}"
            )
        self.objective_offset = float(self.objective_offset)
        if not np.isfinite(self.objective_offset):
            raise NonFiniteData("objective_offset must be finite")

    @property
    def d(self) -> int:
        return self.c.shape[0]

    @property
    def num_eq(self) -> int:
        return self.b_eq.shape[0]

    @property
    def num_ineq(self) -> int:
        return self.b_ineq.shape[0]


@dataclass
class StandardGeneralLP:
    """Solver-facing stacked form; see the module docstring for the layout."""

    c_bar: np.ndarray
    A: np.ndarray
    b: np.ndarray
    m: int
    n: int
    flip: np.ndarray
    big_M: float
    artificial_rows: frozenset[int]
    objective_offset: float = 0.0

    @property
    def d(self) -> int:
        return self.A.shape[1]

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    @property
    def eq_indices(self) -> range:
        return range(self.m)

    @property
    def ineq_indices(self) -> range:
        return range(self.m, self.num_rows)

    @property
    def e_block(self) -> slice:
        return slice(self.m + self.n, self.m + self.n + self.d)

    @property
    def f_block(self) -> slice:
        return slice(self.m + self.n + self.d, self.m + self.n + 2 * self.d)

    @property
    def c_original(self) -> np.ndarray:
        """Objective vector in the original coordinates: sum of c_bar[i] * E_i."""
        return np.where(self.flip, -self.c_bar, self.c_bar)

    def rhs_scale(self) -> float:
        """Largest |b| entry over the non-artificial rows.

        Artificial big-M entries are excluded: a tolerance scaled by M would
        mask genuine violations on small-rhs rows.
        """
        real = np.ones(self.num_rows, dtype=bool)
        if self.artificial_rows:
            real[list(self.artificial_rows)] = False
        return float(np.max(np.abs(self.b[real]), initial=0.0))

    def default_tol_feas(self) -> float:
        return TOL_FEAS_BASE * (1.0 + self.rhs_scale())

    def row_tolerances(self, base: float = TOL_FEAS_BASE) -> np.ndarray:
        """Per-row violation tolerances, scaled by each row's own rhs."""
        return base * (1.0 + np.abs(self.b))


@dataclass(frozen=True)
class ViolationReport:
    """Residuals a_i.x - b_i split by row class, plus a feasibility verdict."""

    sigma_eq: np.ndarray
    sigma_ineq: np.ndarray
    max_abs_violation: float
    is_feasible: bool


def default_big_m(p: GeneralLP) -> float:
    """Artificial bound magnitude: large enough to flag unboundedness, small
    enough to stay well-conditioned in doubles."""
    finite_bounds = [np.abs(v[np.isfinite(v)]) for v in (p.lower, p.upper)]
    candidates = [1.0]
    candidates += [float(v.max()) for v in finite_bounds if v.size]
    for b in (p.b_eq, p.b_ineq):
        if b.size:
            candidates.append(float(np.max(np.abs(b))))
    return BIG_M_FACTOR * max(candidates)


def to_standard_general(p: GeneralLP, big_M: float | None = None) -> StandardGeneralLP:
    """Stack the problem into [A_eq; A_ineq; E; F] with sign-adjusted bounds.

    Per variable i: if c_i >= 0 the E row is +e_i with rhs lower_i and the F
    row is -e_i with rhs -upper_i; if c_i < 0 the objective coefficient is
    negated (c_bar_i = -c_i), the E row is -e_i with rhs -upper_i and the F
    row is +e_i with rhs lower_i. Infinite bounds become -big_M on the
    affected row, which is recorded in ``artificial_rows``.
    """
    if big_M is None:
        big_M = default_big_m(p)
    if not np.isfinite(big_M) or big_M <= 0:
        raise NonFiniteData("big_M must be a positive finite number")
    d, m, n = p.d, p.num_eq, p.num_ineq
    flip = p.c < 0
    c_bar = np.abs(p.c)

    lower = np.where(np.isneginf(p.lower), -big_M, p.lower)
    upper = np.where(np.isposinf(p.upper), big_M, p.upper)

    e_diag = np.where(flip, -1.0, 1.0)
    b_L = np.where(flip, -upper, lower)
    b_U = np.where(flip, lower, -upper)

    A = np.vstack([p.A_eq, p.A_ineq, np.diag(e_diag), np.diag(-e_diag)])
    b = np.concatenate([p.b_eq, p.b_ineq, b_L, b_U])

    artificial = set()
    for i in range(d):
        if np.isneginf(p.lower[i]) or np.isposinf(p.upper[i]):
            # the bound written as >= always carries -M on the affected side
            if np.isposinf(p.upper[i]):
                artificial.add(m + n + i if flip[i] else m + n + d + i)
            if np.isneginf(p.lower[i]):
                artificial.add(m + n + d + i if flip[i] else m + n + i)

    return StandardGeneralLP(
        c_bar=c_bar, A=A, b=b, m=m, n=n, flip=flip,
        big_M=float(big_M), artificial_rows=frozenset(artificial),
        objective_offset=p.objective_offset,
    )


def violations(
    sp: StandardGeneralLP, x: np.ndarray, tol_feas: float | None = None
) -> ViolationReport:
    """Componentwise residuals of every stacked row at x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (sp.d,):
        raise DimensionMismatch(f"x has shape {x.shape}, expected ({sp.d},)")
    if tol_feas is None:
        tol_feas = sp.default_tol_feas()
    sigma = sp.A @ x - sp.b
    sigma_eq = sigma[: sp.m]
    sigma_ineq = sigma[sp.m:]
    worst_eq = float(np.max(np.abs(sigma_eq), initial=0.0))
    worst_ineq = float(max(0.0, -np.min(sigma_ineq, initial=0.0)))
    feasible = worst_eq <= tol_feas and worst_ineq <= tol_feas
    return ViolationReport(
        sigma_eq=sigma_eq,
        sigma_ineq=sigma_ineq,
        max_abs_violation=max(worst_eq, worst_ineq),
        is_feasible=bool(feasible),
    )


def objective_value(p: GeneralLP, x: np.ndarray) -> float:
    """c.x in the original (unflipped) coordinates, plus any constant term."""
    x = np.asarray(x, dtype=float)
    if x.shape != (p.d,):
        raise DimensionMismatch(f"x has shape {x.shape}, expected ({p.d},)")
    return float(p.c @ x) + p.objective_offset


# ---------------------------------------------------------------------------
# JSON problem format
# ---------------------------------------------------------------------------

def _bound_to_json(v: float):
    if np.isposinf(v):
        return "inf"
    if np.isneginf(v):
        return "-inf"
    return float(v)


def _bound_from_json(v) -> float:
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return np.inf
        if s in ("-inf", "-infinity"):
            return -np.inf
        raise NonFiniteData(f"unrecognized bound sentinel {v!r}")
    return float(v)


def general_lp_to_dict(p: GeneralLP) -> dict:
    doc = {
        "c": p.c.tolist(),
        "A_eq": p.A_eq.tolist(),
        "b_eq": p.b_eq.tolist(),
        "A_ineq": p.A_ineq.tolist(),
        "b_ineq": p.b_ineq.tolist(),
        "lower": [_bound_to_json(v) for v in p.lower],
        "upper": [_bound_to_json(v) for v in p.upper],
    }
    if p.names:
        doc["names"] = p.names
    if p.objective_offset:
        doc["objective_offset"] = p.objective_offset
    return doc


def general_lp_from_dict(doc: dict) -> GeneralLP:
    d = len(doc["c"])
    return GeneralLP(
        c=doc["c"],
        A_eq=doc.get("A_eq") or np.zeros((0, d)),
        b_eq=doc.get("b_eq") or np.zeros(0),
        A_ineq=doc.get("A_ineq") or np.zeros((0, d)),
        b_ineq=doc.get("b_ineq") or np.zeros(0),
        lower=[_bound_from_json(v) for v in doc["lower"]] if "lower" in doc else None,
        upper=[_bound_from_json(v) for v in doc["upper"]] if "upper" in doc else None,
        names=doc.get("names"),
        objective_offset=doc.get("objective_offset", 0.0),
    )


def save_general_lp(p: GeneralLP, path) -> None:
    with open(path, "w") as fh:
        json.dump(general_lp_to_dict(p), fh, indent=1)
        fh.write("\n")


def load_general_lp(path) -> GeneralLP:
    with open(path) as fh:
        return general_lp_from_dict(json.load(fh))
