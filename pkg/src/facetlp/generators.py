"""Deterministic construction of the hard test families and random instances.

Klee-Minty cubes come in the two classic variants: the powers-of-2 deformed
cube with rhs 5^k, and the unit-coefficient variant with rhs 2^k - 1. Both
force exponentially many pivots out of classic vertex rules while staying
exactly representable in doubles. The cycling set bundles Beale's degenerate
example, Chvatal's textbook variant, and mechanical transforms of Beale data;
all are known to defeat naive ratio-test tie-breaking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from facetlp.errors import SizeOutOfRange, UnknownFixture
from facetlp.model import GeneralLP

KM1_MAX_D = 25
KM2_MAX_D = 30


def _le_rows(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Negate <=-sense rows into the >= convention GeneralLP uses."""
    return -np.asarray(A, dtype=float), -np.asarray(b, dtype=float)


def klee_minty_v1(d: int) -> GeneralLP:
    """Deformed cube with lower-triangular powers-of-2 rows and rhs 5^k.

    min -sum 2^(d-i) x_i subject to x_1 <= 5, 2^k x_1 + ... + x_k <= 5^k,
    x >= 0. Optimizer (0, ..., 0, 5^d) with objective -5^d.
    """
    if not 2 <= d <= KM1_MAX_D:
        raise SizeOutOfRange(f"variant-1 cube supports 2 <= d <= {KM1_MAX_D}, got {d}")
    A = np.zeros((d, d))
    for k in range(d):
        A[k, k] = 1.0
        for i in range(k):
            A[k, i] = float(2 ** (k - i + 1))
    b = np.array([float(5 ** (k + 1)) for k in range(d)])
    c = np.array([-float(2 ** (d - 1 - i)) for i in range(d)])
    A_ineq, b_ineq = _le_rows(A, b)
    return GeneralLP(c=c, A_ineq=A_ineq, b_ineq=b_ineq,
                     lower=np.zeros(d), upper=np.full(d, np.inf),
                     names={"family": "klee-minty-1", "d": d})


def klee_minty_v2(d: int) -> GeneralLP:
    """Unit-coefficient variant: x_1 <= 1 and 2*sum_{i<k} x_i + x_k <= 2^k - 1.

    min -sum x_i; optimizer (0, ..., 0, 2^d - 1) with objective -(2^d - 1).
    """
    if not 2 <= d <= KM2_MAX_D:
        raise SizeOutOfRange(f"variant-2 cube supports 2 <= d <= {KM2_MAX_D}, got {d}")
    A = np.zeros((d, d))
    b = np.zeros(d)
    for k in range(d):
        A[k, :k] = 2.0
        A[k, k] = 1.0
        b[k] = float(2 ** (k + 1) - 1)
    c = -np.ones(d)
    A_ineq, b_ineq = _le_rows(A, b)
    return GeneralLP(c=c, A_ineq=A_ineq, b_ineq=b_ineq,
                     lower=np.zeros(d), upper=np.full(d, np.inf),
                     names={"family": "klee-minty-2", "d": d})


# ---------------------------------------------------------------------------
# Cycling fixtures
# ---------------------------------------------------------------------------

def _beale_data() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    A = np.array([
        [0.25, -60.0, -1.0 / 25.0, 9.0],
        [0.5, -90.0, -1.0 / 50.0, 3.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
    b = np.array([0.0, 0.0, 1.0])
    c = np.array([-0.75, 150.0, -1.0 / 50.0, 6.0])
    return A, b, c


def _beale() -> GeneralLP:
    A, b, c = _beale_data()
    A_ineq, b_ineq = _le_rows(A, b)
    return GeneralLP(c=c, A_ineq=A_ineq, b_ineq=b_ineq, lower=np.zeros(4))


def _beale_permuted() -> GeneralLP:
    A, b, c = _beale_data()
    perm = [3, 2, 1, 0]
    A_ineq, b_ineq = _le_rows(A[:, perm], b)
    return GeneralLP(c=c[perm], A_ineq=A_ineq, b_ineq=b_ineq, lower=np.zeros(4))


def _beale_scaled() -> GeneralLP:
    A, b, c = _beale_data()
    A_ineq, b_ineq = _le_rows(2.0 * A, 2.0 * b)
    return GeneralLP(c=10.0 * c, A_ineq=A_ineq, b_ineq=b_ineq, lower=np.zeros(4))


def _beale_redundant() -> GeneralLP:
    A, b, c = _beale_data()
    A = np.vstack([A, A[1]])
    b = np.concatenate([b, b[1:2]])
    A_ineq, b_ineq = _le_rows(A, b)
    return GeneralLP(c=c, A_ineq=A_ineq, b_ineq=b_ineq, lower=np.zeros(4))


def _chvatal() -> GeneralLP:
    A = np.array([
        [0.5, -5.5, -2.5, 9.0],
        [0.5, -1.5, -0.5, 1.0],
        [1.0, 0.0, 0.0, 0.0],
    ])
    b = np.array([0.0, 0.0, 1.0])
    c = np.array([-10.0, 57.0, 9.0, 24.0])
    A_ineq, b_ineq = _le_rows(A, b)
    return GeneralLP(c=c, A_ineq=A_ineq, b_ineq=b_ineq, lower=np.zeros(4))


_CYCLING_BUILDERS = {
    "beale": _beale,
    "beale_permuted": _beale_permuted,
    "beale_scaled": _beale_scaled,
    "beale_redundant": _beale_redundant,
    "chvatal": _chvatal,
}

CYCLING_FIXTURE_IDS = tuple(sorted(_CYCLING_BUILDERS))


def cycling_fixture(fixture_id: str) -> GeneralLP:
    """One of the bundled degenerate LPs that cycle under naive pivoting."""
    try:
        builder = _CYCLING_BUILDERS[fixture_id]
    except KeyError:
        raise UnknownFixture(
            f"unknown cycling fixture {fixture_id!r}; "
            f"bundled: {', '.join(CYCLING_FIXTURE_IDS)}"
        ) from None
    p = builder()
    p.names = {"family": "cycling", "fixture": fixture_id}
    return p


# ---------------------------------------------------------------------------
# Seeded random instances
# ---------------------------------------------------------------------------

def _nonzero_rows(rng: np.random.Generator, rows: int, cols: int,
                  low: int, high: int) -> np.ndarray:
    A = rng.integers(low, high + 1, size=(rows, cols)).astype(float)
    for i in range(rows):
        while not A[i].any():
            A[i] = rng.integers(low, high + 1, size=cols).astype(float)
    return A


def random_instance(
    seed: int, d: int, m: int, n: int, kind: str = "feasible"
) -> GeneralLP:
    """Reproducible integer-coefficient instance with a planted outcome.

    ``feasible`` plants an interior point inside a finite box, so the oracle
    always reports Optimal. ``infeasible`` adds a contradictory equality
    pair. ``unbounded`` drops the upper bounds and aims the objective along a
    coordinate ray no constraint blocks. The same seed yields bit-identical
    data.
    """
    if d > 8:
        raise SizeOutOfRange("random instances are capped at d <= 8 for the oracle")
    if kind not in ("feasible", "infeasible", "unbounded"):
        raise ValueError(f"unknown kind {kind!r}")
    rng = np.random.default_rng(seed)

    if kind == "unbounded":
        A_ineq = _nonzero_rows(rng, n, d, 0, 9)
        x0 = rng.integers(0, 4, size=d).astype(float)
        slack = rng.integers(0, 7, size=n).astype(float)
        b_ineq = A_ineq @ x0 - slack
        c = rng.integers(0, 10, size=d).astype(float)
        c[rng.integers(0, d)] = -float(rng.integers(1, 10))
        return GeneralLP(c=c, A_ineq=A_ineq, b_ineq=b_ineq,
                         lower=np.zeros(d), upper=np.full(d, np.inf),
                         names={"family": "random", "seed": seed, "kind": kind})

    A_eq = _nonzero_rows(rng, m, d, -9, 9) if m else np.zeros((0, d))
    A_ineq = _nonzero_rows(rng, n, d, -9, 9) if n else np.zeros((0, d))
    x0 = rng.integers(-3, 4, size=d).astype(float)
    b_eq = A_eq @ x0
    slack = rng.integers(0, 7, size=n).astype(float)
    b_ineq = A_ineq @ x0 - slack
    c = rng.integers(-9, 10, size=d).astype(float)

    if kind == "infeasible":
        row = _nonzero_rows(rng, 1, d, -9, 9)
        A_eq = np.vstack([A_eq, row, row])
        rhs = float(row[0] @ x0)
        b_eq = np.concatenate([b_eq, [rhs], [rhs + 3.0]])

    return GeneralLP(c=c, A_eq=A_eq, b_eq=b_eq, A_ineq=A_ineq, b_ineq=b_ineq,
                     lower=np.full(d, -12.0), upper=np.full(d, 12.0),
                     names={"family": "random", "seed": seed, "kind": kind})


@dataclass(frozen=True)
class InstanceSpec:
    """Pure description of a generated instance; building it twice gives
    bit-identical problems."""

    family: str                     # km1 | km2 | cycling | random
    d: int = 0
    seed: int = 0
    m: int = 0
    n: int = 0
    kind: str = "feasible"
    fixture: str | None = None

    def build(self) -> GeneralLP:
        if self.family == "km1":
            return klee_minty_v1(self.d)
        if self.family == "km2":
            return klee_minty_v2(self.d)
        if self.family == "cycling":
            return cycling_fixture(self.fixture or "beale")
        if self.family == "random":
            return random_instance(self.seed, self.d, self.m, self.n, self.kind)
        raise UnknownFixture(f"unknown family {self.family!r}")
