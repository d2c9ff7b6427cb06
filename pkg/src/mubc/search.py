"""Certificates, equivalences, and extension searches for unbiased sets.

Three kinds of question about a set of directions with pairwise unsigned
symplectic products equal to a common K:

* certify_no_fourth: for an N = 1 triple, witness that no fourth direction
  exists by solving all eight sign-pattern linear systems and recording
  each contradiction.
* find_equivalence: hunt for a rescaled unsigned symplectic map carrying
  one triple onto another up to ordering and per-vector signs.
* search_extension / enumerate_triples_n1: look for additional product
  vectors, either by seeded multi-start descent over real factor
  coordinates or by exhaustive enumeration over the golden lattice.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    ContextMismatch,
    DimensionMismatch,
    InvalidProblem,
    PreconditionFailed,
)
from .exact import GOLDEN, QuadNum
from .symplectic import (
    EXACT,
    NUMERIC,
    DirectionVector,
    MUConfiguration,
    ProductVector,
    Scalar,
    UnsignedSymplecticMatrix,
    config_from_json,
    config_to_json,
    symp2,
    symp_product,
    verify_mu,
)

# -- fourth-vector infeasibility certificates ---------------------------


def _is_exact_scalar(x: Scalar) -> bool:
    return isinstance(x, (QuadNum, Fraction, int))


def _div(x: Scalar, y: Scalar) -> Scalar:
    if isinstance(x, QuadNum) or isinstance(y, QuadNum):
        if not isinstance(x, QuadNum):
            x = QuadNum(x, 0, y.ambient)
        return x / y
    if _is_exact_scalar(x) and _is_exact_scalar(y):
        return Fraction(x) / Fraction(y)
    return x / y


@dataclass(frozen=True)
class SignPatternRecord:
    """Outcome of one of the eight sign-pattern linear systems."""

    signs: tuple[int, int, int]
    solution: DirectionVector | None
    residual: float
    consistent: bool
    rank_coeff: int
    rank_aug: int
    note: str = ""

    def to_json(self) -> dict:
        return {
            "signs": list(self.signs),
            "solution": None if self.solution is None else [
                str(self.solution.q), str(self.solution.p)
            ],
            "residual": self.residual,
            "consistent": self.consistent,
            "rank_coeff": self.rank_coeff,
            "rank_aug": self.rank_aug,
            "note": self.note,
        }


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """All eight sign patterns contradicted: no fourth direction exists."""

    directions: tuple[DirectionVector, DirectionVector, DirectionVector]
    target_k: Scalar
    records: tuple[SignPatternRecord, ...]

    @property
    def valid(self) -> bool:
        return len(self.records) == 8 and not any(r.consistent for r in self.records)

    def to_json(self) -> dict:
        return {
            "target_k": str(self.target_k),
            "directions": [[str(d.q), str(d.p)] for d in self.directions],
            "valid": self.valid,
            "records": [r.to_json() for r in self.records],
        }


@dataclass(frozen=True)
class CounterexampleFound:
    """A fourth direction satisfying one sign pattern (never reachable for
    a genuine unbiased triple; kept for honesty of the return contract)."""

    direction: DirectionVector
    signs: tuple[int, int, int]

    def to_json(self) -> dict:
        return {
            "direction": [str(self.direction.q), str(self.direction.p)],
            "signs": list(self.signs),
        }


def _scalar_is_zero(x: Scalar, tolerance: float, scale: float) -> bool:
    if isinstance(x, float):
        return abs(x) <= tolerance * scale
    return x == 0


def _pattern_solution(
    a: DirectionVector,
    b: DirectionVector,
    c: DirectionVector,
    k: Scalar,
    signs: tuple[int, int, int],
    tolerance: float,
) -> SignPatternRecord:
    """Solve symp2(d, a) = s1 k, symp2(d, b) = s2 k; test symp2(d, c) = s3 k.

    The 2x2 system is nonsingular whenever a and b are non-parallel; the
    degenerate case falls back to rank analysis of the stacked 3x2 system.
    """
    s1, s2, s3 = signs
    k_float = float(k)
    # Row for constraint against x: (-x.p) dq + (x.q) dp = s k
    det = a.q * b.p - a.p * b.q  # = -symp2(a, b)
    if not _scalar_is_zero(det, tolerance, max(1.0, k_float)):
        e = s1 * k
        f = s2 * k
        # Cramer on [[-a.p, a.q], [-b.p, b.q]] (dq, dp) = (e, f)
        dq = _div(e * b.q - a.q * f, det)
        dp = _div((-a.p) * f - e * (-b.p), det)
        d = DirectionVector(dq, dp)
        check1 = symp2(d, a) - e
        check2 = symp2(d, b) - f
        scale = max(1.0, k_float)
        if not (_scalar_is_zero(check1, 1e-9, scale) and _scalar_is_zero(check2, 1e-9, scale)):
            raise ArithmeticError("linear solve failed self-check")
        residual = symp2(d, c) - s3 * k
        consistent = _scalar_is_zero(residual, tolerance, max(1.0, k_float))
        return SignPatternRecord(
            signs=signs,
            solution=d,
            residual=float(residual),
            consistent=consistent,
            rank_coeff=2,
            rank_aug=2 if consistent else 3,
        )
    # Degenerate pair: rank analysis over all three constraints.
    rows = [(-a.p, a.q, s1 * k), (-b.p, b.q, s2 * k), (-c.p, c.q, s3 * k)]
    pivot = next(
        (row for row in rows if not (_scalar_is_zero(row[0], tolerance, 1.0) and _scalar_is_zero(row[1], tolerance, 1.0))),
        None,
    )
    if pivot is None:
        return SignPatternRecord(signs, None, math.inf, False, 0, 1, "all-zero rows")
    consistent = True
    for row in rows:
        # proportionality of (row | rhs) against the pivot row
        cross1 = row[0] * pivot[1] - row[1] * pivot[0]
        cross2 = row[0] * pivot[2] - row[2] * pivot[0]
        cross3 = row[1] * pivot[2] - row[2] * pivot[1]
        scale = max(1.0, k_float)
        if not _scalar_is_zero(cross1, tolerance, scale):
            return SignPatternRecord(signs, None, math.inf, False, 2, 3, "rank jump in coefficients")
        if not (_scalar_is_zero(cross2, tolerance, scale) and _scalar_is_zero(cross3, tolerance, scale)):
            consistent = False
    if not consistent:
        return SignPatternRecord(signs, None, math.inf, False, 1, 2, "inconsistent parallel constraints")
    if _scalar_is_zero(pivot[1], tolerance, 1.0):
        d = DirectionVector(_div(pivot[2], pivot[0]), 0 * pivot[2])
    else:
        d = DirectionVector(0 * pivot[2], _div(pivot[2], pivot[1]))
    return SignPatternRecord(signs, d, 0.0, True, 1, 1, "rank-1 consistent family")


def certify_no_fourth(
    a: DirectionVector,
    b: DirectionVector,
    c: DirectionVector,
    k: Scalar,
    tolerance: float = 1e-12,
) -> InfeasibilityCertificate | CounterexampleFound:
    """Case-split witness that no fourth direction joins an N = 1 triple.

    Any fourth direction d must satisfy symp2(d, x) = +/- k for each x in
    the triple; all 2^3 sign patterns are solved explicitly and each must
    contradict the remaining constraint.
    """
    k_float = float(k)
    if k_float <= 0:
        raise PreconditionFailed(f"k must be positive, got {k}")
    for x, y in ((a, b), (b, c), (a, c)):
        value = symp2(x, y)
        mag = abs(value)
        ok = (mag == k) if not isinstance(mag, float) else abs(mag - k_float) <= tolerance * k_float
        if not ok:
            raise PreconditionFailed(
                f"pair ({x}, {y}) has |product| {mag}, not the target {k}"
            )
    records = []
    for signs in itertools.product((1, -1), repeat=3):
        record = _pattern_solution(a, b, c, k, signs, tolerance)
        if record.consistent and record.solution is not None:
            confirm = verify_mu(
                MUConfiguration(
                    tuple(ProductVector((v,)) for v in (a, b, c, record.solution)),
                    k,
                    mode=EXACT if _is_exact_scalar(record.solution.q) else NUMERIC,
                ),
                tolerance=max(tolerance, 1e-9),
            )
            if confirm.verdict:
                return CounterexampleFound(record.solution, signs)
            record = SignPatternRecord(
                record.signs, record.solution, record.residual, False,
                record.rank_coeff, record.rank_aug,
                "pattern solvable but full verification fails",
            )
        records.append(record)
    return InfeasibilityCertificate((a, b, c), k, tuple(records))


# -- equivalence of triples ---------------------------------------------


@dataclass(frozen=True)
class Equivalence:
    """lambda * m carries triple A onto triple B up to order and signs."""

    matrix: UnsignedSymplecticMatrix
    scale: float
    permutation: tuple[int, int, int]
    signs: tuple[int, int, int]
    residual: float

    def to_json(self) -> dict:
        return {
            "matrix": [[float(x) for x in row] for row in self.matrix.entries],
            "matrix_sign": self.matrix.sign,
            "scale": self.scale,
            "permutation": list(self.permutation),
            "signs": list(self.signs),
            "residual": self.residual,
        }


def _triple_floats(config: MUConfiguration) -> list[np.ndarray]:
    if config.n != 1 or len(config.vectors) != 3:
        raise DimensionMismatch("equivalence search expects N = 1 triples")
    return [np.array(v.factors[0].as_floats()) for v in config.vectors]


def find_equivalence(
    config_a: MUConfiguration,
    config_b: MUConfiguration,
    tolerance: float = 1e-10,
) -> Equivalence | None:
    """Search the 6 orderings x 4 sign choices for a linear equivalence.

    For each candidate, the matrix is solved linearly from two vector
    correspondences and checked on the third; the determinant fixes the
    positive scale lambda with |det m| = 1. Returns None when no candidate
    survives.
    """
    avs = _triple_floats(config_a)
    bvs = _triple_floats(config_b)
    a_cols = np.column_stack([avs[0], avs[1]])
    if abs(np.linalg.det(a_cols)) < 1e-14:
        raise PreconditionFailed("first two vectors of A are parallel")
    for perm in itertools.permutations(range(3)):
        for s1, s2 in itertools.product((1, -1), repeat=2):
            target = np.column_stack([s1 * bvs[perm[0]], s2 * bvs[perm[1]]])
            try:
                m_scaled = target @ np.linalg.inv(a_cols)
            except np.linalg.LinAlgError:
                continue
            det = np.linalg.det(m_scaled)
            if abs(det) < 1e-14:
                continue
            mapped = m_scaled @ avs[2]
            reference = np.linalg.norm(bvs[perm[2]]) + 1.0
            best_s3 = None
            best_gap = math.inf
            for s3 in (1, -1):
                gap = float(np.linalg.norm(mapped - s3 * bvs[perm[2]]))
                if gap < best_gap:
                    best_gap = gap
                    best_s3 = s3
            if best_gap > tolerance * reference:
                continue
            lam = math.sqrt(abs(det))
            m = m_scaled / lam
            matrix = UnsignedSymplecticMatrix.from_rows(
                ((float(m[0, 0]), float(m[0, 1])), (float(m[1, 0]), float(m[1, 1]))),
                tolerance=1e-8,
            )
            return Equivalence(
                matrix=matrix,
                scale=lam,
                permutation=perm,
                signs=(s1, s2, best_s3),
                residual=best_gap,
            )
    return None


# -- extension search ----------------------------------------------------

REAL = "real"
GOLDEN_LATTICE = "golden-lattice"


@dataclass(frozen=True)
class SearchProblem:
    """Seeds plus free slots to fill, over a choice of coefficient domain."""

    target_k: Scalar
    seeds: tuple[ProductVector, ...]
    free_slots: int
    domain: str = REAL
    height: int = 3
    hbar: float = 1.0

    def __post_init__(self) -> None:
        if self.domain not in (REAL, GOLDEN_LATTICE):
            raise InvalidProblem(f"unknown domain {self.domain!r}")
        if self.free_slots < 0:
            raise InvalidProblem("free_slots must be nonnegative")
        if not self.seeds:
            raise InvalidProblem("at least one seed vector is required")
        if self.domain == GOLDEN_LATTICE and self.height < 1:
            raise InvalidProblem("lattice height must be at least 1")

    @property
    def n(self) -> int:
        return self.seeds[0].n

    def to_json(self) -> dict:
        mode = EXACT if self.domain == GOLDEN_LATTICE else NUMERIC
        config = MUConfiguration(self.seeds, self.target_k, self.hbar, mode)
        data = config_to_json(config)
        return {
            "N": self.n,
            "mode": mode,
            "K": data["K"],
            "seeds": data["vectors"],
            "free_slots": self.free_slots,
            "domain": self.domain,
            "height": self.height,
            "hbar": self.hbar,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SearchProblem":
        if not isinstance(data, dict):
            raise InvalidProblem("search problem must be a JSON object")
        for key in ("K", "seeds", "free_slots", "domain"):
            if key not in data:
                raise InvalidProblem(f"search problem is missing {key!r}")
        domain = data["domain"]
        mode = EXACT if domain == GOLDEN_LATTICE else NUMERIC
        config = config_from_json(
            {
                "N": data.get("N"),
                "mode": data.get("mode", mode),
                "hbar": data.get("hbar", 1.0),
                "K": data["K"],
                "vectors": data["seeds"],
                **({"ambient": data["ambient"]} if "ambient" in data else {}),
            }
        )
        return cls(
            target_k=config.target_k,
            seeds=config.vectors,
            free_slots=int(data["free_slots"]),
            domain=domain,
            height=int(data.get("height", 3)),
            hbar=float(data.get("hbar", 1.0)),
        )


@dataclass(frozen=True)
class SearchReport:
    outcome: str  # "extended" | "no-improvement" | "exhausted"
    vectors: tuple[ProductVector, ...]
    residual: float
    best_objective: float
    evaluations: int
    iterations: int
    restarts_used: int
    wall_time: float
    seed: int | None
    # every exact completion found (lattice mode enumerates all of them;
    # each entry is one filling of the free slots)
    solutions: tuple[tuple[ProductVector, ...], ...] = ()

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "vectors": [
                [[str(f.q), str(f.p)] for f in v.factors] for v in self.vectors
            ],
            "residual": self.residual,
            "best_objective": self.best_objective,
            "evaluations": self.evaluations,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
            "wall_time": self.wall_time,
            "seed": self.seed,
            "solutions": [
                [[[str(f.q), str(f.p)] for f in v.factors] for v in sol]
                for sol in self.solutions
            ],
        }


GRAD_TOL = 1e-10
STEP_TOL = 1e-14


def _seed_check(problem: SearchProblem) -> None:
    mode = EXACT if problem.domain == GOLDEN_LATTICE else NUMERIC
    if len(problem.seeds) >= 2:
        config = MUConfiguration(problem.seeds, problem.target_k, problem.hbar, mode)
        report = verify_mu(config, tolerance=1e-9)
        if not report.verdict:
            raise PreconditionFailed("seed vectors do not verify at the target K")


def _real_pack(problem: SearchProblem, charts: tuple[int, ...], x: np.ndarray) -> list[list[tuple[float, float]]]:
    """Free vectors as (q, p) float pairs from gauge-fixed coordinates."""
    vectors = []
    idx = 0
    pos = 0
    for _ in range(problem.free_slots):
        factors = []
        for _ in range(problem.n):
            if charts[idx] == 0:
                factors.append((1.0, float(x[pos])))
                pos += 1
            else:
                factors.append((0.0, 1.0))
            idx += 1
        vectors.append(factors)
    return vectors


def _real_objective(
    problem: SearchProblem,
    charts: tuple[int, ...],
    seeds: list[list[tuple[float, float]]],
    log_k: float,
    x: np.ndarray,
    want_grad: bool,
) -> tuple[float, np.ndarray | None]:
    free = _real_pack(problem, charts, x)
    all_vectors = seeds + free
    n_free = len(free)
    n_seeds = len(seeds)
    total = 0.0
    grad = np.zeros_like(x) if want_grad else None
    # map (slot, factor) -> position in x
    positions = {}
    pos = 0
    idx = 0
    for slot in range(problem.free_slots):
        for factor in range(problem.n):
            if charts[idx] == 0:
                positions[(slot, factor)] = pos
                pos += 1
            idx += 1
    for i in range(len(all_vectors)):
        for j in range(i + 1, len(all_vectors)):
            if i < n_seeds and j < n_seeds:
                continue  # constant contribution; exactly zero for verified seeds
            va, vb = all_vectors[i], all_vectors[j]
            factor_products = [
                va[f][1] * vb[f][0] - va[f][0] * vb[f][1] for f in range(problem.n)
            ]
            sp = 1.0
            for fp in factor_products:
                sp *= fp
            if sp == 0.0:
                return math.inf, grad
            diff = math.log(abs(sp)) - log_k
            total += diff * diff
            if not want_grad:
                continue
            for f in range(problem.n):
                rest = 1.0
                for g in range(problem.n):
                    if g != f:
                        rest *= factor_products[g]
                if i >= n_seeds:
                    key = (i - n_seeds, f)
                    if key in positions:
                        # d symp2 / d (va[f].p) = vb[f].q
                        dsp = vb[f][0] * rest
                        grad[positions[key]] += 2.0 * diff * dsp / sp
                if j >= n_seeds:
                    key = (j - n_seeds, f)
                    if key in positions:
                        dsp = -va[f][0] * rest
                        grad[positions[key]] += 2.0 * diff * dsp / sp
    return total, grad


def real_objective_fn(problem: SearchProblem, charts: tuple[int, ...] | None = None):
    """Expose the gauge-fixed objective and gradient (used by tests)."""
    _seed_check(problem)
    if charts is None:
        charts = tuple([0] * (problem.free_slots * problem.n))
    seeds = [[f.as_floats() for f in v.factors] for v in problem.seeds]
    log_k = math.log(float(problem.target_k))

    def fn(x: np.ndarray, want_grad: bool = True):
        return _real_objective(problem, charts, seeds, log_k, np.asarray(x, dtype=float), want_grad)

    return fn


def _chart_sequence(problem: SearchProblem) -> list[tuple[int, ...]]:
    dims = problem.free_slots * problem.n
    combos = sorted(itertools.product((0, 1), repeat=dims), key=lambda c: sum(c))
    return combos


def _search_real(problem: SearchProblem, budget: int, restarts: int, seed: int) -> SearchReport:
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    charts_all = _chart_sequence(problem)
    rich = charts_all[0]
    others = charts_all[1:]
    seeds = [[f.as_floats() for f in v.factors] for v in problem.seeds]
    log_k = math.log(float(problem.target_k))
    evaluations = 0
    iterations = 0
    best_val = math.inf
    best_vectors: list[list[tuple[float, float]]] = []
    restarts_used = 0
    for r in range(restarts):
        if evaluations >= budget:
            break
        restarts_used += 1
        if others and r % 2 == 1:
            charts = others[(r // 2) % len(others)]
        else:
            charts = rich
        dims = charts.count(0)
        x = rng.uniform(-3.0, 3.0, size=dims)
        fx, gx = _real_objective(problem, charts, seeds, log_k, x, True)
        evaluations += 1
        for _ in range(400):
            if evaluations >= budget or not math.isfinite(fx):
                break
            gnorm = float(np.linalg.norm(gx)) if gx is not None and dims else 0.0
            if gnorm < GRAD_TOL:
                break
            step = 1.0
            accepted = False
            while step * gnorm >= STEP_TOL:
                x_new = x - step * gx
                f_new, _ = _real_objective(problem, charts, seeds, log_k, x_new, False)
                evaluations += 1
                if f_new <= fx - 1e-4 * step * gnorm * gnorm:
                    accepted = True
                    break
                step *= 0.5
                if evaluations >= budget:
                    break
            if not accepted:
                break
            x = x_new
            fx, gx = _real_objective(problem, charts, seeds, log_k, x, True)
            evaluations += 1
            iterations += 1
        if math.isfinite(fx) and fx < best_val:
            best_val = fx
            best_vectors = _real_pack(problem, charts, x)
    found = [
        ProductVector(tuple(DirectionVector(q, p) for q, p in factors))
        for factors in best_vectors
    ]
    residual = math.inf
    outcome = "no-improvement"
    if found:
        config = MUConfiguration(
            problem.seeds + tuple(found), problem.target_k, problem.hbar, NUMERIC
        )
        report = verify_mu(config, tolerance=1e-9)
        residual = report.max_deviation
        if report.verdict:
            outcome = "extended"
    return SearchReport(
        outcome=outcome,
        vectors=tuple(found),
        residual=residual,
        best_objective=best_val,
        evaluations=evaluations,
        iterations=iterations,
        restarts_used=restarts_used,
        wall_time=time.perf_counter() - start,
        seed=seed,
        solutions=(tuple(found),) if outcome == "extended" else (),
    )


# golden-lattice arithmetic on integer coefficient pairs (p, q) ~ p + q R


def _g_mul(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return (a[0] * b[0] + a[1] * b[1], a[0] * b[1] + a[1] * b[0] + a[1] * b[1])


def _g_sub(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return (a[0] - b[0], a[1] - b[1])


_PHI = (1.0 + math.sqrt(5.0)) / 2.0


def _g_float(a: tuple[int, int]) -> float:
    return a[0] + a[1] * _PHI


def _lattice_scalar(x: Scalar) -> tuple[int, int]:
    if isinstance(x, int):
        return (x, 0)
    if isinstance(x, Fraction):
        if x.denominator != 1:
            raise InvalidProblem(f"lattice scalars must be integral, got {x}")
        return (x.numerator, 0)
    if isinstance(x, QuadNum):
        if x.ambient != GOLDEN:
            raise InvalidProblem("lattice search is defined over the golden ambient")
        if x.p.denominator != 1 or x.q.denominator != 1:
            raise InvalidProblem(f"lattice scalars must be integral, got {x}")
        return (x.p.numerator, x.q.numerator)
    raise InvalidProblem(f"lattice scalars must be exact, got {type(x).__name__}")


def _lattice_components(height: int) -> list[tuple[int, int]]:
    p_bound = max(height, 1)
    out = []
    for p in range(-p_bound, p_bound + 1):
        for q in range(-height, height + 1):
            out.append((p, q))
    return out


def _lattice_symp2(
    fa: tuple[tuple[int, int], tuple[int, int]],
    fb: tuple[tuple[int, int], tuple[int, int]],
) -> tuple[int, int]:
    return _g_sub(_g_mul(fa[1], fb[0]), _g_mul(fa[0], fb[1]))


def _quadnum_direction(f: tuple[tuple[int, int], tuple[int, int]]) -> DirectionVector:
    return DirectionVector(
        QuadNum(f[0][0], f[0][1], GOLDEN), QuadNum(f[1][0], f[1][1], GOLDEN)
    )


def _search_lattice(problem: SearchProblem, budget: int, seed: int | None) -> SearchReport:
    start = time.perf_counter()
    k_pair = _lattice_scalar(problem.target_k)
    neg_k = (-k_pair[0], -k_pair[1])
    k_float = abs(_g_float(k_pair))
    seeds = [
        tuple(
            (_lattice_scalar(f.q), _lattice_scalar(f.p)) for f in v.factors
        )
        for v in problem.seeds
    ]
    components = _lattice_components(problem.height)
    factor_choices = [
        (qc, pc)
        for qc in components
        for pc in components
        if not (qc == (0, 0) and pc == (0, 0))
    ]
    n = problem.n
    evaluations = 0
    best_residual = math.inf
    best_vectors: list[tuple] = []
    solutions: list[tuple[tuple, ...]] = []
    exhausted = True

    def residual_of(vectors: list[tuple]) -> float:
        worst = 0.0
        everything = seeds + vectors
        for i in range(len(everything)):
            for j in range(i + 1, len(everything)):
                if i < len(seeds) and j < len(seeds):
                    continue
                sp = (1, 0)
                for f in range(n):
                    sp = _g_mul(sp, _lattice_symp2(everything[i][f], everything[j][f]))
                worst = max(worst, abs(abs(_g_float(sp)) - k_float) / k_float)
        return worst

    def extend(chosen: list[tuple], depth: int) -> None:
        nonlocal evaluations, best_residual, best_vectors, exhausted
        if depth == problem.free_slots:
            solutions.append(tuple(chosen))
            return
        for candidate in itertools.product(factor_choices, repeat=n):
            if evaluations >= budget:
                exhausted = False
                return
            evaluations += 1
            ok = True
            for other in seeds + chosen:
                sp = (1, 0)
                for f in range(n):
                    sp = _g_mul(sp, _lattice_symp2(candidate[f], other[f]))
                if sp != k_pair and sp != neg_k:
                    ok = False
                    break
            if ok:
                chosen.append(tuple(candidate))
                extend(chosen, depth + 1)
                chosen.pop()
            elif problem.free_slots == 1 and not solutions:
                r = residual_of([tuple(candidate)])
                if r < best_residual:
                    best_residual = r
                    best_vectors = [tuple(candidate)]

    if problem.free_slots > 0:
        extend([], 0)
    if problem.free_slots == 0:
        outcome = "exhausted"
        vectors: list[tuple] = []
        residual = 0.0
    elif solutions:
        outcome = "extended"
        vectors = list(solutions[0])
        residual = 0.0
    else:
        outcome = "exhausted" if exhausted else "no-improvement"
        vectors = best_vectors
        residual = best_residual
    built = tuple(
        ProductVector(tuple(_quadnum_direction(f) for f in vec)) for vec in vectors
    )
    built_solutions = tuple(
        tuple(ProductVector(tuple(_quadnum_direction(f) for f in vec)) for vec in sol)
        for sol in solutions
    )
    if built:
        # the reported residual must match an independent re-verification
        confirm = verify_mu(
            MUConfiguration(problem.seeds + built, problem.target_k, problem.hbar, EXACT),
            tolerance=0.0,
        )
        if outcome == "extended":
            residual = confirm.max_deviation
    return SearchReport(
        outcome=outcome,
        vectors=built,
        residual=residual,
        best_objective=residual,
        evaluations=evaluations,
        iterations=0,
        restarts_used=0,
        wall_time=time.perf_counter() - start,
        seed=seed,
        solutions=built_solutions,
    )


def search_extension(
    problem: SearchProblem,
    budget: int = 200000,
    restarts: int = 40,
    seed: int | None = None,
) -> SearchReport:
    """Look for free-slot vectors completing the seeds to a larger MU set.

    Real domain: seeded multi-start gradient descent with backtracking on
    the summed squared log-residuals, over gauge-fixed factor coordinates
    (first nonzero component of each factor pinned to 1; factors with zero
    first component use the complementary chart). Golden-lattice domain:
    exhaustive lexicographic enumeration with exact verification.
    """
    _seed_check(problem)
    if problem.free_slots == 0:
        return SearchReport(
            outcome="exhausted",
            vectors=(),
            residual=0.0,
            best_objective=0.0,
            evaluations=0,
            iterations=0,
            restarts_used=0,
            wall_time=0.0,
            seed=seed,
        )
    if problem.domain == REAL:
        if seed is None:
            raise InvalidProblem("real-domain search requires a seed")
        return _search_real(problem, budget, restarts, seed)
    return _search_lattice(problem, budget, seed)


def enumerate_triples_n1(k: Scalar, height: int) -> list[MUConfiguration]:
    """All equivalence classes of N = 1 golden-lattice triples at level k.

    Enumerates lattice directions with rational parts bounded by max(height, 1)
    and golden parts by height, keeps triangles whose three pairwise unsigned
    products equal k exactly, and deduplicates by linear equivalence.
    """
    if height < 0:
        raise InvalidProblem("height must be nonnegative")
    k_pair = _lattice_scalar(k)
    neg_k = (-k_pair[0], -k_pair[1])
    components = _lattice_components(height)
    vectors = []
    seen = set()
    for qc in components:
        for pc in components:
            if qc == (0, 0) and pc == (0, 0):
                continue
            head = qc if qc != (0, 0) else pc
            # canonical sign: first nonzero component positive in embedding
            if _g_float(head) < 0:
                qc2, pc2 = (-qc[0], -qc[1]), (-pc[0], -pc[1])
            else:
                qc2, pc2 = qc, pc
            if (qc2, pc2) not in seen:
                seen.add((qc2, pc2))
                vectors.append((qc2, pc2))
    adjacency: dict[int, set[int]] = {i: set() for i in range(len(vectors))}
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            sp = _lattice_symp2(vectors[i], vectors[j])
            if sp == k_pair or sp == neg_k:
                adjacency[i].add(j)
                adjacency[j].add(i)
    classes: list[MUConfiguration] = []
    for i in range(len(vectors)):
        for j in sorted(adjacency[i]):
            if j <= i:
                continue
            for l in sorted(adjacency[i] & adjacency[j]):
                if l <= j:
                    continue
                triple = MUConfiguration(
                    tuple(
                        ProductVector((_quadnum_direction(vectors[t]),))
                        for t in (i, j, l)
                    ),
                    QuadNum(k_pair[0], k_pair[1], GOLDEN),
                    mode=EXACT,
                )
                if any(find_equivalence(rep, triple) is not None for rep in classes):
                    continue
                classes.append(triple)
    return classes
