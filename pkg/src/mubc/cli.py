"""Command-line front end: verification, search, metaplectic computations,
oracle runs, and a one-shot reproduction of the bundled numeric claims.

Exit codes: 0 success / verdict true, 1 verdict false or nothing found,
2 input error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import importlib.resources
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ContextMismatch,
    DegenerateBlock,
    DimensionMismatch,
    DivisionByZero,
    ExactSqrtUnavailable,
    InvalidDirection,
    InvalidProblem,
    InvalidTarget,
    LimitExceeded,
    MubcError,
    NonInvertible,
    NotRealEmbeddable,
    ParallelDirections,
    PreconditionFailed,
    SingularCayley,
)
from .exact import GOLDEN, QuadNum
from .metaplectic import (
    MetaplecticSpec,
    compose_overlap_sq,
    genmu_overlap_sq,
    rotation_matrix,
    special_m,
    symplectic_defect,
)
from .oracle import (
    ChirpState,
    direction_for_angle,
    overlap_quadrature,
    pairwise_unbiased_scan,
)
from .search import (
    CounterexampleFound,
    InfeasibilityCertificate,
    SearchProblem,
    certify_no_fourth,
    enumerate_triples_n1,
    find_equivalence,
    search_extension,
)
from .symplectic import (
    EXACT,
    NUMERIC,
    DirectionVector,
    MUConfiguration,
    ProductVector,
    config_from_json,
    config_to_json,
    overlap_magnitude_sq,
    verify_mu,
)

OK = 0
FALSE = 1
INPUT_ERROR = 2
NO_CONVERGENCE = 3

_INPUT_ERRORS = (
    ContextMismatch,
    DegenerateBlock,
    DimensionMismatch,
    DivisionByZero,
    ExactSqrtUnavailable,
    InvalidDirection,
    InvalidProblem,
    InvalidTarget,
    LimitExceeded,
    NonInvertible,
    NotRealEmbeddable,
    ParallelDirections,
    PreconditionFailed,
    SingularCayley,
)


class _Failure(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def _load_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Failure(INPUT_ERROR, f"input error: {path}: {exc.strerror or exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _Failure(
            INPUT_ERROR, f"input error: {path}:{exc.lineno}:{exc.colno}: {exc.msg}"
        )


def _write_json(path: str | None, data) -> None:
    if path:
        Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def _write_csv(path: str | None, fieldnames: Sequence[str], rows: Sequence[dict]) -> None:
    if not path:
        return
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(fieldnames))
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _load_config(path: str, args) -> MUConfiguration:
    config = config_from_json(_load_json(path))
    if getattr(args, "mode", None) and config.mode != args.mode:
        raise _Failure(
            INPUT_ERROR,
            f"input error: {path}: field 'mode' is {config.mode!r}, "
            f"--mode requested {args.mode!r}",
        )
    if getattr(args, "hbar", None) is not None:
        config = MUConfiguration(
            config.vectors, config.target_k, args.hbar, config.mode, config.ambient
        )
    return config


# -- verify ---------------------------------------------------------------


def cmd_verify(args) -> int:
    config = _load_config(args.config, args)
    tolerance = args.tolerance if args.tolerance is not None else 1e-12
    report = verify_mu(config, tolerance=tolerance, infer_k=args.infer_k)
    print(f"verdict: {'MU' if report.verdict else 'not MU'}")
    print(f"mode: {report.mode}  vectors: {len(config.vectors)}  N: {config.n}")
    k_text = "inferred " if report.inferred else ""
    print(f"target K: {k_text}{_fmt(report.target_k)}")
    print(f"max relative deviation: {_fmt(report.max_deviation)}")
    if report.parallel_pairs:
        print(f"parallel pairs: {report.parallel_pairs}")
    print(f"{'i':>3} {'j':>3} {'|product|':>22} {'deviation':>12} {'unbiased':>9}")
    for pair in report.pairs:
        print(
            f"{pair.i:>3} {pair.j:>3} {_fmt(pair.magnitude):>22} "
            f"{_fmt(pair.deviation):>12} {_fmt(pair.unbiased):>9}"
        )
    _write_json(args.out, report.to_json())
    _write_csv(
        args.csv,
        ["i", "j", "magnitude", "deviation", "parallel", "unbiased"],
        [
            {
                "i": p.i,
                "j": p.j,
                "magnitude": _fmt(p.magnitude),
                "deviation": p.deviation,
                "parallel": p.parallel,
                "unbiased": p.unbiased,
            }
            for p in report.pairs
        ],
    )
    return OK if report.verdict else FALSE


# -- search ---------------------------------------------------------------


def _pair_residual_table(problem: SearchProblem, report) -> list[dict]:
    mode = EXACT if problem.domain == "golden-lattice" else NUMERIC
    vectors = tuple(problem.seeds) + tuple(report.vectors)
    if len(vectors) < 2:
        return []
    combined = MUConfiguration(vectors, problem.target_k, problem.hbar, mode)
    checked = verify_mu(combined, tolerance=1e-6)
    return [
        {
            "i": pair.i,
            "j": pair.j,
            "magnitude": _fmt(pair.magnitude),
            "deviation": pair.deviation,
        }
        for pair in checked.pairs
    ]


def cmd_search(args) -> int:
    problem = SearchProblem.from_json(_load_json(args.problem))
    report = search_extension(
        problem, budget=args.budget, restarts=args.restarts, seed=args.seed
    )
    print(f"outcome: {report.outcome}")
    print(
        f"evaluations: {report.evaluations}  iterations: {report.iterations}  "
        f"restarts: {report.restarts_used}  wall: {report.wall_time:.3f}s"
    )
    print(f"best objective: {_fmt(report.best_objective)}")
    print(f"residual: {_fmt(report.residual)}")
    for idx, vector in enumerate(report.vectors):
        factors = "  ".join(f"({_fmt(f.q)}, {_fmt(f.p)})" for f in vector.factors)
        print(f"vector {idx}: {factors}")
    blob = report.to_json()
    blob["pair_residuals"] = _pair_residual_table(problem, report)
    _write_json(args.out, blob)
    return OK if report.outcome == "extended" else FALSE


# -- certify-n1 -----------------------------------------------------------


def _triple_directions(config: MUConfiguration, path: str) -> tuple:
    if config.n != 1 or len(config.vectors) != 3:
        raise _Failure(
            INPUT_ERROR,
            f"input error: {path}: field 'vectors' must hold exactly three N=1 vectors",
        )
    return tuple(v.factors[0] for v in config.vectors)


def cmd_certify(args) -> int:
    config = _load_config(args.config, args)
    a, b, c = _triple_directions(config, args.config)
    if config.target_k is None:
        raise _Failure(INPUT_ERROR, f"input error: {args.config}: field 'K' is required")
    tolerance = args.tolerance if args.tolerance is not None else 1e-12
    result = certify_no_fourth(a, b, c, config.target_k, tolerance=tolerance)
    if isinstance(result, CounterexampleFound):
        print("counterexample: a fourth direction exists")
        print(f"direction: ({_fmt(result.direction.q)}, {_fmt(result.direction.p)})")
        print(f"signs: {result.signs}")
        _write_json(args.out, result.to_json())
        return FALSE
    print(f"certificate valid: {_fmt(result.valid)}")
    print(f"{'signs':>12} {'solution':>34} {'residual':>14} {'consistent':>10}")
    for record in result.records:
        sol = (
            "none"
            if record.solution is None
            else f"({_fmt(record.solution.q)}, {_fmt(record.solution.p)})"
        )
        signs = "".join("+" if s > 0 else "-" for s in record.signs)
        print(
            f"{signs:>12} {sol:>34} {_fmt(record.residual):>14} "
            f"{_fmt(record.consistent):>10}"
        )
    _write_json(args.out, result.to_json())
    return OK if result.valid else FALSE


# -- enumerate-n1 ---------------------------------------------------------


def _parse_level(text: str) -> QuadNum:
    try:
        return QuadNum.parse(text, GOLDEN)
    except (ValueError, MubcError) as exc:
        raise _Failure(INPUT_ERROR, f"input error: field 'k': {exc}")


def cmd_enumerate(args) -> int:
    k = _parse_level(args.k)
    classes = enumerate_triples_n1(k, args.height)
    print(f"equivalence classes at K = {k} within height {args.height}: {len(classes)}")
    rows = []
    for idx, config in enumerate(classes):
        parts = []
        for vector in config.vectors:
            factor = vector.factors[0]
            parts.append(f"({factor.q}, {factor.p})")
            rows.append(
                {"class": idx, "Q": str(factor.q), "P": str(factor.p)}
            )
        print(f"class {idx}: " + "  ".join(parts))
    _write_json(args.out, [config_to_json(c) for c in classes])
    _write_csv(args.csv, ["class", "Q", "P"], rows)
    # empty enumeration is a negative answer, matching search/equivalence
    return OK if classes else FALSE


# -- equivalence ----------------------------------------------------------


def cmd_equivalence(args) -> int:
    config_a = _load_config(args.config_a, args)
    config_b = _load_config(args.config_b, args)
    tolerance = args.tolerance if args.tolerance is not None else 1e-10
    result = find_equivalence(config_a, config_b, tolerance=tolerance)
    if result is None:
        print("no equivalence found")
        _write_json(args.out, None)
        return FALSE
    print(f"scale: {_fmt(result.scale)}")
    print(f"matrix sign: {result.matrix.sign:+d}")
    for row in result.matrix.entries:
        print(f"  [{_fmt(row[0]):>22} {_fmt(row[1]):>22}]")
    print(f"permutation: {list(result.permutation)}")
    print(f"signs: {list(result.signs)}")
    print(f"residual: {_fmt(result.residual)}")
    _write_json(args.out, result.to_json())
    return OK


# -- metaplectic ----------------------------------------------------------


def cmd_metaplectic(args) -> int:
    hbar = args.hbar if args.hbar is not None else 1.0
    if args.action == "overlap":
        spec = MetaplecticSpec.from_json(_load_json(args.matrix))
        matrix = spec.stacked()
        defect = symplectic_defect(matrix)
        value = genmu_overlap_sq(matrix, hbar=hbar)
        print(f"symplectic defect: {_fmt(defect)}")
        print(f"overlap_sq: {_fmt(value)}")
        _write_json(args.out, {"overlap_sq": value, "hbar": hbar, "defect": defect})
        return OK
    if args.action == "compose":
        spec_a = MetaplecticSpec.from_json(_load_json(args.matrix))
        spec_b = MetaplecticSpec.from_json(_load_json(args.matrix_b))
        value = compose_overlap_sq(spec_a.stacked(), spec_b.stacked(), hbar=hbar)
        print(f"composed overlap_sq: {_fmt(value)}")
        _write_json(args.out, {"overlap_sq": value, "hbar": hbar})
        return OK
    # special-m
    if args.mode == EXACT:
        try:
            q = Fraction(args.q)
            p = Fraction(args.p)
            mu = Fraction(args.mu)
        except (ValueError, ZeroDivisionError) as exc:
            raise _Failure(INPUT_ERROR, f"input error: field 'q/p/mu': {exc}")
    else:
        q, p, mu = float(args.q), float(args.p), float(args.mu)
    matrix = special_m(q, p, mu)
    print("matrix rows:")
    for row in matrix:
        print(f"  [{_fmt(row[0]):>22} {_fmt(row[1]):>22}]")
    floats = np.array([[float(x) for x in row] for row in matrix])
    image = floats @ np.array([float(q), float(p)])
    print(f"image of (Q, P): ({_fmt(image[0])}, {_fmt(image[1])})")
    value = genmu_overlap_sq(floats, hbar=hbar)
    print(f"overlap_sq: {_fmt(value)}")
    if float(q) != 0.0:
        print(f"formula 1/(2*pi*hbar*|Q|): {_fmt(1.0 / (2.0 * math.pi * hbar * abs(float(q))))}")
    # emit a readable matrix spec; exact entries ride alongside as strings
    blob = {
        "N": 1,
        "ordering": "stacked",
        "rows": [[float(x) for x in row] for row in matrix],
        "overlap_sq": value,
        "hbar": hbar,
    }
    if args.mode == EXACT:
        blob["rows_exact"] = [[str(x) for x in row] for row in matrix]
    _write_json(args.out, blob)
    return OK


# -- oracle ---------------------------------------------------------------


def _state_from_json(path: str, data, hbar_default: float) -> ChirpState:
    if not isinstance(data, dict):
        raise _Failure(INPUT_ERROR, f"input error: {path}: expected a JSON object")
    for field in ("Q", "P"):
        if field not in data:
            raise _Failure(INPUT_ERROR, f"input error: {path}: field {field!r} is required")
        if not isinstance(data[field], (int, float)) or isinstance(data[field], bool):
            raise _Failure(
                INPUT_ERROR, f"input error: {path}: field {field!r} must be a number"
            )
    alpha = data.get("alpha", 0.0)
    hbar = data.get("hbar", hbar_default)
    for field, value in (("alpha", alpha), ("hbar", hbar)):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise _Failure(
                INPUT_ERROR, f"input error: {path}: field {field!r} must be a number"
            )
    try:
        direction = DirectionVector(float(data["Q"]), float(data["P"]))
    except InvalidProblem as exc:
        raise _Failure(INPUT_ERROR, f"input error: {path}: {exc}")
    return ChirpState(direction, float(alpha), float(hbar))


def cmd_oracle(args) -> int:
    hbar = args.hbar if args.hbar is not None else 1.0
    if args.action == "pair":
        state_a = _state_from_json(args.state_a, _load_json(args.state_a), hbar)
        state_b = _state_from_json(args.state_b, _load_json(args.state_b), hbar)
        epsilons = None
        if args.epsilons:
            try:
                epsilons = [float(x) for x in args.epsilons.split(",")]
            except ValueError as exc:
                raise _Failure(INPUT_ERROR, f"input error: field 'epsilons': {exc}")
        result = overlap_quadrature(state_a, state_b, epsilons=epsilons)
        formula = overlap_magnitude_sq(state_a.direction, state_b.direction, hbar=state_a.hbar)
        print(f"branch: {result.branch}")
        print(f"formula: {_fmt(formula)}")
        print(f"oracle:  {_fmt(result.value)}")
        print(f"error estimate: {_fmt(result.error_estimate)}")
        print(f"converged: {_fmt(result.converged)}")
        if result.epsilon_sequence:
            print(f"{'epsilon':>14} {'|I(eps)|^2':>22}")
            for eps, value in result.epsilon_sequence:
                print(f"{_fmt(eps):>14} {_fmt(value):>22}")
        _write_json(
            args.out,
            {
                "branch": result.branch,
                "formula": formula,
                "value": result.value,
                "error_estimate": result.error_estimate,
                "converged": result.converged,
                "epsilon_sequence": [list(pair) for pair in result.epsilon_sequence],
            },
        )
        return OK if result.converged else NO_CONVERGENCE
    # scan
    if args.thetas:
        try:
            thetas = [float(x) for x in args.thetas.split(",")]
        except ValueError as exc:
            raise _Failure(INPUT_ERROR, f"input error: field 'thetas': {exc}")
    else:
        thetas = [0.0, math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2]
    tolerance = args.tolerance if args.tolerance is not None else 1e-5
    scan = pairwise_unbiased_scan(thetas, hbar=hbar, tolerance=tolerance)
    print(f"{'theta_a':>10} {'theta_b':>10} {'formula':>16} {'oracle':>16} {'agree':>7}")
    for row in scan.rows:
        if row.parallel:
            print(f"{row.theta_a:>10.6f} {row.theta_b:>10.6f} {'parallel':>16} {'':>16} {'':>7}")
            continue
        print(
            f"{row.theta_a:>10.6f} {row.theta_b:>10.6f} {_fmt(row.formula):>16} "
            f"{_fmt(row.oracle):>16} {_fmt(row.agree):>7}"
        )
    print(f"all agree: {_fmt(scan.all_agree)}")
    _write_json(args.out, scan.to_json())
    _write_csv(
        args.csv,
        ["theta_a", "theta_b", "separation", "parallel", "formula", "oracle", "oracle_error", "agree"],
        [
            {
                "theta_a": r.theta_a,
                "theta_b": r.theta_b,
                "separation": r.separation,
                "parallel": r.parallel,
                "formula": r.formula,
                "oracle": r.oracle,
                "oracle_error": r.oracle_error,
                "agree": r.agree,
            }
            for r in scan.rows
        ],
    )
    return OK if scan.all_agree else FALSE


# -- reproduce ------------------------------------------------------------


@dataclass
class ManifestEntry:
    claim: str
    provenance: str
    computed: str
    expected: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "claim": self.claim,
            "provenance": self.provenance,
            "computed": self.computed,
            "expected": self.expected,
            "passed": self.passed,
            "detail": self.detail,
        }


def load_fixture(name: str) -> dict:
    resource = importlib.resources.files("mubc").joinpath(f"fixtures/{name}")
    return json.loads(resource.read_text(encoding="utf-8"))


def fixture_config(name: str) -> MUConfiguration:
    return config_from_json(load_fixture(name))


def _rel_gap(computed: float, expected: float) -> float:
    if computed == expected:
        return 0.0
    return abs(computed - expected) / max(abs(expected), 1e-300)


ROTATION_ANGLES = (math.pi / 6, math.pi / 4, math.pi / 3, 2 * math.pi / 3)


def build_manifest(
    hbar: float = 1.0, tolerance: float = 1e-9, include_search: bool = False
) -> list[ManifestEntry]:
    """Recompute every bundled numeric claim and grade it.

    Exact-arithmetic claims are graded exactly and hold at any tolerance;
    floating-point claims are graded at the given relative tolerance, so
    tolerance = 0 fails the quadrature rows while exact rows still pass.
    """
    entries: list[ManifestEntry] = []

    # 1. position vs momentum bases: the constant overlap magnitude
    position = DirectionVector(0.0, 1.0)
    momentum = DirectionVector(1.0, 0.0)
    computed = overlap_magnitude_sq(position, momentum, hbar=hbar)
    expected = 1.0 / (2.0 * math.pi * hbar)
    entries.append(
        ManifestEntry(
            "position-momentum-constant",
            "analytic",
            _fmt(computed),
            _fmt(expected),
            _rel_gap(computed, expected) <= tolerance,
        )
    )

    # 2-4. rotated bases at four angles, three independent routes
    worst_sym = 0.0
    worst_meta = 0.0
    worst_oracle = 0.0
    oracle_ok = True
    for theta in ROTATION_ANGLES:
        expected = 1.0 / (2.0 * math.pi * hbar * abs(math.sin(theta)))
        sym = overlap_magnitude_sq(direction_for_angle(theta), position, hbar=hbar)
        worst_sym = max(worst_sym, _rel_gap(sym, expected))
        meta = genmu_overlap_sq(rotation_matrix(theta), hbar=hbar)
        worst_meta = max(worst_meta, _rel_gap(meta, expected))
        state_a = ChirpState(direction_for_angle(-theta / 2.0), 0.0, hbar)
        state_b = ChirpState(direction_for_angle(theta / 2.0), 0.0, hbar)
        result = overlap_quadrature(state_a, state_b)
        oracle_ok = oracle_ok and result.converged
        worst_oracle = max(worst_oracle, _rel_gap(result.value, expected))
    entries.append(
        ManifestEntry(
            "rotation-law-symplectic",
            "analytic",
            f"max gap {_fmt(worst_sym)}",
            "1/(2*pi*hbar*|sin theta|)",
            worst_sym <= tolerance,
            "angles pi/6, pi/4, pi/3, 2pi/3",
        )
    )
    entries.append(
        ManifestEntry(
            "rotation-law-metaplectic",
            "cross-check",
            f"max gap {_fmt(worst_meta)}",
            "1/(2*pi*hbar*|sin theta|)",
            worst_meta <= tolerance,
            "Cayley route on rotation matrices",
        )
    )
    entries.append(
        ManifestEntry(
            "rotation-law-oracle",
            "quadrature",
            f"max gap {_fmt(worst_oracle)}",
            "1/(2*pi*hbar*|sin theta|)",
            oracle_ok and worst_oracle <= tolerance,
            "damped-integral extrapolation, chirp-chirp branch",
        )
    )

    # 5. symmetric triple with the corrected second components
    s = math.sqrt(3.0) / 2.0
    symmetric = MUConfiguration(
        (
            ProductVector.of((0.0, -1.0)),
            ProductVector.of((s, 0.5)),
            ProductVector.of((-s, 0.5)),
        ),
        s,
        hbar,
        NUMERIC,
    )
    report = verify_mu(symmetric, tolerance=max(tolerance, 1e-15))
    overlap = overlap_magnitude_sq(symmetric.vectors[0], symmetric.vectors[1], hbar=hbar)
    overlap_expected = 1.0 / (math.pi * hbar * math.sqrt(3.0))
    entries.append(
        ManifestEntry(
            "symmetric-triple",
            "analytic",
            f"deviation {_fmt(report.max_deviation)}, overlap {_fmt(overlap)}",
            f"deviation 0, overlap {_fmt(overlap_expected)}",
            report.verdict and _rel_gap(overlap, overlap_expected) <= max(tolerance, 1e-15),
            "vectors (0,-1), (sqrt3/2, 1/2), (-sqrt3/2, 1/2) at K = sqrt3/2",
        )
    )

    # 6. the commonly quoted variant with second components 1 is not MU;
    # reproducing that failure is itself a check
    variant = MUConfiguration(
        (
            ProductVector.of((0.0, -1.0)),
            ProductVector.of((s, 1.0)),
            ProductVector.of((-s, 1.0)),
        ),
        None,
        hbar,
        NUMERIC,
    )
    variant_report = verify_mu(variant, tolerance=1e-6, infer_k=True)
    entries.append(
        ManifestEntry(
            "symmetric-triple-discrepancy",
            "cross-check",
            f"verdict {_fmt(variant_report.verdict)}",
            "verdict no",
            not variant_report.verdict,
            "variant with second components 1 has unequal pair products",
        )
    )

    # 7. asymmetric triple, exact integer arithmetic
    asymmetric = fixture_config("asymmetric-triple.json")
    asym_report = verify_mu(asymmetric)
    entries.append(
        ManifestEntry(
            "asymmetric-triple-exact",
            "exact-field",
            f"verdict {_fmt(asym_report.verdict)}",
            "verdict yes",
            asym_report.verdict and asym_report.max_deviation == 0.0,
            "vectors (0,-1), (1,0), (1,1) at K = 1",
        )
    )

    # 8. golden five-set, exact golden-field arithmetic end to end
    golden = fixture_config("golden5.json")
    golden_report = verify_mu(golden)
    entries.append(
        ManifestEntry(
            "golden-five-exact",
            "exact-field",
            f"verdict {_fmt(golden_report.verdict)} over {len(golden_report.pairs)} pairs",
            "verdict yes over 10 pairs",
            golden_report.verdict
            and golden_report.max_deviation == 0.0
            and len(golden_report.pairs) == 10,
            "all pairwise products are golden units of magnitude 1",
        )
    )

    # 9. no fourth direction joins either triple
    cert_a = certify_no_fourth(
        DirectionVector(0, -1), DirectionVector(1, 0), DirectionVector(1, 1), 1
    )
    cert_s = certify_no_fourth(
        DirectionVector(0.0, -1.0), DirectionVector(s, 0.5), DirectionVector(-s, 0.5), s
    )
    both_valid = (
        isinstance(cert_a, InfeasibilityCertificate)
        and cert_a.valid
        and isinstance(cert_s, InfeasibilityCertificate)
        and cert_s.valid
    )
    entries.append(
        ManifestEntry(
            "no-fourth-certificates",
            "exact-field",
            "both certificates valid" if both_valid else "certificate failed",
            "8 contradicted sign patterns per triple",
            both_valid,
            "asymmetric triple (exact) and symmetric triple (numeric)",
        )
    )

    # 10. the two triples are linearly equivalent up to a positive scale
    equivalence = find_equivalence(asymmetric, symmetric)
    entries.append(
        ManifestEntry(
            "triple-equivalence",
            "cross-check",
            "none" if equivalence is None else f"residual {_fmt(equivalence.residual)}",
            "residual < 1e-10",
            equivalence is not None and equivalence.residual < 1e-10,
            ""
            if equivalence is None
            else f"scale {_fmt(equivalence.scale)}, permutation {list(equivalence.permutation)}",
        )
    )

    # 11. shear-normalized matrices: overlap depends only on Q
    rng = np.random.default_rng(8)
    worst_shear = 0.0
    draws = 0
    while draws < 20:
        q = float(rng.uniform(0.3, 2.5) * rng.choice((-1.0, 1.0)))
        p = float(rng.uniform(-2.0, 2.0))
        mu = float(rng.uniform(-2.0, 2.0))
        try:
            value = genmu_overlap_sq(np.array(special_m(q, p, mu)), hbar=hbar)
        except (SingularCayley, DegenerateBlock):
            continue
        draws += 1
        worst_shear = max(worst_shear, _rel_gap(value, 1.0 / (2.0 * math.pi * hbar * abs(q))))
    entries.append(
        ManifestEntry(
            "shear-prefactor",
            "cross-check",
            f"max gap {_fmt(worst_shear)}",
            "1/(2*pi*hbar*|Q|)",
            worst_shear <= max(tolerance, 1e-10),
            "20 seeded random (Q, P, mu) draws",
        )
    )

    # 12. composition of rotations matches the angle difference
    rng = np.random.default_rng(9)
    worst_comp = 0.0
    pairs = 0
    while pairs < 10:
        theta_a = float(rng.uniform(0.0, math.pi))
        theta_b = float(rng.uniform(0.0, math.pi))
        if abs(math.sin(theta_b - theta_a)) < 0.05:
            continue
        pairs += 1
        value = compose_overlap_sq(rotation_matrix(theta_a), rotation_matrix(theta_b), hbar=hbar)
        expected = 1.0 / (2.0 * math.pi * hbar * abs(math.sin(theta_b - theta_a)))
        worst_comp = max(worst_comp, _rel_gap(value, expected))
    entries.append(
        ManifestEntry(
            "composition-rotations",
            "cross-check",
            f"max gap {_fmt(worst_comp)}",
            "1/(2*pi*hbar*|sin dtheta|)",
            worst_comp <= max(tolerance, 1e-10),
            "10 seeded random rotation pairs",
        )
    )

    if include_search:
        golden_seeds = golden.vectors[:4]
        problem = SearchProblem(
            target_k=golden.target_k,
            seeds=golden_seeds,
            free_slots=1,
            domain="golden-lattice",
            height=2,
        )
        search_report = search_extension(problem, budget=800000)
        fifth = golden.vectors[4]
        recovered = any(
            _same_vector(v, fifth) for sol in search_report.solutions for v in sol
        )
        entries.append(
            ManifestEntry(
                "search-lattice-recovery",
                "exact-field",
                f"outcome {search_report.outcome}, residual {_fmt(search_report.residual)}, "
                f"{len(search_report.solutions)} completions",
                "outcome extended, residual 0, bundled fifth among completions",
                search_report.outcome == "extended"
                and search_report.residual == 0.0
                and recovered,
                f"full box enumerated in {search_report.evaluations} evaluations",
            )
        )
        real_problem = SearchProblem(
            target_k=1.0,
            seeds=(
                ProductVector.of((0.0, -1.0)),
                ProductVector.of((1.0, 0.0)),
                ProductVector.of((1.0, 1.0)),
            ),
            free_slots=1,
            domain="real",
        )
        real_report = search_extension(real_problem, budget=4000, restarts=8, seed=0)
        entries.append(
            ManifestEntry(
                "search-real-no-improvement",
                "cross-check",
                f"outcome {real_report.outcome}",
                "outcome no-improvement",
                real_report.outcome == "no-improvement",
                "multi-start descent cannot extend the asymmetric triple",
            )
        )
    return entries


def _same_vector(a: ProductVector, b: ProductVector) -> bool:
    if a.n != b.n:
        return False
    direct = all(
        fa.q == fb.q and fa.p == fb.p for fa, fb in zip(a.factors, b.factors)
    )
    flipped = all(
        fa.q == -fb.q and fa.p == -fb.p for fa, fb in zip(a.factors, b.factors)
    )
    return direct or flipped


def cmd_reproduce(args) -> int:
    hbar = args.hbar if args.hbar is not None else 1.0
    tolerance = args.tolerance if args.tolerance is not None else 1e-9
    entries = build_manifest(hbar=hbar, tolerance=tolerance, include_search=args.include_search)
    width = max(len(e.claim) for e in entries)
    print(f"hbar = {_fmt(hbar)}, tolerance = {_fmt(tolerance)}")
    for entry in entries:
        status = "PASS" if entry.passed else "FAIL"
        print(f"{status}  {entry.claim:<{width}}  {entry.computed}")
    all_passed = all(e.passed for e in entries)
    print(f"{'all claims pass' if all_passed else 'some claims FAILED'}")
    _write_json(
        args.out,
        {
            "hbar": hbar,
            "tolerance": tolerance,
            "all_passed": all_passed,
            "claims": [e.to_json() for e in entries],
        },
    )
    _write_csv(
        args.csv,
        ["claim", "provenance", "computed", "expected", "passed", "detail"],
        [e.to_json() for e in entries],
    )
    return OK if all_passed else FALSE


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hbar", type=float, default=None, help="Planck constant scale (default 1)")
    common.add_argument("--tolerance", type=float, default=None, help="relative tolerance")
    common.add_argument("--mode", choices=(EXACT, NUMERIC), default=None, help="arithmetic mode")
    common.add_argument("--out", default=None, help="write the JSON result to this path")

    parser = argparse.ArgumentParser(
        prog="mubc",
        description="Mutually unbiased continuous-variable bases: verification, "
        "search, metaplectic overlaps, and a numerical oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", parents=[common], help="verify a configuration file")
    p_verify.add_argument("config", help="configuration JSON path")
    p_verify.add_argument("--infer-k", action="store_true", help="infer K from the first pair")
    p_verify.add_argument("--csv", default=None, help="write pair rows as CSV")
    p_verify.set_defaults(handler=cmd_verify)

    p_search = sub.add_parser("search", parents=[common], help="search for extension vectors")
    p_search.add_argument("problem", help="search problem JSON path")
    p_search.add_argument("--seed", type=int, required=True, help="RNG seed (required)")
    p_search.add_argument("--budget", type=int, default=200000, help="evaluation budget")
    p_search.add_argument("--restarts", type=int, default=40, help="descent restarts")
    p_search.set_defaults(handler=cmd_search)

    p_certify = sub.add_parser(
        "certify-n1", parents=[common], help="certify no fourth direction joins an N=1 triple"
    )
    p_certify.add_argument("config", help="triple configuration JSON path")
    p_certify.set_defaults(handler=cmd_certify)

    p_enum = sub.add_parser(
        "enumerate-n1", parents=[common], help="enumerate golden-lattice triples up to equivalence"
    )
    p_enum.add_argument("--k", default="1", help="target level, e.g. '1' or '1 + 1R'")
    p_enum.add_argument("--height", type=int, default=1, help="lattice height bound")
    p_enum.add_argument("--csv", default=None, help="write vector rows as CSV")
    p_enum.set_defaults(handler=cmd_enumerate)

    p_equiv = sub.add_parser(
        "equivalence", parents=[common], help="find a linear equivalence between two triples"
    )
    p_equiv.add_argument("config_a", help="first triple JSON path")
    p_equiv.add_argument("config_b", help="second triple JSON path")
    p_equiv.set_defaults(handler=cmd_equivalence)

    p_meta = sub.add_parser("metaplectic", parents=[common], help="metaplectic overlap computations")
    meta_sub = p_meta.add_subparsers(dest="action", required=True)
    m_overlap = meta_sub.add_parser("overlap", parents=[common], help="overlap of one matrix")
    m_overlap.add_argument("matrix", help="matrix spec JSON path")
    m_overlap.set_defaults(handler=cmd_metaplectic, action="overlap")
    m_compose = meta_sub.add_parser("compose", parents=[common], help="relative overlap of two matrices")
    m_compose.add_argument("matrix", help="first matrix spec JSON path")
    m_compose.add_argument("matrix_b", help="second matrix spec JSON path")
    m_compose.set_defaults(handler=cmd_metaplectic, action="compose")
    m_special = meta_sub.add_parser("special-m", parents=[common], help="normal form sending (Q,P) to (0,1)")
    m_special.add_argument("--q", required=True, help="Q component")
    m_special.add_argument("--p", required=True, help="P component")
    m_special.add_argument("--mu", default="0", help="residual shear parameter")
    m_special.set_defaults(handler=cmd_metaplectic, action="special-m")

    p_oracle = sub.add_parser("oracle", parents=[common], help="numerical overlap oracle")
    oracle_sub = p_oracle.add_subparsers(dest="action", required=True)
    o_pair = oracle_sub.add_parser("pair", parents=[common], help="overlap of two states")
    o_pair.add_argument("state_a", help="first state JSON path")
    o_pair.add_argument("state_b", help="second state JSON path")
    o_pair.add_argument("--epsilons", default=None, help="comma-separated damping values")
    o_pair.set_defaults(handler=cmd_oracle, action="pair")
    o_scan = oracle_sub.add_parser("scan", parents=[common], help="all-pairs angle scan")
    o_scan.add_argument("--thetas", default=None, help="comma-separated angles (radians)")
    o_scan.add_argument("--csv", default=None, help="write scan rows as CSV")
    o_scan.set_defaults(handler=cmd_oracle, action="scan")

    p_repro = sub.add_parser(
        "reproduce", parents=[common], help="recompute every bundled numeric claim"
    )
    p_repro.add_argument("--csv", default=None, help="write claim rows as CSV")
    p_repro.add_argument(
        "--include-search",
        action="store_true",
        help="also run the slower search-recovery claims",
    )
    p_repro.set_defaults(handler=cmd_reproduce)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler: Callable = args.handler
    try:
        return handler(args)
    except _Failure as failure:
        print(str(failure), file=sys.stderr)
        return failure.code
    except _INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
