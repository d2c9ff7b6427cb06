"""Unsigned symplectic form, MU verification, rescaling, transforms."""

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mubc import (
    EXACT,
    GOLDEN,
    NUMERIC,
    ContextMismatch,
    DimensionMismatch,
    DirectionVector,
    InvalidDirection,
    InvalidProblem,
    InvalidTarget,
    LimitExceeded,
    MUConfiguration,
    ParallelDirections,
    ProductVector,
    QuadNum,
    UnsignedSymplecticClass,
    UnsignedSymplecticMatrix,
    apply_transform,
    build_jN,
    config_from_json,
    config_to_json,
    expanded_product,
    is_unsigned_symplectic,
    overlap_magnitude_sq,
    rescale_config,
    symp2,
    symp_product,
    verify_mu,
)

R = QuadNum.root()


def dv(q, p):
    return DirectionVector(q, p)


ASYM_TRIPLE = MUConfiguration(
    vectors=(
        ProductVector.of((0, -1)),
        ProductVector.of((1, 0)),
        ProductVector.of((1, 1)),
    ),
    target_k=1,
)

S3 = math.sqrt(3.0) / 2.0
SYM_TRIPLE = MUConfiguration(
    vectors=(
        ProductVector.of((0.0, -1.0)),
        ProductVector.of((S3, 0.5)),
        ProductVector.of((-S3, 0.5)),
    ),
    target_k=S3,
    mode=NUMERIC,
)


def golden_five():
    one = QuadNum(1)
    return MUConfiguration(
        vectors=(
            ProductVector.of((one, QuadNum(0)), (one, QuadNum(0))),
            ProductVector.of((QuadNum(0), one), (QuadNum(0), one)),
            ProductVector.of((one, one), (one, one)),
            ProductVector.of((one, one - R), (one, R)),
            ProductVector.of((one, QuadNum(2) - R), (one, one + R)),
        ),
        target_k=QuadNum(1),
    )


class TestSymp2:
    def test_position_momentum(self):
        assert symp2(dv(0, -1), dv(1, 0)) == -1

    def test_self_vanishes(self):
        for d in (dv(0, -1), dv(1, 1), dv(3, -2)):
            assert symp2(d, d) == 0

    def test_rotated_direction(self):
        for theta in (0.3, 1.1, 2.7):
            a = dv(-math.sin(theta), math.cos(theta))
            b = dv(0.0, 1.0)
            assert abs(symp2(a, b) - math.sin(theta)) < 1e-15

    def test_mode_mismatch(self):
        with pytest.raises(ContextMismatch):
            symp2(dv(QuadNum(1), QuadNum(0)), dv(1.0, 0.0))


class TestSympProduct:
    def test_golden_pair_four_five(self):
        v4 = ProductVector.of((QuadNum(1), QuadNum(1) - R), (QuadNum(1), R))
        v5 = ProductVector.of((QuadNum(1), QuadNum(2) - R), (QuadNum(1), QuadNum(1) + R))
        assert symp_product(v4, v5) == QuadNum(1)

    def test_golden_pair_one_four(self):
        v1 = ProductVector.of((QuadNum(1), QuadNum(0)), (QuadNum(1), QuadNum(0)))
        v4 = ProductVector.of((QuadNum(1), QuadNum(1) - R), (QuadNum(1), R))
        value = symp_product(v1, v4)
        assert value == QuadNum(-1)

    def test_self_vanishes(self):
        v = ProductVector.of((1, 2), (3, 1))
        assert symp_product(v, v) == 0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            symp_product(ProductVector.of((1, 0)), ProductVector.of((1, 0), (0, 1)))


class TestBuildJN:
    def test_n1(self):
        j1 = build_jN(1)
        assert [list(row) for row in j1] == [[0, -1], [1, 0]]

    def test_n2_corner(self):
        j2 = build_jN(2)
        assert j2[0][3] == 1
        assert len(j2) == 4 and all(len(row) == 4 for row in j2)

    def test_square_is_signed_identity(self):
        for n in (1, 2, 3):
            jn = build_jN(n)
            dim = 2**n
            sq = [
                [sum(jn[i][k] * jn[k][j] for k in range(dim)) for j in range(dim)]
                for i in range(dim)
            ]
            sign = (-1) ** n
            for i in range(dim):
                for j in range(dim):
                    assert sq[i][j] == (sign if i == j else 0)

    def test_transpose_sign(self):
        for n in (1, 2, 3, 4):
            jn = build_jN(n)
            dim = 2**n
            sign = (-1) ** n
            for i in range(dim):
                for j in range(dim):
                    assert jn[j][i] == sign * jn[i][j]

    def test_oversize(self):
        with pytest.raises(LimitExceeded):
            build_jN(9)


class TestOverlapMagnitude:
    def test_position_momentum(self):
        got = overlap_magnitude_sq(ProductVector.of((0, 1)), ProductVector.of((1, 0)))
        assert got == 1.0 / (2.0 * math.pi)

    def test_symmetric_pair(self):
        got = overlap_magnitude_sq(
            ProductVector.of((0.0, -1.0)), ProductVector.of((S3, 0.5))
        )
        assert abs(got - 1.0 / (math.pi * math.sqrt(3.0))) < 1e-15

    def test_golden_pairs(self):
        cfg = golden_five()
        expected = 1.0 / (2.0 * math.pi) ** 2
        for i in range(5):
            for j in range(i + 1, 5):
                got = overlap_magnitude_sq(cfg.vectors[i], cfg.vectors[j])
                assert abs(got - expected) < 1e-16

    def test_hbar_dependence(self):
        a, b = ProductVector.of((0, 1)), ProductVector.of((1, 0))
        assert overlap_magnitude_sq(a, b, hbar=2.0) == 1.0 / (4.0 * math.pi)

    def test_parallel_raises(self):
        with pytest.raises(ParallelDirections):
            overlap_magnitude_sq(ProductVector.of((1, 1)), ProductVector.of((2, 2)))


class TestVerifyMU:
    def test_asymmetric_triple(self):
        report = verify_mu(ASYM_TRIPLE)
        assert report.verdict
        assert len(report.pairs) == 3
        assert report.max_deviation == 0

    def test_golden_five(self):
        report = verify_mu(golden_five())
        assert report.verdict
        assert len(report.pairs) == 10
        assert all(pair.unbiased for pair in report.pairs)
        assert report.max_deviation == 0

    def test_counterexample(self):
        cfg = MUConfiguration(
            vectors=(
                ProductVector.of((0, 1)),
                ProductVector.of((1, 0)),
                ProductVector.of((1, 2)),
            ),
            target_k=1,
        )
        report = verify_mu(cfg)
        assert not report.verdict
        bad = next(p for p in report.pairs if p.i == 1 and p.j == 2)
        assert bad.magnitude == 2

    def test_symmetric_triple_numeric(self):
        report = verify_mu(SYM_TRIPLE, tolerance=1e-12)
        assert report.verdict
        assert report.max_deviation <= 1e-12

    def test_infer_k(self):
        cfg = MUConfiguration(
            vectors=(
                ProductVector.of((0, -2)),
                ProductVector.of((2, 0)),
                ProductVector.of((2, 2)),
            ),
            target_k=None,
        )
        report = verify_mu(cfg, infer_k=True)
        assert report.verdict
        assert report.inferred
        assert report.target_k == 4

    def test_parallel_pair_flagged(self):
        cfg = MUConfiguration(
            vectors=(
                ProductVector.of((1, 1)),
                ProductVector.of((2, 2)),
                ProductVector.of((1, 0)),
            ),
            target_k=1,
        )
        report = verify_mu(cfg)
        assert not report.verdict
        assert report.parallel_pairs == ((0, 1),)


class TestRescale:
    def test_quadruple_doubles(self):
        scaled = rescale_config(ASYM_TRIPLE, 4)
        for vec in scaled.vectors:
            f = vec.factors[0]
            assert abs(float(f.q)) in (0.0, 2.0) and abs(float(f.p)) in (0.0, 2.0)
        report = verify_mu(scaled)
        assert report.verdict and report.target_k == 4

    def test_identity(self):
        same = rescale_config(ASYM_TRIPLE, 1)
        assert verify_mu(same).verdict
        assert same.target_k == 1
        for a, b in zip(same.vectors, ASYM_TRIPLE.vectors):
            assert symp_product(a, b) == 0

    def test_symmetric_to_unit(self):
        scaled = rescale_config(SYM_TRIPLE, 1.0)
        lam = (4.0 / 3.0) ** 0.25
        assert abs(abs(scaled.vectors[0].factors[0].p) - lam) < 1e-14
        report = verify_mu(scaled, tolerance=1e-12)
        assert report.verdict and report.target_k == 1.0

    def test_exact_scale_when_root_exists(self):
        scaled = rescale_config(golden_five(), QuadNum(4))
        report = verify_mu(scaled)
        assert report.verdict and report.target_k == QuadNum(4)

    def test_invalid_target(self):
        with pytest.raises(InvalidTarget):
            rescale_config(ASYM_TRIPLE, 0)
        with pytest.raises(InvalidTarget):
            rescale_config(ASYM_TRIPLE, -2)


class TestUnsignedSymplecticPredicate:
    def test_identity_plus(self):
        assert is_unsigned_symplectic([[1, 0], [0, 1]]) is UnsignedSymplecticClass.PLUS

    def test_rotation_generator(self):
        # det = +1 and m^t j m = +j hold for [[0,-1],[1,0]] by direct expansion
        assert is_unsigned_symplectic([[0, -1], [1, 0]]) is UnsignedSymplecticClass.PLUS

    def test_swap_minus(self):
        assert is_unsigned_symplectic([[0, 1], [1, 0]]) is UnsignedSymplecticClass.MINUS

    def test_diagonal_stretch_rejected(self):
        assert is_unsigned_symplectic([[2, 0], [0, 1]]) is UnsignedSymplecticClass.NOT

    def test_exact_entries(self):
        m = [[R, QuadNum(1)], [QuadNum(1), R.inverse() + QuadNum(1)]]
        # det = R(1 + 1/R) - 1 = R
        assert is_unsigned_symplectic(m) is UnsignedSymplecticClass.NOT

    def test_from_rows_rejects_non_symplectic(self):
        with pytest.raises(InvalidProblem):
            UnsignedSymplecticMatrix.from_rows([[2, 0], [0, 1]])

    def test_group_closure_signs_multiply(self):
        rng = random.Random(7)
        plus_pool = [[[1, 0], [1, 1]], [[0, -1], [1, 0]], [[1, 2], [0, 1]]]
        minus_pool = [[[0, 1], [1, 0]], [[1, 0], [0, -1]]]
        for _ in range(50):
            ma = rng.choice(plus_pool + minus_pool)
            mb = rng.choice(plus_pool + minus_pool)
            sa = is_unsigned_symplectic(ma)
            sb = is_unsigned_symplectic(mb)
            prod = [
                [sum(ma[i][k] * mb[k][j] for k in range(2)) for j in range(2)]
                for i in range(2)
            ]
            sp = is_unsigned_symplectic(prod)
            want_plus = (sa is sb)
            assert sp is (
                UnsignedSymplecticClass.PLUS if want_plus else UnsignedSymplecticClass.MINUS
            )


class TestApplyTransform:
    def test_identity(self):
        m = UnsignedSymplecticMatrix.from_rows([[1, 0], [0, 1]])
        out = apply_transform(m, ASYM_TRIPLE)
        assert verify_mu(out).verdict
        for a, b in zip(out.vectors, ASYM_TRIPLE.vectors):
            assert a.factors[0] == b.factors[0]

    def test_rotation_generator(self):
        m = UnsignedSymplecticMatrix.from_rows([[0, -1], [1, 0]])
        out = apply_transform(m, ASYM_TRIPLE)
        report = verify_mu(out)
        assert report.verdict and report.target_k == 1

    def test_shear(self):
        m = UnsignedSymplecticMatrix.from_rows([[1, 0], [1, 1]])
        out = apply_transform(m, ASYM_TRIPLE)
        report = verify_mu(out)
        assert report.verdict and report.target_k == 1

    def test_factor_index_on_n2(self):
        m = UnsignedSymplecticMatrix.from_rows([[1, 0], [1, 1]])
        cfg = golden_five()
        for idx in (0, 1):
            out = apply_transform(m, cfg, factor_index=idx)
            assert verify_mu(out).verdict

    def test_index_out_of_range(self):
        m = UnsignedSymplecticMatrix.from_rows([[1, 0], [0, 1]])
        with pytest.raises(DimensionMismatch):
            apply_transform(m, ASYM_TRIPLE, factor_index=1)


# numeric direction vectors for property tests, components bounded away from huge
coords = st.floats(
    min_value=-10, max_value=10, allow_nan=False, allow_infinity=False
)
directions = (
    st.tuples(coords, coords)
    .filter(lambda t: abs(t[0]) + abs(t[1]) > 1e-6)
    .map(lambda t: DirectionVector(t[0], t[1]))
)


class TestFormProperties:
    @given(directions, directions)
    @settings(max_examples=200)
    def test_antisymmetry(self, a, b):
        assert symp2(a, b) == -symp2(b, a)

    @given(directions, directions, directions, coords, coords)
    @settings(max_examples=200)
    def test_bilinearity(self, a, ap, b, lam, mu):
        combo_q = lam * a.q + mu * ap.q
        combo_p = lam * a.p + mu * ap.p
        if abs(combo_q) + abs(combo_p) <= 1e-9:
            return
        left = symp2(DirectionVector(combo_q, combo_p), b)
        right = lam * symp2(a, b) + mu * symp2(ap, b)
        scale = max(1.0, abs(left), abs(right))
        assert abs(left - right) <= 1e-9 * scale


def test_factorization_cross_check_exact():
    # product of per-factor forms == expanded Kronecker form, exactly
    rng = random.Random(11)
    for _ in range(1000):
        n = rng.randint(1, 4)
        fa, fb = [], []
        for _ in range(n):
            fa.append(
                (QuadNum(rng.randint(-3, 3), rng.randint(-2, 2)),
                 QuadNum(rng.randint(-3, 3), rng.randint(-2, 2)))
            )
            fb.append(
                (QuadNum(rng.randint(-3, 3), rng.randint(-2, 2)),
                 QuadNum(rng.randint(-3, 3), rng.randint(-2, 2)))
            )
        try:
            a = ProductVector.of(*fa)
            b = ProductVector.of(*fb)
        except InvalidDirection:
            continue
        assert symp_product(a, b) == expanded_product(a, b)


def test_factorization_cross_check_numeric():
    rng = random.Random(12)
    for _ in range(1000):
        n = rng.randint(1, 4)
        fa = [(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(n)]
        fb = [(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(n)]
        a = ProductVector.of(*fa)
        b = ProductVector.of(*fb)
        lhs = symp_product(a, b)
        rhs = expanded_product(a, b)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs), abs(rhs))


def test_transform_invariance():
    rng = random.Random(13)
    mats = [[[1, 0], [1, 1]], [[0, -1], [1, 0]], [[0, 1], [1, 0]], [[1, -3], [0, 1]]]
    for _ in range(200):
        m = rng.choice(mats)
        usm = UnsignedSymplecticMatrix.from_rows(m)
        a = dv(rng.uniform(-2, 2), rng.uniform(-2, 2))
        b = dv(rng.uniform(-2, 2), rng.uniform(-2, 2))
        before = abs(symp2(a, b))
        after = abs(symp2(usm.apply(a), usm.apply(b)))
        assert abs(before - after) <= 1e-12 * max(1.0, before)


def test_scaling_law():
    rng = random.Random(14)
    for _ in range(100):
        a = dv(rng.uniform(-2, 2), rng.uniform(-2, 2))
        b = dv(rng.uniform(-2, 2), rng.uniform(-2, 2))
        lam = rng.uniform(0.1, 3.0)
        scaled_a = dv(lam * a.q, lam * a.p)
        assert abs(symp2(scaled_a, b) - lam * symp2(a, b)) <= 1e-12
        scaled_b = dv(lam * b.q, lam * b.p)
        assert abs(symp2(scaled_a, scaled_b) - lam**2 * symp2(a, b)) <= 1e-11


class TestProductVector:
    def test_expanded_is_kronecker(self):
        v = ProductVector.of((1, 2), (3, 4))
        assert v.expanded == (1 * 3, 1 * 4, 2 * 3, 2 * 4)

    def test_n(self):
        assert ProductVector.of((1, 0)).n == 1
        assert ProductVector.of((1, 0), (0, 1), (1, 1)).n == 3

    def test_zero_factor_rejected(self):
        with pytest.raises(InvalidDirection):
            ProductVector.of((1, 0), (0, 0))


class TestConfigJson:
    def test_exact_round_trip(self):
        cfg = golden_five()
        blob = config_to_json(cfg)
        back = config_from_json(blob)
        assert back.mode == EXACT
        assert back.target_k == cfg.target_k
        assert len(back.vectors) == 5
        for a, b in zip(back.vectors, cfg.vectors):
            for fa, fb in zip(a.factors, b.factors):
                assert fa == fb
        assert verify_mu(back).verdict

    def test_numeric_round_trip(self):
        blob = config_to_json(SYM_TRIPLE)
        back = config_from_json(blob)
        assert back.mode == NUMERIC
        assert verify_mu(back, tolerance=1e-12).verdict

    def test_schema_fields(self):
        blob = config_to_json(ASYM_TRIPLE)
        assert blob["N"] == 1
        assert blob["mode"] == "exact"
        assert blob["hbar"] == 1.0
        assert len(blob["vectors"]) == 3
        assert blob["vectors"][0][0] == ["0", "-1"]
