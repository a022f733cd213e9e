"""Three-way Hermite flag determination and the extracted subsequence."""

from __future__ import annotations

from fractions import Fraction

import pytest
from helpers import no_two_consecutive_false, random_quadratic_specs, random_rational_specs

from hermite_lab import (
    InsufficientSequence,
    MisalignedInput,
    complete_sequence,
    envelope_breakpoints,
    flags_via_criterion,
    flags_via_delta_scan,
    flags_via_envelope,
    hermite_subsequence,
    next_minimal,
    parse_real,
)
from hermite_lab.hermite import _lower_envelope, _scan_witnesses

GOLDEN = parse_real("(1+1*sqrt(5))/2")
Q21 = parse_real("(-3+1*sqrt(21))/6")
SILVER = parse_real("(1+1*sqrt(2))/1")
THETA38 = parse_real("3/8")
BOUNDARY_TIE = parse_real("5/14")  # the pair orbit lands exactly on the V border


def decided_agree(a, b) -> bool:
    return all(
        fa == fb
        for fa, fb in zip(a.flags, b.flags)
        if fa is not None and fb is not None
    )


class TestCriterion:
    def test_quadratic_period_two_pattern(self):
        flags = flags_via_criterion(Q21, 40).flags
        assert flags[:5] == (True, True, False, True, False)
        for k, f in enumerate(flags):
            expected = True if k in (0, 1) or k % 2 == 1 else False
            assert f == expected

    def test_golden_all_true(self):
        assert all(flags_via_criterion(GOLDEN, 30).flags)

    def test_silver_all_true(self):
        assert all(flags_via_criterion(SILVER, 30).flags)

    def test_rational_all_true_and_complete(self):
        flags = flags_via_criterion(THETA38, 50).flags
        assert flags == (True,) * 5

    def test_first_two_flags_always_true(self):
        specs = random_rational_specs(20, 10**5, seed=101) + list(
            random_quadratic_specs(8, seed=102)
        )
        for spec in specs:
            flags = flags_via_criterion(spec, 12).flags
            assert flags[0] is True and flags[1] is True

    def test_depth_guard(self):
        with pytest.raises(ValueError):
            flags_via_criterion(GOLDEN, 1)

    def test_boundary_tie_is_hermite(self):
        # x_1 = 4/5 equals (2y+1)/(y+2) at y = 1/2: not in V, so X_2 stays
        flags = flags_via_criterion(BOUNDARY_TIE, 10).flags
        assert flags == (True, True, True, True, True)

    def test_decimal_undecidable_boundary_reports_none(self):
        # truncating 5/14 puts the exact boundary inside the uncertainty window
        from hermite_lab import make_decimal

        value = Fraction((5 << 64) // 14, 1 << 64)
        spec = make_decimal(value, 64)
        flags = flags_via_criterion(spec, 6).flags
        assert flags[2] is None
        assert flags[1] is True

    def test_skip_forces_unit_quotient_successor(self):
        # a skipped vector means the next minimal vector is the plain sum
        for spec in [Q21] + random_rational_specs(25, 10**5, seed=103):
            seq = complete_sequence(spec, 25)
            flags = flags_via_criterion(spec, 25).flags
            for k in range(1, min(len(seq), len(flags)) - 1):
                if flags[k] is False:
                    w = next_minimal(seq[k - 1], seq[k])
                    assert (w.p, w.q) == (
                        seq[k - 1].p + seq[k].p,
                        seq[k - 1].q + seq[k].q,
                    )


class TestEnvelope:
    def test_rational_complete_sequence_fully_reported(self):
        flags = flags_via_envelope(complete_sequence(THETA38, 10))
        assert flags.flags == (True,) * 5

    def test_truncated_last_index_withheld(self):
        flags = flags_via_envelope(complete_sequence(Q21, 7))
        assert flags.flags[-1] is None
        assert flags.flags[:7] == (True, True, False, True, False, True, False)

    def test_matches_criterion_on_rationals(self):
        for spec in random_rational_specs(40, 10**4, seed=111):
            criterion = flags_via_criterion(spec, 10**5)
            envelope = flags_via_envelope(complete_sequence(spec, 10**5))
            assert len(criterion.flags) == len(envelope.flags)
            assert decided_agree(criterion, envelope)

    def test_matches_criterion_on_quadratics(self):
        for spec in random_quadratic_specs(6, seed=112):
            criterion = flags_via_criterion(spec, 30)
            envelope = flags_via_envelope(complete_sequence(spec, 29))
            assert decided_agree(criterion, envelope)

    def test_boundary_tie_touch(self):
        flags = flags_via_envelope(complete_sequence(BOUNDARY_TIE, 10))
        assert flags.flags == (True, True, True, True, True)

    def test_breakpoints_increase(self):
        seq = complete_sequence(THETA38, 10)
        points = envelope_breakpoints(seq)
        assert [(b.left_index, b.right_index) for b in points] == [
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
        ]
        values = [b.s_value for b in points]
        assert values == sorted(values)
        # crossing formula: s^2 = (B_r - B_l) / (A_l - A_r)
        taus = [Fraction(64, 55), Fraction(192, 5), Fraction(320, 3), Fraction(3520)]
        for b, tau in zip(points, taus):
            assert abs(b.s_value**2 - float(tau)) < 1e-6 * float(tau)

    def test_short_sequence_rejected(self):
        with pytest.raises(InsufficientSequence):
            flags_via_envelope(complete_sequence(GOLDEN, 3)[:2])

    def test_against_quantifier_oracle(self):
        # flag[k] iff some tau > 0 has line k weakly below every other line
        for spec in random_rational_specs(15, 3000, seed=113):
            seq = complete_sequence(spec, 10**4)
            value = spec.value
            lines = []
            for vec in seq:
                v1 = Fraction(vec.p) - value * vec.q
                lines.append((v1 * v1, Fraction(vec.q * vec.q)))
            touch, _ = _lower_envelope(lines)
            for k in range(len(lines)):
                A_k, B_k = lines[k]
                low = Fraction(0)
                high = None
                for j, (A_j, B_j) in enumerate(lines):
                    if j == k:
                        continue
                    if A_j > A_k:
                        low = max(low, (B_k - B_j) / (A_j - A_k))
                    elif A_j < A_k:
                        bound = (B_j - B_k) / (A_k - A_j)
                        high = bound if high is None else min(high, bound)
                feasible = high is None or low <= high
                assert touch[k] == feasible


class TestDeltaScan:
    def test_quadratic_agrees(self):
        scan = flags_via_delta_scan(Q21, 10)
        envelope = flags_via_envelope(complete_sequence(Q21, 9))
        assert scan.flags == envelope.flags

    def test_rational_agrees(self):
        scan = flags_via_delta_scan(THETA38, 20)
        assert scan.flags == (True,) * 5

    def test_small_delta_selects_origin(self):
        value = THETA38.value
        seq = complete_sequence(THETA38, 10)
        lines = []
        for vec in seq:
            v1 = Fraction(vec.p) - value * vec.q
            lines.append((v1 * v1, Fraction(vec.q * vec.q)))
        assert _scan_witnesses([lines], [Fraction(1, 10**9)]) == {0}

    def test_coarse_grid_refines_once(self):
        scan = flags_via_delta_scan(Q21, 10, delta_grid=[Fraction(1, 10**6)])
        envelope = flags_via_envelope(complete_sequence(Q21, 9))
        assert scan.flags == envelope.flags

    def test_no_delta_selects_the_skipped_vector(self):
        # q = 3 vector of the period-two fixture is never a minimizer
        scan = flags_via_delta_scan(Q21, 12)
        assert scan.flags[2] is False

    def test_boundary_tie_witnessed(self):
        scan = flags_via_delta_scan(BOUNDARY_TIE, 10)
        assert scan.flags == (True, True, True, True, True)


class TestSubsequence:
    def test_golden_h_ladder(self):
        seq = complete_sequence(GOLDEN, 10)
        flags = flags_via_criterion(GOLDEN, 11)
        sub = hermite_subsequence(flags, seq)
        assert sub.h_values() == [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]
        assert sub.entries[0].h == 0  # the conventional first vector rides along

    def test_quadratic_skips(self):
        seq = complete_sequence(Q21, 8)
        flags = flags_via_criterion(Q21, 9)
        sub = hermite_subsequence(flags, seq)
        assert sub.h_values()[:4] == [1, 4, 19, 91]
        assert sub.count_positive_q == 4

    def test_empty_flags(self):
        from hermite_lab import HermiteFlags

        seq = complete_sequence(GOLDEN, 5)
        sub = hermite_subsequence(HermiteFlags(GOLDEN, (), "criterion"), seq)
        assert sub.entries == ()

    def test_misaligned_lengths(self):
        seq = complete_sequence(GOLDEN, 3)
        flags = flags_via_criterion(GOLDEN, 20)
        with pytest.raises(MisalignedInput):
            hermite_subsequence(flags, seq)

    def test_misaligned_theta(self):
        seq = complete_sequence(GOLDEN, 6)
        flags = flags_via_criterion(Q21, 5)
        with pytest.raises(MisalignedInput):
            hermite_subsequence(flags, seq)

    def test_h_strictly_increasing(self):
        for spec in random_rational_specs(10, 10**4, seed=121):
            seq = complete_sequence(spec, 30)
            sub = hermite_subsequence(flags_via_criterion(spec, 31), seq)
            hs = [e.h for e in sub.entries]
            assert hs == sorted(set(hs))


class TestDefinitionOracle:
    def test_flags_match_full_lattice_scan(self):
        # definition-level check: a vector is flagged iff its norm line is
        # weakly minimal, for some parameter value, among the lines of EVERY
        # candidate lattice point (nearest numerator per denominator up to
        # the full period; everything else is pointwise dominated)
        for spec in random_rational_specs(10, 300, seed=151):
            value = spec.value
            V = value.denominator
            lines = [(Fraction(1), Fraction(0))]  # the (1, 0) vector
            by_q = {0: 0}
            r = 0
            step = value.numerator % V
            for b in range(1, V + 1):
                r += step
                if r >= V:
                    r -= V
                dist = Fraction(min(r, V - r), V)
                lines.append((dist * dist, Fraction(b * b)))
                by_q[b] = len(lines) - 1

            def feasible(k: int) -> bool:
                A_k, B_k = lines[k]
                low, high = Fraction(0), None
                for j, (A_j, B_j) in enumerate(lines):
                    if j == k:
                        continue
                    if A_j > A_k:
                        low = max(low, (B_k - B_j) / (A_j - A_k))
                    elif A_j < A_k:
                        bound = (B_j - B_k) / (A_k - A_j)
                        high = bound if high is None else min(high, bound)
                    elif B_j < B_k:
                        return False
                return high is None or low <= high

            flags = flags_via_criterion(spec, 10**5)
            seq = complete_sequence(spec, 10**5)
            for k, flag in enumerate(flags.flags):
                assert flag == feasible(by_q[seq[k].q])


class TestMoreInputs:
    def test_half_integer_theta(self):
        theta = parse_real("7/2")
        flags = flags_via_criterion(theta, 10)
        assert flags.flags == (True, True, True)
        envelope = flags_via_envelope(complete_sequence(theta, 10))
        assert envelope.flags == (True, True, True)

    def test_negative_theta(self):
        theta = parse_real("-22/7")  # reduces to x0 = 1/7
        seq = complete_sequence(theta, 10)
        assert [v.q for v in seq] == [0, 1, 7]
        assert seq[1].p == -3
        flags = flags_via_criterion(theta, 10)
        assert flags.flags == (True, True, True)
        assert flags.flags == flags_via_envelope(seq).flags

    def test_quadratic_pair_dynamics_exact(self):
        # the intrinsic coordinates of consecutive pairs are driven by the
        # forward map, verified in exact field arithmetic
        from fractions import Fraction as F

        from hermite_lab import step_T

        value = Q21.value
        seq = complete_sequence(Q21, 10)
        pairs = []
        for u, v in zip(seq, seq[1:]):
            x = abs(F(v.p) - value * v.q) / abs(F(u.p) - value * u.q)
            pairs.append((x, F(u.q, v.q)))
        for (x0, y0), (x1, y1) in zip(pairs, pairs[1:]):
            nx, ny = step_T((x0, y0))
            assert nx == x1 and ny == y1


class TestSkipPattern:
    def test_no_two_consecutive_false(self):
        specs = (
            [GOLDEN, Q21, SILVER, THETA38, BOUNDARY_TIE]
            + random_rational_specs(30, 10**6, seed=131)
            + list(random_quadratic_specs(10, seed=132))
        )
        for spec in specs:
            assert no_two_consecutive_false(flags_via_criterion(spec, 40).flags)

    def test_flag_zero_and_final_rational_true(self):
        for spec in random_rational_specs(20, 10**4, seed=141):
            flags = flags_via_criterion(spec, 10**5).flags
            assert flags[0] is True and flags[-1] is True
