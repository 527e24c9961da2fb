"""Skew-product correlations, finite-sums tails, Gaussian transfer."""

import random
from fractions import Fraction as F

import pytest

from rigidlab import families as fm
from rigidlab import lattice as lat
from rigidlab import measure as ms
from rigidlab.circleset import CircleSet
from rigidlab.errors import PreconditionError
from rigidlab.gaussians import (
    gaussian_pair_mass,
    interval_probability,
    verify_gaussian_transfer,
)
from rigidlab.haar import FactorPattern, haar_correlation_limit
from rigidlab.schedule import build_schedule
from rigidlab.skew import SkewSystem, fs_tail, skew_correlation

B23 = CircleSet.interval(0, F(2, 3))


class TestSkewCorrelation:
    def test_zero_shifts_give_base_measure(self):
        sys = SkewSystem(ms.uniform_atoms([0, F(1, 7), F(3, 7)]))
        assert skew_correlation(sys, B23, [0, 0, 0]) == F(2, 3)

    def test_dirac_zero_fibers_unmoved(self):
        sys = SkewSystem(ms.dirac(0))
        assert skew_correlation(sys, B23, [17, 51]) == F(2, 3)

    def test_third_rotation_vanishes(self):
        sys = SkewSystem(ms.dirac(F(1, 3)))
        assert skew_correlation(sys, B23, [1, 2]) == 0

    def test_invariance_shift_zero_prepended(self):
        rng = random.Random(4)
        for _ in range(100):
            atoms = [
                (F(rng.randint(0, 11), 12), F(1, 3)) for _ in range(3)
            ]
            merged = {}
            for x, w in atoms:
                merged[x] = merged.get(x, F(0)) + w
            base = ms.AtomicMeasure(list(merged.items()))
            lo = F(rng.randint(0, 5), 10)
            hi = lo + F(rng.randint(1, 4), 10)
            Bset = CircleSet.interval(lo, min(hi, F(9, 10)))
            shifts = [rng.randint(-20, 20) for _ in range(rng.randint(1, 3))]
            sys = SkewSystem(base)
            assert skew_correlation(sys, Bset, shifts) == skew_correlation(
                sys, Bset, [0] + shifts
            )

    def test_matches_haar_limit_for_cyclic_atoms(self):
        # uniform atoms on {k/q} behave exactly like the Haar average of the
        # cyclic annihilator group, for every q up to 12
        for q in range(1, 13):
            base = ms.uniform_atoms([F(k, q) for k in range(q)])
            sys = SkewSystem(base)
            for shifts in ([1], [1, 2], [2, 3]):
                got = skew_correlation(sys, B23, shifts)
                reps = [(F(k, q),) for k in range(q)]
                pattern = [
                    FactorPattern.of(rep_coeffs=(t,)) for t in shifts
                ]
                assert got == haar_correlation_limit(reps, B23, pattern)

    def test_structured_path_matches_exact(self):
        fam = fm.polynomial_family([[0, 1], [0, 0, 1]])
        s = build_schedule(fam, 3)
        G = lat.canonicalize([(2, 0), (0, 3)], 2)
        m = ms.sample_sigma(G, s, fam, 300, seed=8)
        plain = ms.AtomicMeasure(list(m.atoms))
        for shifts in ([1], [3, 7], [2, 5, 11]):
            fast = skew_correlation(SkewSystem(m), B23, shifts)
            exact = skew_correlation(SkewSystem(plain), B23, shifts)
            assert fast == pytest.approx(float(exact), abs=1e-9)

    def test_multi_interval_structured(self):
        fam = fm.polynomial_family([[0, 1]])
        s = build_schedule(fam, 3)
        m = ms.sample_sigma(lat.canonicalize([(2,)], 1), s, fam, 200, seed=8)
        plain = ms.AtomicMeasure(list(m.atoms))
        Bset = CircleSet.from_pairs([(0, F(1, 5)), (F(2, 5), F(4, 5))])
        fast = skew_correlation(SkewSystem(m), Bset, [1, 3])
        exact = skew_correlation(SkewSystem(plain), Bset, [1, 3])
        assert fast == pytest.approx(float(exact), abs=1e-9)


class TestFsTail:
    def test_all_sums(self):
        assert sorted(fs_tail([1, 2, 4], 0).values()) == [1, 2, 3, 4, 5, 6, 7]

    def test_past_first(self):
        assert sorted(fs_tail([1, 2, 4], 1).values()) == [2, 4, 6]

    def test_factorial_like(self):
        assert sorted(fs_tail([6, 24, 120], 0).values()) == [
            6, 24, 30, 120, 126, 144, 150,
        ]

    def test_alpha_recomputation(self):
        tail = fs_tail([3, 9, 27, 81], 1)
        for alpha, total in tail.sums:
            assert total == sum(tail.generators[i - 1] for i in alpha)
        assert len(tail.sums) == 2**3 - 1

    def test_rejects_non_monotone(self):
        with pytest.raises(PreconditionError):
            fs_tail([5, 3], 0)


class TestGaussianPairMass:
    def test_independence(self):
        got = gaussian_pair_mass(0.0, (-1.5, 0.5), (0, 2))
        want = interval_probability(-1.5, 0.5) * interval_probability(0, 2)
        assert got == pytest.approx(want, abs=1e-8)

    def test_perfect_correlation(self):
        got = gaussian_pair_mass(1.0, (-1, 0), (-1, 0))
        assert got == pytest.approx(interval_probability(-1, 0), abs=1e-12)

    def test_arcsine_closed_form(self):
        import math

        got = gaussian_pair_mass(0.5, (-40, 0), (-40, 0))
        want = 0.25 + math.asin(0.5) / (2 * math.pi)
        assert got == pytest.approx(want, abs=1e-8)
        assert got == pytest.approx(1 / 3, abs=1e-8)

    def test_monotone_in_rho_for_quadrant(self):
        grid = [r / 10 for r in range(-9, 10)]
        masses = [gaussian_pair_mass(r, (-40, 0), (-40, 0)) for r in grid]
        assert all(b > a for a, b in zip(masses, masses[1:]))

    def test_full_line(self):
        assert gaussian_pair_mass(0.3, (-40, 40), (-40, 40)) == pytest.approx(
            1, abs=1e-6
        )


class TestGaussianTransfer:
    def test_dirac_rigid_exact(self):
        fam = fm.polynomial_family([[0, 1], [0, 0, 1]])
        s = build_schedule(fam, 3)
        m = ms.sample_sigma(lat.full(2), s, fam, 100, seed=2)  # delta at 0
        rep = verify_gaussian_transfer(m, s, fam, lat.full(2), (-1, 0), 0.01)
        assert rep.passes(3)
        assert all(r.rigid for r in rep.rows)

    def test_mixed_directions(self):
        fam = fm.polynomial_family([[0, 1], [0, 0, 1]])
        G = lat.canonicalize([(2, 0), (0, 1)], 2)  # e2 rigid, e1 mixing
        sigma, sched, red, _ = ms.build_measure_for_group(fam, G, 5, 10**4, 42)
        rep = verify_gaussian_transfer(sigma, sched, fam, G, (-1, 0), 0.05)
        rigid_rows = [r for r in rep.rows if r.level == 5 and r.rigid]
        mixing_rows = [r for r in rep.rows if r.level == 5 and not r.rigid]
        assert rigid_rows and mixing_rows
        assert rep.passes(5)

    def test_full_line_always_passes(self):
        fam = fm.polynomial_family([[0, 1]])
        s = build_schedule(fam, 2)
        m = ms.sample_sigma(lat.canonicalize([(2,)], 1), s, fam, 500, seed=4)
        rep = verify_gaussian_transfer(
            m, s, fam, lat.canonicalize([(2,)], 1), (-40, 40), 1e-6
        )
        assert rep.passes(2)
