"""Executable counterexample demos: non-IP* recurrence sets.

Each demo pairs an exact rational ledger (the limit correlation along the
finite-sums tail, computed through annihilator representatives) with an
empirical scan of an actual sampled system: every finite sum of the schedule
indices past a cutoff is evaluated on the skew product and compared against
the recurrence threshold with a three-sigma Monte Carlo error bar.  A scan
point is conclusive only when the bar clears the threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import families as fm
from . import lattice as lat
from . import measure as ms
from .behrend import behrend_set, verify_behrend
from .circleset import CircleSet
from .errors import ConstructionFailed, PreconditionError
from .haar import FactorPattern, haar_correlation_limit
from .measure import AtomicMeasure, build_measure_for_group, fourier_coefficient
from .schedule import Schedule
from .skew import SkewSystem, fs_tail, skew_correlation

BELOW = "BELOW"
ABOVE = "ABOVE"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class ScanPoint:
    alpha: tuple[int, ...]
    value: int
    correlation: float
    stderr: float
    verdict: str


@dataclass
class TailScan:
    start_index: int
    threshold: float
    points: list[ScanPoint]

    @property
    def all_below(self) -> bool:
        return all(p.verdict == BELOW for p in self.points)

    @property
    def inconclusive_count(self) -> int:
        return sum(1 for p in self.points if p.verdict == INCONCLUSIVE)


def _correlation_with_error(base: AtomicMeasure, B: CircleSet, shifts, n_samples):
    """Correlation plus the Monte Carlo standard error of the mean."""
    if not base.is_structured:
        value = skew_correlation(SkewSystem(base), B, shifts)
        return float(value), 0.0
    from .skew import shifted_intersection_values

    weights = base.weights_np
    values = shifted_intersection_values(base, B, shifts)
    mean = float(np.dot(weights, values))
    second = float(np.dot(weights, values * values))
    variance = max(0.0, second - mean * mean)
    return mean, math.sqrt(variance / n_samples)


def scan_fs_tail(
    base: AtomicMeasure,
    B: CircleSet,
    polys: Sequence[Sequence[int]],
    schedule: Schedule,
    start_index: int,
    threshold: float,
    n_samples: int,
    early_abort: bool = False,
) -> TailScan:
    """Evaluate every finite sum of schedule indices past start_index."""
    tail = fs_tail(schedule.indices, start_index)
    points = []
    for alpha, n_alpha in tail.sums:
        shifts = [sum(c * n_alpha**i for i, c in enumerate(p)) for p in polys]
        corr, err = _correlation_with_error(base, B, shifts, n_samples)
        if corr + 3 * err <= threshold:
            verdict = BELOW
        elif corr - 3 * err > threshold:
            verdict = ABOVE
        else:
            verdict = INCONCLUSIVE
        points.append(ScanPoint(alpha, n_alpha, corr, err, verdict))
        if early_abort and verdict != BELOW:
            break
    return TailScan(start_index, threshold, points)


def smallest_passing_cutoff(
    base, B, polys, schedule, k0_max, threshold, n_samples
) -> tuple[int | None, dict[int, TailScan]]:
    """Smallest k0 <= k0_max whose whole tail scans conclusively below."""
    scans = {}
    for k0 in range(k0_max + 1):
        scan = scan_fs_tail(
            base, B, polys, schedule, k0, threshold, n_samples, early_abort=True
        )
        scans[k0] = scan
        if scan.all_below:
            # re-run without abort to materialize the full tail
            full = scan_fs_tail(
                base, B, polys, schedule, k0, threshold, n_samples
            )
            scans[k0] = full
            if full.all_below:
                return k0, scans
    return None, scans


def cor65_representatives(ell: int) -> list[tuple[Fraction, ...]]:
    """Annihilator representatives of the preimage group: the digit set
    a0 (1/3, 2/3, 0, ...) + sum_{s>=3} a_s (1/3) e_s over digits in {0,1,2}."""
    if ell < 2:
        raise PreconditionError("the construction needs at least two sequences")
    reps = []
    from itertools import product as iproduct

    for digits in iproduct(range(3), repeat=ell - 1):
        a0, rest = digits[0], digits[1:]
        y = [Fraction(a0, 3) % 1, Fraction(2 * a0, 3) % 1]
        y.extend(Fraction(a, 3) for a in rest)
        reps.append(tuple(y))
    return reps


@dataclass
class Cor65Report:
    ell: int
    polys: tuple[tuple[int, ...], ...]
    group: lat.Lattice
    padded_coordinates: tuple[int, ...]
    group_index: int
    limit: Fraction
    nu_power: Fraction
    gap: Fraction
    epsilon: Fraction
    exact_ledger_ok: bool
    cutoff: int | None
    scans: dict = field(repr=False, default_factory=dict)
    schedule: Schedule | None = field(repr=False, default=None)

    @property
    def passed(self) -> bool:
        return self.exact_ledger_ok and self.cutoff is not None

    def to_json(self) -> dict:
        scan = self.scans.get(self.cutoff)
        return {
            "ell": self.ell,
            "polys": [list(p) for p in self.polys],
            "group": self.group.to_json(),
            "padded_coordinates": list(self.padded_coordinates),
            "group_index": self.group_index,
            "limit": str(self.limit),
            "nu_power": str(self.nu_power),
            "gap": str(self.gap),
            "epsilon": str(self.epsilon),
            "exact_ledger_ok": self.exact_ledger_ok,
            "k0": self.cutoff,
            "threshold": str(self.nu_power - self.epsilon),
            "scan": None
            if scan is None
            else [
                {
                    "alpha": list(p.alpha),
                    "correlation": p.correlation,
                    "stderr": p.stderr,
                    "verdict": p.verdict,
                    "approx": True,
                }
                for p in scan.points
            ],
            "passed": self.passed,
        }


def build_cor65_group(polys: Sequence[Sequence[int]]) -> tuple[lat.Lattice, tuple[int, ...]]:
    """The finite-index group generated by -2c1+c2, the tripled coefficient
    vectors, and tripled unit vectors on padding coordinates when needed."""
    mats = [list(p) for p in polys]
    degree = max(len(p) - 1 for p in mats)
    cvecs = [[(p[i] if i < len(p) else 0) for i in range(1, degree + 1)] for p in mats]
    gens = [[-2 * a + b for a, b in zip(cvecs[0], cvecs[1])]]
    gens.extend([3 * c for c in vec] for vec in cvecs)
    g_prime = lat.canonicalize(gens, degree)
    padded = []
    g = g_prime
    t = 1
    while lat.index_in_ambient(g) == lat.INFINITE:
        if t > degree:
            raise ConstructionFailed(
                "no padding coordinate with trivial line intersection remains"
            )
        line = lat.intersect_coordinate_subspace(g_prime, {t})
        if line.is_trivial():
            padded.append(t)
            vec = [0] * degree
            vec[t - 1] = 3
            g = lat.lattice_sum(g, lat.canonicalize([vec], degree))
        t += 1
    return g, tuple(padded)


def cor65_demo(
    ell: int,
    polys: Sequence[Sequence[int]],
    depth: int,
    n_samples: int,
    seed: int,
    k0_max: int = 3,
    search_budget: int | None = None,
) -> Cor65Report:
    """Non-IP* recurrence set for independent polynomials (exact ledger plus
    finite-sums scan of the sampled skew product)."""
    family = fm.polynomial_family(polys)
    if family.size != ell or ell < 2:
        raise PreconditionError("need ell >= 2 polynomials")
    if any(p[0] != 0 for p in family.polys):
        raise PreconditionError("polynomials must have zero constant term")
    matrix = [row[1:] for row in family.coefficient_matrix()]
    if fm._rank(matrix) != ell:
        raise PreconditionError("polynomials must be linearly independent")

    group, padded = build_cor65_group(family.polys)
    degree = family.max_degree
    index = lat.index_in_ambient(group)

    B = CircleSet.interval(0, Fraction(2, 3))
    reps = cor65_representatives(ell)
    pattern = [
        FactorPattern.of(rep_coeffs=tuple(1 if i == j else 0 for i in range(ell)))
        for j in range(ell)
    ]
    limit = haar_correlation_limit(reps, B, pattern)
    closed_form = Fraction(2 ** (ell - 1), 3**ell)
    nu_power = Fraction(2, 3) ** (ell + 1)
    gap = nu_power - limit
    epsilon = Fraction(1, 3 ** (ell + 1))
    ledger_ok = (
        limit == closed_form
        and gap == Fraction(2 ** (ell - 1), 3 ** (ell + 1))
        and gap >= 2 * epsilon
    )

    monomial_family = fm.polynomial_family(
        [[0] * d + [1] for d in range(1, degree + 1)]
    )
    sigma, sched, red, _ = build_measure_for_group(
        monomial_family,
        group,
        depth,
        n_samples,
        seed,
        search_budget=search_budget,
        depth_cap=max(depth, ms.DEFAULT_DEPTH_CAP),
    )
    threshold = float(nu_power - epsilon)
    cutoff, scans = smallest_passing_cutoff(
        sigma, B, family.polys, sched, k0_max, threshold, n_samples
    )
    return Cor65Report(
        ell=ell,
        polys=family.polys,
        group=group,
        padded_coordinates=padded,
        group_index=index,
        limit=limit,
        nu_power=nu_power,
        gap=gap,
        epsilon=epsilon,
        exact_ledger_ok=ledger_ok,
        cutoff=cutoff,
        scans=scans,
        schedule=sched,
    )


@dataclass
class Cor66Report:
    p: tuple[int, ...]
    q: tuple[int, ...]
    ell: int
    behrend: CircleSet
    limit: Fraction
    triple_integral: Fraction
    bound: Fraction
    exact_ledger_ok: bool
    rigid_coefficients: list
    mixing_coefficient: float
    cutoff: int | None
    scans: dict = field(repr=False, default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.exact_ledger_ok and self.cutoff is not None

    def to_json(self) -> dict:
        return {
            "p": list(self.p),
            "q": list(self.q),
            "ell": self.ell,
            "behrend_set": self.behrend.to_json(),
            "limit": str(self.limit),
            "triple_integral": str(self.triple_integral),
            "bound": str(self.bound),
            "exact_ledger_ok": self.exact_ledger_ok,
            "k0": self.cutoff,
            "passed": self.passed,
        }


def cor66_demo(
    p: Sequence[int],
    q: Sequence[int],
    ell: int,
    depth: int,
    n_samples: int,
    seed: int,
    k0_max: int = 2,
    search_budget: int | None = None,
) -> Cor66Report:
    """Degree-matched pair (p, q) with deg(2p - q) strictly between: the set
    of large returns is shown non-IP* against a Behrend-type target set."""
    fam_pair = fm.polynomial_family([p, q])
    pc, qc = fam_pair.coefficient_matrix()
    if pc[0] != 0 or qc[0] != 0:
        raise PreconditionError("polynomials must have zero constant term")
    deg_p = max(i for i, c in enumerate(pc) if c)
    deg_q = max(i for i, c in enumerate(qc) if c)
    double_diff = [2 * a - b for a, b in zip(pc, qc)]
    deg_diff = max((i for i, c in enumerate(double_diff) if c), default=0)
    if not (deg_p == deg_q > deg_diff > 0):
        raise PreconditionError(
            "need deg(p) = deg(q) > deg(2p - q) > 0 exactly"
        )
    degree = deg_p
    B = behrend_set(ell)
    triple, bound = verify_behrend(B, ell)
    lead = pc[degree]
    limit = haar_correlation_limit(
        [()],
        B,
        [
            FactorPattern.of(free_var=0, free_coef=lead),
            FactorPattern.of(free_var=0, free_coef=2 * lead),
        ],
    )
    ledger_ok = limit == triple and triple <= bound

    group = lat.canonicalize(
        [lat.standard_basis(degree, j) for j in range(1, degree)], degree
    )
    monomial_family = fm.polynomial_family(
        [[0] * d + [1] for d in range(1, degree + 1)]
    )
    sigma, sched, red, _ = build_measure_for_group(
        monomial_family,
        group,
        depth,
        n_samples,
        seed,
        search_budget=search_budget,
        depth_cap=max(depth, ms.DEFAULT_DEPTH_CAP),
    )
    top = sched.indices[-1]
    vals = fm.evaluate(monomial_family, top)
    rigid = [fourier_coefficient(sigma, vals[j]).real for j in range(degree - 1)]
    mixing = abs(fourier_coefficient(sigma, vals[degree - 1]))
    threshold = float(B.measure() ** ell)
    cutoff, scans = smallest_passing_cutoff(
        sigma, B, (tuple(pc), tuple(qc)), sched, k0_max, threshold, n_samples
    )
    return Cor66Report(
        p=tuple(pc),
        q=tuple(qc),
        ell=ell,
        behrend=B,
        limit=limit,
        triple_integral=triple,
        bound=bound,
        exact_ledger_ok=ledger_ok,
        rigid_coefficients=rigid,
        mixing_coefficient=mixing,
        cutoff=cutoff,
        scans=scans,
    )


@dataclass
class Cor67PrimeRow:
    prime: int
    limit: Fraction
    distance_to_uniform: Fraction
    cutoff: int | None
    inconclusive: int


@dataclass
class Cor67Report:
    ell: int
    primes: tuple[int, ...]
    behrend: CircleSet
    uniform_limit: Fraction
    bound: Fraction
    rows: list[Cor67PrimeRow]
    exact_ledger_ok: bool

    @property
    def passed(self) -> bool:
        return self.exact_ledger_ok and any(r.cutoff is not None for r in self.rows)

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "primes": list(self.primes),
            "behrend_set": self.behrend.to_json(),
            "uniform_limit": str(self.uniform_limit),
            "bound": str(self.bound),
            "rows": [
                {
                    "prime": r.prime,
                    "limit": str(r.limit),
                    "distance_to_uniform": str(r.distance_to_uniform),
                    "k0": r.cutoff,
                    "inconclusive": r.inconclusive,
                }
                for r in self.rows
            ],
            "exact_ledger_ok": self.exact_ledger_ok,
            "passed": self.passed,
        }


def cor67_exact_limit(B: CircleSet, prime: int) -> Fraction:
    """Exact limit for the (n, 2n, n^2)-pattern with first coordinate on the
    prime cyclic annihilator and second coordinate free."""
    reps = [(Fraction(k, prime),) for k in range(prime)]
    pattern = [
        FactorPattern.of(rep_coeffs=(1,)),
        FactorPattern.of(rep_coeffs=(2,)),
        FactorPattern.of(free_var=0, free_coef=1),
    ]
    return haar_correlation_limit(reps, B, pattern)


def cor67_uniform_limit(B: CircleSet) -> Fraction:
    pattern = [
        FactorPattern.of(free_var=0, free_coef=1),
        FactorPattern.of(free_var=0, free_coef=2),
        FactorPattern.of(free_var=1, free_coef=1),
    ]
    return haar_correlation_limit([()], B, pattern)


def cor67_demo(
    ell: int,
    primes: Sequence[int],
    depth: int,
    n_samples: int,
    seed: int,
    k0_max: int = 2,
    scan_prime_cap: int = 50,
    search_budget: int | None = None,
) -> Cor67Report:
    """Mixed pattern (n, 2n, n^2): exact prime-ladder limits converging to
    the uniform value under the Behrend bound, with a scan of the sampled
    system for affordable primes."""
    primes = tuple(int(x) for x in primes)
    if any(b <= a for a, b in zip(primes, primes[1:])):
        raise PreconditionError("primes must be increasing")
    B = behrend_set(ell)
    uniform = cor67_uniform_limit(B)
    triple, _ = verify_behrend(B, ell)
    bound = B.measure() ** ell / 2 * B.measure()
    ledger_ok = uniform == triple * B.measure() and uniform <= bound
    fam = fm.polynomial_family([[0, 1], [0, 0, 1]])
    rows = []
    for prime in primes:
        limit = cor67_exact_limit(B, prime)
        distance = abs(limit - uniform)
        cutoff = None
        inconclusive = 0
        if prime <= scan_prime_cap:
            group = lat.canonicalize([(prime, 0)], 2)
            sigma, sched, red, _ = build_measure_for_group(
                fam,
                group,
                depth,
                n_samples,
                seed,
                search_budget=search_budget,
                depth_cap=max(depth, ms.DEFAULT_DEPTH_CAP),
            )
            threshold = float(B.measure() ** ell)
            scan_polys = ((0, 1), (0, 2), (0, 0, 1))
            cutoff, scans = smallest_passing_cutoff(
                sigma, B, scan_polys, sched, k0_max, threshold, n_samples
            )
            if cutoff is not None:
                inconclusive = scans[cutoff].inconclusive_count
        rows.append(Cor67PrimeRow(prime, limit, distance, cutoff, inconclusive))
    return Cor67Report(
        ell=ell,
        primes=primes,
        behrend=B,
        uniform_limit=uniform,
        bound=bound,
        rows=rows,
        exact_ledger_ok=ledger_ok,
    )
