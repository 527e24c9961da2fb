"""Atomic torus measures sampled from schedules and their Fourier analysis.

The sampled measure keeps its product structure: each draw is a word of cell
digits (one digit per schedule level and coordinate), and the represented
point is scale * sum digit * alpha mod 1.  Fourier coefficients at huge
integer arguments t are computed through exact per-level phases
(t * scale * alpha mod 1 as a rational, then digit multiples mod 1), so no
precision is lost to floating-point reduction of astronomically large
products; the float stage only ever adds a handful of numbers in [0, 1).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import deciders as dec
from . import families as fm
from . import lattice as lat
from .errors import CapExceeded, PreconditionError, UnsupportedShape
from .schedule import Schedule, build_schedule, check_schedule

DEFAULT_CELL_CAP = 10**6
DEFAULT_DEPTH_CAP = 6
DEFAULT_SAMPLE_CAP = 10**7


@dataclass(frozen=True)
class CellMeasure:
    """Exact cell weights of lambda_G at factorial resolution k!."""

    level: int
    weights: dict

    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))


@dataclass(frozen=True)
class GroupCellStructure:
    """Product decomposition of lambda_G used by the sampler.

    support holds the coordinates (0-indexed) genuinely constrained by G;
    free coordinates carry plain Lebesgue measure.  rep_points are the
    annihilator representatives of the support part.
    """

    dim: int
    support: tuple[int, ...]
    free: tuple[int, ...]
    rep_points: tuple[tuple[Fraction, ...], ...]


def group_cell_structure(G: lat.Lattice, index_cap: int = lat.DEFAULT_INDEX_CAP) -> GroupCellStructure:
    free = tuple(
        j for j in range(G.ambient_dim) if all(row[j] == 0 for row in G.basis)
    )
    support = tuple(j for j in range(G.ambient_dim) if j not in free)
    if not support:
        return GroupCellStructure(G.ambient_dim, (), free, ((),))
    sub = lat.canonicalize(
        [[row[j] for j in support] for row in G.basis], len(support)
    )
    if lat.index_in_ambient(sub) == lat.INFINITE:
        raise UnsupportedShape(
            "cell weights support finite-index groups and products with "
            "unconstrained coordinates only"
        )
    ann = lat.annihilator(sub, index_cap)
    return GroupCellStructure(G.ambient_dim, support, free, ann.finite_reps)


def _support_cells(structure: GroupCellStructure, k: int):
    """Merged (cell digits on support coords, weight) pairs at level k."""
    kf = math.factorial(k)
    merged: dict[tuple[int, ...], Fraction] = {}
    share = Fraction(1, len(structure.rep_points))
    for rep in structure.rep_points:
        cell = tuple(int(y * kf) for y in rep)
        merged[cell] = merged.get(cell, Fraction(0)) + share
    return sorted(merged.items())


def cell_weights(
    G: lat.Lattice, k: int, cell_cap: int = DEFAULT_CELL_CAP
) -> CellMeasure:
    """lambda_G weights of the k!-adic cells, exact and summing to one."""
    if k < 1:
        raise PreconditionError("level must be a positive integer")
    structure = group_cell_structure(G)
    kf = math.factorial(k)
    support_cells = _support_cells(structure, k)
    total = len(support_cells) * kf ** len(structure.free)
    if total > cell_cap:
        raise CapExceeded(f"{total} cells exceed the cap {cell_cap}")
    free_weight = Fraction(1, kf ** len(structure.free))
    weights = {}
    free_digit_iter = [range(kf)] * len(structure.free)
    from itertools import product as iproduct

    for cell, w in support_cells:
        for free_digits in iproduct(*free_digit_iter):
            full = [0] * G.ambient_dim
            for pos, j in enumerate(structure.support):
                full[j] = cell[pos]
            for pos, j in enumerate(structure.free):
                full[j] = free_digits[pos]
            weights[tuple(full)] = w * free_weight
    return CellMeasure(k, weights)


class AtomicMeasure:
    """Finite weighted point set on [0, 1).

    Either a plain list of (position, weight) atoms or a sampled structure:
    distinct cell words encoded as category columns (one column per schedule
    level and coordinate, category values carrying the exact digits).
    Positions of sampled measures are materialized only on demand; Fourier
    analysis reduces t * digit * alpha mod 1 with raw integer arithmetic per
    category, so huge arguments lose nothing before the final float.
    """

    def __init__(
        self,
        atoms=None,
        *,
        alphas=None,
        categories=None,
        codes=None,
        weights=None,
        scale=1,
    ):
        import numpy as np

        self._atoms = None
        self.alphas = alphas
        self.categories = categories  # list per column of digit values
        self.codes = codes  # uint32 array (n_words, n_columns)
        self.weights = weights  # exact Fractions per word
        self.scale = scale
        self._weights_np = None
        if atoms is not None:
            merged: dict = {}
            for x, w in atoms:
                w = Fraction(w)
                if w <= 0:
                    raise PreconditionError("atom weights must be positive")
                key = x if isinstance(x, Fraction) else Fraction(x)
                key %= 1
                merged[key] = merged.get(key, Fraction(0)) + w
            self._atoms = tuple(sorted(merged.items()))
        elif codes is None:
            raise PreconditionError("measure needs atoms or a sampled structure")

    # -- structure helpers -------------------------------------------------
    @property
    def is_structured(self) -> bool:
        return self.codes is not None

    def total_weight(self) -> Fraction:
        if self._atoms is not None:
            return sum((w for _, w in self._atoms), Fraction(0))
        return sum(self.weights, Fraction(0))

    @property
    def weights_np(self):
        import numpy as np

        if self._weights_np is None:
            if self.is_structured:
                self._weights_np = np.array([float(w) for w in self.weights])
            else:
                self._weights_np = np.array([float(w) for _, w in self.atoms])
        return self._weights_np

    def _flat_alphas(self) -> list[Fraction]:
        return [a for level in self.alphas for a in level]

    @property
    def atoms(self) -> tuple:
        if self._atoms is None:
            merged: dict = {}
            flat = self._flat_alphas()
            for row, w in zip(self.codes, self.weights):
                x = Fraction(0)
                for col, code in enumerate(row):
                    d = self.categories[col][code]
                    if d:
                        x += d * flat[col]
                x = (self.scale * x) % 1
                merged[x] = merged.get(x, Fraction(0)) + w
            self._atoms = tuple(sorted(merged.items()))
        return self._atoms

    def phases(self, t: int):
        """numpy array of (t * position mod 1) per atom.

        Structured path: per column, theta = t * scale * alpha mod 1 is
        reduced with integer divmod (no gcd normalization), each category
        digit multiplies in modularly, and only then does float enter.
        """
        import numpy as np

        if self.is_structured:
            flat = self._flat_alphas()
            total = np.zeros(len(self.codes))
            ts = int(t) * int(self.scale)
            for col, a in enumerate(flat):
                p, q = a.numerator, a.denominator
                base = (ts % q) * p % q
                # int/int true division is correctly rounded at any size
                cat_phase = np.array(
                    [(int(d) * base % q) / q for d in self.categories[col]]
                )
                total += cat_phase[self.codes[:, col]]
            return total % 1.0
        return np.array([float((t * x) % 1) for x, _ in self.atoms])

    def to_json(self) -> dict:
        return {
            "atoms": [[str(x), str(w)] for x, w in self.atoms],
        }

    @staticmethod
    def from_json(obj: dict) -> "AtomicMeasure":
        return AtomicMeasure(
            [(Fraction(x), Fraction(w)) for x, w in obj["atoms"]]
        )

    def __eq__(self, other):
        return isinstance(other, AtomicMeasure) and self.atoms == other.atoms

    def __repr__(self):
        kind = "structured" if self.is_structured else "plain"
        n = len(self.codes) if self.is_structured else len(self.atoms)
        return f"AtomicMeasure({kind}, {n} atoms)"


def dirac(position=0) -> AtomicMeasure:
    return AtomicMeasure([(Fraction(position), Fraction(1))])


def uniform_atoms(positions: Sequence) -> AtomicMeasure:
    n = len(positions)
    return AtomicMeasure([(Fraction(x), Fraction(1, n)) for x in positions])


def sample_sigma(
    G: lat.Lattice,
    s: Schedule,
    fam: fm.SequenceFamily,
    n_samples: int,
    seed: int,
    sample_cap: int = DEFAULT_SAMPLE_CAP,
) -> AtomicMeasure:
    """Monte Carlo draws from the product of level measures P_k.

    Each draw picks, independently per level, a support cell according to
    lambda_G and uniform digits on the free coordinates; equal words merge
    with accumulated weight count/N.  Reproducible from the seed.
    """
    import numpy as np

    if n_samples < 1:
        raise PreconditionError("need at least one sample")
    if n_samples > sample_cap:
        raise CapExceeded(f"{n_samples} samples exceed the cap {sample_cap}")
    if G.ambient_dim != fam.size:
        raise PreconditionError("group dimension differs from family size")
    report = check_schedule(s, fam)
    if not report.all_pass():
        raise PreconditionError("schedule does not pass its exact residual check")
    structure = group_cell_structure(G)
    size = fam.size
    rng = np.random.default_rng(seed)
    columns = []
    for k in range(1, s.depth + 1):
        kf = math.factorial(k)
        cells = _support_cells(structure, k)
        probs = np.array([float(w) for _, w in cells])
        probs /= probs.sum()
        picks = rng.choice(len(cells), size=n_samples, p=probs)
        per_coord = [None] * size
        cell_matrix = np.array([cell for cell, _ in cells], dtype=object)
        for pos, j in enumerate(structure.support):
            values = np.array([int(cell[pos]) for cell, _ in cells], dtype=np.int64)
            per_coord[j] = values[picks]
        for j in structure.free:
            if kf > 2**62:
                raise CapExceeded(
                    "free-coordinate sampling is limited to levels with "
                    "k! below 2^62"
                )
            per_coord[j] = rng.integers(0, kf, size=n_samples, dtype=np.int64)
        columns.extend(per_coord)
    matrix = np.column_stack(columns)
    distinct, inverse, counts = np.unique(
        matrix, axis=0, return_inverse=True, return_counts=True
    )
    categories = []
    codes = np.empty(distinct.shape, dtype=np.uint32)
    for col in range(distinct.shape[1]):
        values, inv = np.unique(distinct[:, col], return_inverse=True)
        categories.append([int(v) for v in values])
        codes[:, col] = inv
    weights = tuple(Fraction(int(c), n_samples) for c in counts)
    return AtomicMeasure(
        alphas=s.alphas, categories=categories, codes=codes, weights=weights
    )


def fourier_coefficient(m: AtomicMeasure, t: int) -> complex:
    """sigma-hat(t) = sum w * e^{2 pi i t x}, double precision output."""
    import numpy as np

    angles = 2 * math.pi * m.phases(t)
    w = m.weights_np
    return complex(np.dot(w, np.cos(angles)), np.dot(w, np.sin(angles)))


def pushforward_scale(m: AtomicMeasure, factor: int) -> AtomicMeasure:
    """Image measure under x -> factor * x mod 1, weights merged."""
    if factor < 1:
        raise PreconditionError("scale factor must be a positive integer")
    if m.is_structured:
        return AtomicMeasure(
            alphas=m.alphas,
            categories=m.categories,
            codes=m.codes,
            weights=m.weights,
            scale=m.scale * factor,
        )
    return AtomicMeasure([((x * factor) % 1, w) for x, w in m.atoms])


@dataclass
class DichotomyRow:
    level: int
    vector: tuple[int, ...]
    coefficient: complex
    target: int
    deviation: float


@dataclass
class DichotomyReport:
    rows: list[DichotomyRow]
    coeff_bound: int
    tolerance: float

    def max_deviation(self, level: int | None = None) -> float:
        rows = [r for r in self.rows if level is None or r.level == level]
        return max(r.deviation for r in rows)

    def passes(self, top_level: int) -> bool:
        return self.max_deviation(top_level) <= self.tolerance

    def to_csv(self) -> str:
        lines = ["k,a,abs_coeff,target,deviation"]
        for r in self.rows:
            vec = " ".join(str(c) for c in r.vector)
            lines.append(
                f"{r.level},{vec},{abs(r.coefficient):.12g},{r.target},{r.deviation:.12g}"
            )
        return "\n".join(lines) + "\n"


def verify_dichotomy(
    m: AtomicMeasure,
    s: Schedule,
    fam: fm.SequenceFamily,
    G: lat.Lattice,
    coeff_bound: int,
    tol: float,
    levels: Sequence[int] | None = None,
    coeff_cap: int = 5,
) -> DichotomyReport:
    """Compare sigma-hat(sum a_j phi_j(n_k)) with the exact group character.

    The target is 1 for a in G and 0 otherwise; the report carries the
    deviation per (level, vector) and passes when the top level stays within
    the tolerance.
    """
    from itertools import product as iproduct

    if coeff_bound > coeff_cap:
        raise CapExceeded(
            f"coefficient bound {coeff_bound} exceeds the cap {coeff_cap}"
        )
    if levels is None:
        levels = range(1, s.depth + 1)
    rows = []
    for k in levels:
        vals = fm.evaluate(fam, s.indices[k - 1])
        for a in iproduct(range(-coeff_bound, coeff_bound + 1), repeat=fam.size):
            t = sum(c * v for c, v in zip(a, vals))
            coeff = fourier_coefficient(m, t)
            target = lat.character_integral(G, a)
            rows.append(
                DichotomyRow(k, a, coeff, target, abs(coeff - target))
            )
    return DichotomyReport(rows, coeff_bound, tol)


def build_measure_for_group(
    fam: fm.SequenceFamily,
    G: lat.Lattice,
    depth: int,
    n_samples: int,
    seed: int,
    search_budget: int | None = None,
    depth_cap: int = DEFAULT_DEPTH_CAP,
):
    """Reduction, schedule, sampling and rescaling in one pipeline.

    Returns (measure, schedule, reduction, image_group); the measure targets
    the rigidity/mixing dichotomy of (fam, G) through the image group of the
    reduction and the final scale pushforward.
    """
    if depth > depth_cap:
        raise CapExceeded(
            f"depth {depth} exceeds the cap {depth_cap}; raise depth_cap "
            "explicitly for deep runs"
        )
    if fam.kind != fm.POLYNOMIAL:
        raise PreconditionError("measure pipeline requires a polynomial family")
    if not fm.is_adequate(fam):
        raise PreconditionError("family is not adequate")
    if not dec.is_rigidity_group(G, fam):
        raise PreconditionError(
            "G does not contain the relation group A(phi); it is not a "
            "rigidity group for this family"
        )
    red, g_tilde = fm.reduce_family(fam, G)
    subfam = fm.subfamily(fam, red)
    kwargs = {} if search_budget is None else {"search_budget": search_budget}
    sched = build_schedule(subfam, depth, **kwargs)
    rho = sample_sigma(g_tilde, sched, subfam, n_samples, seed)
    sigma = pushforward_scale(rho, red.scale)
    return sigma, sched, red, g_tilde
