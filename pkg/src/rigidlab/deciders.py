"""Exact deciders for the algebraic mixing/rigidity characterizations.

The central test: a subset F of coordinate indices admits a transformation
rigid along phi_j for j in F and mixing along the rest (on one sequence)
exactly when no relation a in A(phi) has support escaping F in a single
coordinate with |a_j| = 1.  That condition is decided per coordinate through
gcds of lattice slices, with witnesses extracted by extended-gcd combinations
whenever it fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from . import families as fm
from . import lattice as lat
from .errors import CapExceeded, PreconditionError

ALL_SPLITS_MAX_DIM = 20


@dataclass(frozen=True)
class SplitVerdict:
    feasible: bool
    witness_vector: lat.IntVec | None = None
    witness_coordinate: int | None = None
    witness_group: lat.Lattice | None = None
    user_asserted: bool = False

    def __bool__(self) -> bool:
        return self.feasible


def is_rigidity_group(G: lat.Lattice, fam: fm.SequenceFamily) -> bool:
    """G can be realized as the rigidity group of (phi_j) iff A(phi) <= G."""
    A = fm.relation_group(fam)
    if G.ambient_dim != A.ambient_dim:
        raise PreconditionError("group dimension differs from family size")
    return all(lat.member(G, row) for row in A.basis)


def _unit_coordinate_witness(slice_lattice: lat.Lattice, j: int) -> lat.IntVec:
    """Element of the slice with j-th coordinate exactly 1.

    Exists whenever the gcd of the basis j-coordinates is 1; built from the
    extended-gcd cofactors, so the output is deterministic.
    """
    ambient = slice_lattice.ambient_dim
    acc = None  # (value at coordinate j, vector)
    for row in slice_lattice.basis:
        c = row[j - 1]
        if c == 0:
            continue
        if acc is None:
            acc = (c, list(row))
            continue
        g, s, t = lat.xgcd(acc[0], c)
        acc = (g, [s * x + t * y for x, y in zip(acc[1], row)])
        if g == 1:
            break
    assert acc is not None and abs(acc[0]) == 1
    vec = acc[1] if acc[0] == 1 else [-x for x in acc[1]]
    assert vec[j - 1] == 1
    return tuple(vec)


def split_feasible(
    fam: fm.SequenceFamily, F: Iterable[int]
) -> SplitVerdict:
    """Can one sequence make phi_j rigid exactly for j in F?

    Infeasible iff some coordinate j outside F reaches gcd 1 in the slice of
    A(phi) supported on F + {j}; the returned witness then lies in A(phi),
    has support escaping F only at j, and has a_j = 1.
    """
    A = fm.relation_group(fam)
    user_asserted = fam.kind == fm.EXPLICIT
    F = set(F)
    size = A.ambient_dim
    if any(not 1 <= j <= size for j in F):
        raise PreconditionError("F contains an out-of-range index")
    for j in range(1, size + 1):
        if j in F:
            continue
        slice_lattice = lat.intersect_coordinate_subspace(A, F | {j})
        if lat.coordinate_image_gcd(slice_lattice, j) == 1:
            w = _unit_coordinate_witness(slice_lattice, j)
            return SplitVerdict(
                False, witness_vector=w, witness_coordinate=j, user_asserted=user_asserted
            )
    return SplitVerdict(True, user_asserted=user_asserted)


def all_splits(fam: fm.SequenceFamily) -> dict[frozenset[int], SplitVerdict]:
    size = fam.size
    if size > ALL_SPLITS_MAX_DIM:
        raise CapExceeded(f"2^{size} subsets exceed the enumeration cap")
    table = {}
    for mask in range(1 << size):
        F = frozenset(j + 1 for j in range(size) if mask >> j & 1)
        table[F] = split_feasible(fam, F)
    return table


@dataclass(frozen=True)
class InterpolationVerdict:
    holds: bool
    witness_vector: lat.IntVec | None = None
    witness_coordinate: int | None = None

    def __bool__(self) -> bool:
        return self.holds


def interpolation_condition(fam: fm.SequenceFamily) -> InterpolationVerdict:
    """Adequate and no relation uses any coordinate with |a_j| = 1.

    This is the algebraic gate for realizing every rigidity/mixing mixture
    lambda in [0,1]^l along a single sequence.
    """
    if fam.kind != fm.EXPLICIT and not fm.is_adequate(fam):
        return InterpolationVerdict(False)
    A = fm.relation_group(fam)
    for j in range(1, A.ambient_dim + 1):
        if lat.coordinate_image_gcd(A, j) == 1:
            w = _unit_coordinate_witness(A, j)
            return InterpolationVerdict(False, witness_vector=w, witness_coordinate=j)
    return InterpolationVerdict(True)


def poly_group_condition(fam: fm.SequenceFamily, F: Iterable[int]) -> bool:
    """Finite-index-subgroup condition inside the coefficient space Z^d.

    Valid for zero-constant-term polynomial families: identify each phi_j
    with its degree 1..d coefficient vector; the condition asks that no
    excluded phi_j lie in the integer span of {phi_i : i in F}.
    """
    if fam.kind != fm.POLYNOMIAL:
        raise PreconditionError("the coefficient-space condition needs polynomials")
    if any(p[0] != 0 for p in fam.polys):
        raise PreconditionError("constant terms must vanish")
    F = set(F)
    size = fam.size
    if any(not 1 <= j <= size for j in F):
        raise PreconditionError("F contains an out-of-range index")
    matrix = fam.coefficient_matrix()
    vectors = [row[1:] for row in matrix]
    d = len(vectors[0])
    span = lat.canonicalize([vectors[i - 1] for i in sorted(F)], d)
    return all(not lat.member(span, vectors[j - 1]) for j in range(1, size + 1) if j not in F)


def split_witness_group(fam: fm.SequenceFamily, F: Iterable[int]) -> lat.Lattice:
    """Finite-index H with A(phi) <= H and e_j in H exactly for j in F."""
    F = set(F)
    verdict = split_feasible(fam, F)
    if not verdict.feasible:
        raise PreconditionError(
            f"split infeasible for F={sorted(F)}; witness {verdict.witness_vector}"
        )
    A = fm.relation_group(fam)
    size = A.ambient_dim
    G = lat.lattice_sum(
        A, lat.canonicalize([lat.standard_basis(size, i) for i in sorted(F)], size)
    )
    excluded = [lat.standard_basis(size, j) for j in range(1, size + 1) if j not in F]
    if not excluded:
        return G  # F covers every coordinate, so G is already Z^l
    return lat.finite_index_extension(G, excluded)
