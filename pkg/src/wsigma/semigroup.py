"""Numerical semigroups, standard bases and Young diagrams.

Indexing follows one fixed convention throughout the package: the element
and gap sequences ``N(i)`` and ``Nc(i)`` are 0-based, the diagram rows
``Lambda_i`` are 1-based (``rows[i - 1]``).  For a semigroup of genus ``g``
with gaps ``Nc(0) < ... < Nc(g-1)`` the diagram rows are
``Lambda_i = Nc(g - i) - g + i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, reduce
from math import gcd
from typing import Iterable, Sequence

from .errors import (
    EmptyGenerators,
    GenusZero,
    InconsistentDh,
    IndexOutOfRange,
    NonCoprimeGenerators,
    NotCoprime,
    ValidationError,
)


@dataclass(frozen=True)
class NumericalSemigroup:
    """A cofinite additive submonoid of the nonnegative integers.

    Build instances with :func:`build_semigroup`; the constructor trusts its
    arguments.
    """

    generators: tuple[int, ...]
    gaps: tuple[int, ...]
    conductor: int

    @property
    def genus(self) -> int:
        return len(self.gaps)

    @property
    def multiplicity(self) -> int:
        """Smallest nonzero element, the ``r`` of the standard basis."""
        return self.generators[0]

    @cached_property
    def _gapset(self) -> frozenset[int]:
        return frozenset(self.gaps)

    def __contains__(self, n: int) -> bool:
        return n >= 0 and n not in self._gapset

    def N(self, i: int) -> int:
        """The ``i``-th element (0-based), ``N(0) = 0``."""
        if i < 0:
            raise IndexOutOfRange(f"element index {i} < 0")
        # below the conductor the elements are the non-gaps, after it all integers
        small = self.small_elements
        if i < len(small):
            return small[i]
        return self.conductor + (i - len(small))

    def Nc(self, i: int) -> int:
        """The ``i``-th gap (0-based)."""
        if not 0 <= i < self.genus:
            raise IndexOutOfRange(f"gap index {i} outside 0..{self.genus - 1}")
        return self.gaps[i]

    @cached_property
    def small_elements(self) -> tuple[int, ...]:
        return tuple(n for n in range(self.conductor) if n not in self._gapset)

    def elements_up_to(self, bound: int) -> list[int]:
        return [n for n in range(bound + 1) if n in self]

    @property
    def frobenius_number(self) -> int:
        return self.conductor - 1

    @property
    def is_symmetric(self) -> bool:
        return self.genus > 0 and (2 * self.genus - 1) in self._gapset

    def to_dict(self) -> dict:
        return {
            "generators": list(self.generators),
            "gaps": list(self.gaps),
            "genus": self.genus,
            "conductor": self.conductor,
            "symmetric": self.is_symmetric,
        }


def _sieve(gens: Sequence[int]) -> tuple[list[bool], int]:
    """Membership table until ``min(gens)`` consecutive members appear."""
    m = min(gens)
    member = [True]
    run, n = 1, 0
    # Schur's bound (a_1 - 1)(a_n - 1) caps the Frobenius number
    hard_cap = (m - 1) * (max(gens) - 1) + m + 1
    while run < m:
        n += 1
        hit = any(n - a >= 0 and member[n - a] for a in gens)
        member.append(hit)
        run = run + 1 if hit else 0
        if n > hard_cap + m:  # pragma: no cover - gcd check prevents this
            raise NonCoprimeGenerators("sieve did not reach a conductor")
    return member, n - m + 1


def build_semigroup(generators: Iterable[int]) -> NumericalSemigroup:
    """Semigroup generated by ``generators``, reduced to its minimal generating set.

    Examples
    --------
    >>> H = build_semigroup([3, 7, 8])
    >>> H.gaps, H.genus, H.conductor
    ((1, 2, 4, 5), 4, 6)
    """
    gens = sorted({int(a) for a in generators})
    if not gens:
        raise EmptyGenerators("generator list is empty")
    if gens[0] <= 0:
        raise ValidationError("generators must be positive integers")
    d = reduce(gcd, gens)
    if d != 1:
        raise NonCoprimeGenerators(f"gcd of generators is {d}", gcd=d)
    member, conductor = _sieve(gens)
    gaps = tuple(n for n in range(conductor) if not member[n])
    def inside(n: int) -> bool:
        return n >= conductor or member[n]

    minimal = []
    for a in gens:
        # a is redundant iff it is a sum of two nonzero elements
        if not any(inside(b) and inside(a - b) for b in range(1, a)):
            minimal.append(a)
    return NumericalSemigroup(tuple(minimal), gaps, conductor)


def semigroup_from_gaps(gaps: Iterable[int]) -> NumericalSemigroup:
    """Semigroup with the given gap set; raises if the complement is not closed."""
    gapset = sorted(set(gaps))
    if any(n <= 0 for n in gapset):
        raise ValidationError("gaps must be positive integers")
    conductor = gapset[-1] + 1 if gapset else 0
    members = [n for n in range(1, conductor + 1) if n not in gapset]
    for a in members:
        for b in members:
            if a + b < conductor and (a + b) in gapset:
                raise ValidationError(f"complement of {gapset} is not additively closed")
    gens = [n for n in range(1, 2 * max(conductor, 1) + 2) if n not in gapset]
    return build_semigroup(gens)


# --------------------------------------------------------------------------
# standard basis


@dataclass(frozen=True)
class StandardBasis:
    r: int
    tilde_e: tuple[int, ...]  # indexed by residue class i mod r
    ordered_e: tuple[int, ...]  # ascending, ordered_e[0] = 0

    def to_dict(self) -> dict:
        return {"r": self.r, "tilde_e": list(self.tilde_e), "ordered_e": list(self.ordered_e)}


def standard_basis(H: NumericalSemigroup) -> StandardBasis:
    """Minimal element of ``H`` in each residue class modulo ``r = min H\\{0}``."""
    r = H.multiplicity
    tilde = [-1] * r
    n = 0
    while min(tilde) < 0:
        if n in H and tilde[n % r] < 0:
            tilde[n % r] = n
        n += 1
    return StandardBasis(r, tuple(tilde), tuple(sorted(tilde)))


# --------------------------------------------------------------------------
# Young diagrams


def conjugate(rows: Sequence[int]) -> tuple[int, ...]:
    if not rows:
        return ()
    return tuple(sum(1 for x in rows if x >= j) for j in range(1, rows[0] + 1))


@dataclass(frozen=True)
class YoungDiagram:
    """Partition ``rows`` (weakly decreasing, positive) with Frobenius data.

    ``frobenius`` is stored as ``(a_r, ..., a_1; b_r, ..., b_1)``: ``a_i`` is the
    number of boxes below and ``b_i`` the number to the right of the i-th
    diagonal box, counted from the upper left.
    """

    rows: tuple[int, ...]

    def __post_init__(self):
        rows = tuple(int(x) for x in self.rows)
        if any(x <= 0 for x in rows) or any(rows[i] < rows[i + 1] for i in range(len(rows) - 1)):
            raise ValidationError(f"rows {rows} are not a partition")
        object.__setattr__(self, "rows", rows)

    @property
    def size(self) -> int:
        return sum(self.rows)

    @property
    def length(self) -> int:
        return len(self.rows)

    @cached_property
    def conjugate(self) -> tuple[int, ...]:
        return conjugate(self.rows)

    @property
    def rank(self) -> int:
        return sum(1 for i, x in enumerate(self.rows, start=1) if x >= i)

    @cached_property
    def arms(self) -> tuple[int, ...]:
        """``b_1, ..., b_rank`` (boxes to the right of each diagonal box)."""
        return tuple(self.rows[i] - i - 1 for i in range(self.rank))

    @cached_property
    def legs(self) -> tuple[int, ...]:
        """``a_1, ..., a_rank`` (boxes below each diagonal box)."""
        return tuple(self.conjugate[i] - i - 1 for i in range(self.rank))

    @property
    def frobenius(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(reversed(self.legs)), tuple(reversed(self.arms))

    @property
    def hooks(self) -> tuple[int, ...]:
        """Diagonal hook lengths ``l_i = a_i + b_i + 1``, i = 1..rank."""
        return tuple(a + b + 1 for a, b in zip(self.legs, self.arms))

    def hook_length(self, i: int, j: int) -> int:
        """Hook length of box (i, j), 1-based."""
        return self.rows[i - 1] - j + self.conjugate[j - 1] - i + 1

    def all_hook_lengths(self) -> list[int]:
        return [self.hook_length(i, j) for i in range(1, self.length + 1) for j in range(1, self.rows[i - 1] + 1)]

    @property
    def is_self_conjugate(self) -> bool:
        return self.rows == self.conjugate

    def to_dict(self) -> dict:
        a, b = self.frobenius
        return {"rows": list(self.rows), "frobenius": [list(a), list(b)], "hooks": list(self.hooks), "rank": self.rank}


def young_diagram(H: NumericalSemigroup) -> YoungDiagram:
    g = H.genus
    if g == 0:
        raise GenusZero("the trivial semigroup has an empty diagram")
    return YoungDiagram(tuple(H.Nc(g - i) - g + i for i in range(1, g + 1)))


def semigroup_of_diagram(lam: YoungDiagram) -> NumericalSemigroup:
    """Inverse of :func:`young_diagram`; rejects diagrams with no semigroup."""
    g = lam.length
    gaps = [lam.rows[i - 1] + g - i for i in range(1, g + 1)]
    try:
        H = semigroup_from_gaps(gaps)
    except ValidationError as exc:
        raise ValidationError(f"diagram {lam.rows} is not associated with a numerical semigroup") from exc
    return H


def is_semigroup_diagram(lam: YoungDiagram) -> bool:
    try:
        semigroup_of_diagram(lam)
    except ValidationError:
        return False
    return True


@dataclass(frozen=True)
class Truncation:
    upper: YoungDiagram | None  # first k rows, None for k = 0
    lower: YoungDiagram | None  # remaining rows, None for k = g
    lower_semigroup: NumericalSemigroup


def truncate_diagram(H: NumericalSemigroup, k: int) -> Truncation:
    """Split the diagram after ``k`` rows; the lower part belongs to a larger semigroup."""
    g = H.genus
    if not 0 <= k <= g:
        raise IndexOutOfRange(f"k={k} outside 0..{g}")
    lam = young_diagram(H)
    added = [H.Nc(g - j) for j in range(1, k + 1)]
    lower_sg = build_semigroup(list(H.generators) + added)
    if not set(lower_sg.gaps) <= set(H.gaps):  # pragma: no cover - structural fact
        raise ValidationError("lower semigroup gained gaps")
    upper = YoungDiagram(lam.rows[:k]) if k > 0 else None
    lower = YoungDiagram(lam.rows[k:]) if k < g else None
    if lower is not None and young_diagram(lower_sg).rows != lower.rows:
        raise ValidationError(f"truncated diagram {lower.rows} does not match its semigroup")
    return Truncation(upper, lower, lower_sg)


def natural_index(H: NumericalSemigroup, k: int) -> tuple[int, ...]:
    """Theta-derivative directions for the k-th stratum (1-based indices).

    The hooks of the truncated diagram are gaps of ``H``; each hook
    ``l`` is recorded as the index ``L`` with ``Nc(g - L) = l``.
    """
    g = H.genus
    if not 0 <= k < g:
        raise IndexOutOfRange(f"k={k} outside 0..{g - 1}")
    lower = truncate_diagram(H, k).lower
    assert lower is not None
    out = []
    for hook in lower.hooks:
        if hook not in H.gaps:  # pragma: no cover - hooks of semigroup diagrams are gaps
            raise ValidationError(f"hook {hook} of truncated diagram is not a gap")
        out.append(g - H.gaps.index(hook))
    if out[0] != k + 1:  # pragma: no cover - structural fact
        raise ValidationError("first natural index is not k + 1")
    return tuple(out)


def bezout_pair(r: int, s: int) -> tuple[int, int]:
    """Smallest positive ``(i_s, i_r)`` with ``i_s * s - i_r * r = 1``."""
    if r < 2 or s < 2 or gcd(r, s) != 1:
        raise NotCoprime(f"({r}, {s}) must be coprime integers >= 2")
    i_s = pow(s, -1, r)
    i_r = (i_s * s - 1) // r
    if i_r <= 0:
        i_s += r
        i_r = (i_s * s - 1) // r
    return i_s, i_r


def dual_weight_sets(H: NumericalSemigroup, d_h: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The sets of pole orders ``d_h - e_i + kr`` (with ``e_i - (k+1) r > 0``) and their duals."""
    sb = standard_basis(H)
    r = sb.r
    hat, star = [], []
    for e in sb.ordered_e:
        k = 0
        while e - (k + 1) * r > 0:
            hat.append(d_h - e + k * r)
            star.append(d_h + e - r * (k + 2))
            k += 1
    if len(set(hat)) != H.genus or len(set(star)) != H.genus:
        raise InconsistentDh(f"d_h={d_h} gives {len(set(hat))} weights, expected genus {H.genus}")
    return tuple(sorted(hat)), tuple(sorted(star))


def semigroup_report(H: NumericalSemigroup) -> dict:
    out = H.to_dict()
    out["standard_basis"] = standard_basis(H).to_dict()
    if H.genus > 0:
        lam = young_diagram(H)
        out.update({"young_rows": list(lam.rows), "frobenius": lam.to_dict()["frobenius"], "hooks": list(lam.hooks)})
        out["natural_index"] = {str(k): list(natural_index(H, k)) for k in range(H.genus)}
    return out
