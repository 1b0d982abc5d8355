"""Election data model and ballot algebra.

A :class:`Profile` is the in-memory form of a multiwinner ranked election:
a candidate roster, a deduplicated multiset of weighted partial strict
rankings, and a seat count ``k``.  Candidates left off a ballot are treated
as tied for last place.  All rules in :mod:`mwspoilers.methods` consume this
type, and every operation here is a pure function, so profiles can be shared
freely across threads.

Candidates are dense integer indices ``0..m-1``; display names live in the
profile roster.  Removing or restricting candidates recompacts indices but
keeps the surviving names, so reports always print original names.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence


class ProfileError(ValueError):
    """Raised when ballot data violates a profile invariant."""


class UnrankedModel(str, enum.Enum):
    """How positional scores treat candidates missing from a partial ballot.

    ``OPTIMISTIC`` gives an unranked candidate ``m - l - 1`` points on a
    ballot of length ``l`` (tied just below the last ranked candidate);
    ``PESSIMISTIC`` gives zero points.  The two coincide on ballots ranking
    ``m`` or ``m - 1`` candidates.
    """

    OPTIMISTIC = "om"
    PESSIMISTIC = "pm"


class Ballot(NamedTuple):
    """One ballot type: a strict partial ranking with a positive multiplicity."""

    ranking: tuple[int, ...]
    weight: int


def default_names(m: int) -> tuple[str, ...]:
    """Roster of placeholder names: letters for small m, C10, C11, ... beyond."""
    if m <= 26:
        return tuple(chr(ord("A") + i) for i in range(m))
    return tuple(f"C{i}" for i in range(m))


@dataclass(frozen=True)
class Profile:
    """An election: ``m`` candidates, weighted ballot types, ``k`` seats.

    Ballot types are stored deduplicated with integer weights and sorted by
    ranking; all rules here are anonymous, so this is purely a size/speed
    measure.  Use :meth:`build` to construct from raw ballots; the plain
    constructor requires already-canonical data.
    """

    m: int
    names: tuple[str, ...]
    ballots: tuple[Ballot, ...]
    k: int

    def __post_init__(self) -> None:
        if self.m < 2:
            raise ProfileError(f"need at least 2 candidates, got m={self.m}")
        if len(self.names) != self.m:
            raise ProfileError(f"expected {self.m} names, got {len(self.names)}")
        if not 1 <= self.k < self.m:
            raise ProfileError(f"seat count k={self.k} must satisfy 1 <= k < m={self.m}")
        if not self.ballots:
            raise ProfileError("profile has no ballots")
        prev: tuple[int, ...] | None = None
        for ballot in self.ballots:
            ranking, weight = ballot
            if weight < 1:
                raise ProfileError(f"ballot {ranking} has non-positive weight {weight}")
            if not 1 <= len(ranking) <= self.m:
                raise ProfileError(f"ballot length {len(ranking)} out of range 1..{self.m}")
            if len(set(ranking)) != len(ranking):
                raise ProfileError(f"duplicate candidate in ballot {ranking}")
            if any(not 0 <= c < self.m for c in ranking):
                raise ProfileError(f"candidate index out of range in ballot {ranking}")
            if prev is not None and not prev < ranking:
                raise ProfileError("ballots must be sorted by ranking and deduplicated")
            prev = ranking

    @classmethod
    def build(
        cls,
        m: int,
        names: Sequence[str],
        weighted_rankings: Iterable[tuple[Sequence[int], int]],
        k: int,
    ) -> "Profile":
        """Merge duplicate ballot types, sort, and validate."""
        merged: dict[tuple[int, ...], int] = {}
        for ranking, weight in weighted_rankings:
            key = tuple(ranking)
            merged[key] = merged.get(key, 0) + weight
        ballots = tuple(Ballot(r, w) for r, w in sorted(merged.items()))
        return cls(m=m, names=tuple(names), ballots=ballots, k=k)

    @cached_property
    def n(self) -> int:
        """Total ballot weight (number of voters)."""
        return sum(b.weight for b in self.ballots)

    def name_of(self, c: int) -> str:
        return self.names[c]

    def indices_by_name(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def with_seats(self, k: int) -> "Profile":
        """Same ballots, different seat count."""
        return Profile(m=self.m, names=self.names, ballots=self.ballots, k=k)


@dataclass(frozen=True)
class ScoreVector:
    """Per-candidate scores plus a tag naming their semantics."""

    values: tuple[int, ...]
    kind: str

    def __getitem__(self, c: int) -> int:
        return self.values[c]

    def __len__(self) -> int:
        return len(self.values)

    def argmax_set(self) -> frozenset[int]:
        top = max(self.values)
        return frozenset(c for c, v in enumerate(self.values) if v == top)

    def argmin_set(self) -> frozenset[int]:
        bottom = min(self.values)
        return frozenset(c for c, v in enumerate(self.values) if v == bottom)


@dataclass(frozen=True)
class OutcomeSet:
    """The committees a rule declares winning.

    Usually a single committee; several under ties.  ``tie_flag`` is set when
    the set holds more than one committee or when a deterministic tie-break
    had to be invoked to produce a single one.
    """

    committees: frozenset[frozenset[int]]
    tie_flag: bool = False

    def __post_init__(self) -> None:
        if not self.committees:
            raise ValueError("outcome must contain at least one committee")
        sizes = {len(c) for c in self.committees}
        if len(sizes) != 1:
            raise ValueError(f"committees of mixed sizes: {sorted(sizes)}")

    @classmethod
    def single(cls, committee: Iterable[int], tie_flag: bool = False) -> "OutcomeSet":
        return cls(committees=frozenset([frozenset(committee)]), tie_flag=tie_flag)

    @property
    def winners(self) -> frozenset[int]:
        """Union of all winning committees."""
        out: frozenset[int] = frozenset()
        for committee in self.committees:
            out |= committee
        return out

    def sole_committee(self) -> frozenset[int]:
        if len(self.committees) != 1:
            raise ValueError("outcome is a tie between several committees")
        return next(iter(self.committees))

    def same_winning_sets(self, other: "OutcomeSet") -> bool:
        """Set-of-sets equality; tie flags are ignored."""
        return self.committees == other.committees


# ---------------------------------------------------------------------------
# Ballot algebra


def remove_candidate(profile: Profile, c: int) -> Profile:
    """Delete candidate ``c`` from the election.

    Every ballot drops ``c`` with the order of the remaining entries
    preserved; ballots left empty are discarded, so total weight may shrink.
    Indices above ``c`` shift down by one.  ``k`` is unchanged, so the result
    must still satisfy ``k < m - 1 + 1``; removal that would leave ``m <= k``
    is rejected as meaningless for this seat count.
    """
    if not 0 <= c < profile.m:
        raise ProfileError(f"no candidate with index {c}")
    if profile.m - 1 <= profile.k:
        raise ProfileError(
            f"removing a candidate from m={profile.m} would leave m <= k={profile.k}"
        )
    names = tuple(name for i, name in enumerate(profile.names) if i != c)
    remaining: list[tuple[tuple[int, ...], int]] = []
    for ranking, weight in profile.ballots:
        reduced = tuple(x if x < c else x - 1 for x in ranking if x != c)
        if reduced:
            remaining.append((reduced, weight))
    if not remaining:
        raise ProfileError(f"removing {profile.names[c]!r} leaves no ballots")
    return Profile.build(profile.m - 1, names, remaining, profile.k)


def restrict_to_subset(profile: Profile, subset: Iterable[int], k_new: int) -> Profile:
    """Keep only the candidates in ``subset`` and set the seat count to ``k_new``.

    Equivalent to removing the complement one candidate at a time.  Ballots
    ranking only excluded candidates are dropped.
    """
    keep = sorted(set(subset))
    if any(not 0 <= c < profile.m for c in keep):
        raise ProfileError("subset contains candidates outside the roster")
    if len(keep) < 2:
        raise ProfileError("subset must contain at least 2 candidates")
    if not 1 <= k_new < len(keep):
        raise ProfileError(f"k_new={k_new} must satisfy 1 <= k_new < {len(keep)}")
    new_index = {c: i for i, c in enumerate(keep)}
    names = tuple(profile.names[c] for c in keep)
    remaining: list[tuple[tuple[int, ...], int]] = []
    for ranking, weight in profile.ballots:
        reduced = tuple(new_index[x] for x in ranking if x in new_index)
        if reduced:
            remaining.append((reduced, weight))
    if not remaining:
        raise ProfileError("restriction leaves no ballots")
    return Profile.build(len(keep), names, remaining, k_new)


def first_place_counts(profile: Profile) -> ScoreVector:
    """Weight of ballots whose first choice is each candidate."""
    values = [0] * profile.m
    for ranking, weight in profile.ballots:
        values[ranking[0]] += weight
    return ScoreVector(tuple(values), "first_place")


def top_k_counts(profile: Profile, k: int | None = None) -> ScoreVector:
    """Weight of ballots ranking each candidate among their top ``k`` entries.

    Partial ballots contribute only for the candidates they actually rank.
    Defaults to the profile's own seat count.
    """
    if k is None:
        k = profile.k
    if k < 1:
        raise ProfileError(f"k must be positive, got {k}")
    values = [0] * profile.m
    for ranking, weight in profile.ballots:
        for c in ranking[:k]:
            values[c] += weight
    return ScoreVector(tuple(values), "k_approval")


def borda_scores(profile: Profile, model: UnrankedModel) -> ScoreVector:
    """Positional scores: ``m - r`` points at rank ``r`` (1-based).

    A candidate missing from a ballot of length ``l`` earns ``m - l - 1``
    points under the optimistic model and zero under the pessimistic one.
    """
    m = profile.m
    values = [0] * m
    for ranking, weight in profile.ballots:
        for pos, c in enumerate(ranking):
            values[c] += weight * (m - pos - 1)
        if model is UnrankedModel.OPTIMISTIC and len(ranking) < m:
            missing_points = weight * (m - len(ranking) - 1)
            if missing_points:
                ranked = set(ranking)
                for c in range(m):
                    if c not in ranked:
                        values[c] += missing_points
    kind = "borda_om" if model is UnrankedModel.OPTIMISTIC else "borda_pm"
    return ScoreVector(tuple(values), kind)


def pairwise_matrix(profile: Profile) -> tuple[tuple[int, ...], ...]:
    """Antisymmetric margin matrix: entry ``[a][b]`` is (a over b) - (b over a).

    A ranked candidate beats an unranked one; two unranked candidates are
    mutually tied and contribute to neither side.
    """
    m = profile.m
    wins = [[0] * m for _ in range(m)]
    for ranking, weight in profile.ballots:
        for i, a in enumerate(ranking):
            for b in ranking[i + 1 :]:
                wins[a][b] += weight
        if len(ranking) < m:
            ranked = set(ranking)
            unranked = [c for c in range(m) if c not in ranked]
            for a in ranking:
                for b in unranked:
                    wins[a][b] += weight
    return tuple(
        tuple(wins[a][b] - wins[b][a] for b in range(m)) for a in range(m)
    )


def pairwise_margin(profile: Profile, a: int, b: int) -> int:
    """Net weight preferring ``a`` to ``b``; antisymmetric in its arguments."""
    if a == b:
        raise ProfileError("pairwise margin of a candidate against itself is undefined")
    for c in (a, b):
        if not 0 <= c < profile.m:
            raise ProfileError(f"no candidate with index {c}")
    margin = 0
    for ranking, weight in profile.ballots:
        try:
            pos_a: int | None = ranking.index(a)
        except ValueError:
            pos_a = None
        try:
            pos_b: int | None = ranking.index(b)
        except ValueError:
            pos_b = None
        if pos_a is None and pos_b is None:
            continue
        if pos_b is None or (pos_a is not None and pos_a < pos_b):
            margin += weight
        else:
            margin -= weight
    return margin
