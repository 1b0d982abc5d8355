"""Enumeration of candidate-subset elections.

Turning one large election into all of its size-t restrictions gives a
corpus of small elections driven by real preferences, directly comparable to
same-sized simulated ones.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterator, NamedTuple

from .core import Profile, ProfileError, restrict_to_subset


class SubElection(NamedTuple):
    """One restriction; ``profile`` is None when no ballot mentions the subset."""

    subset: tuple[int, ...]
    profile: Profile | None


def enumerate_subelections(
    profile: Profile, t: int, k_new: int
) -> Iterator[SubElection]:
    """All C(m, t) restrictions of the election to t candidates, k_new seats.

    Subsets stream in lexicographic index order.  Restrictions that lose
    every ballot are yielded with a None profile so callers can count skips.
    """
    if t > profile.m:
        raise ProfileError(f"subset size {t} exceeds m={profile.m}")
    if not 1 <= k_new < t:
        raise ProfileError(f"k_new={k_new} must satisfy 1 <= k_new < t={t}")
    for subset in combinations(range(profile.m), t):
        try:
            restricted = restrict_to_subset(profile, subset, k_new)
        except ProfileError:
            yield SubElection(subset, None)
            continue
        yield SubElection(subset, restricted)
