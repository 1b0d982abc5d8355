"""Multiwinner winner-selection rules.

Every rule maps a :class:`~mwspoilers.core.Profile` to an
:class:`~mwspoilers.core.OutcomeSet` of size-``k`` committees; :func:`stv`
additionally returns a :class:`TabulationTrace` with per-round totals.

STV follows the counting rules used for Scottish local government elections
(https://www.legislation.gov.uk/sdsi/2007/0110714245): Droop quota,
weighted-inclusive fractional surplus transfer, and all intermediate values
truncated to five decimal places.  Vote totals are therefore carried as exact
integer counts of 1e-5 vote units, never floats, which makes official round
tables reproducible digit for digit.

Ties are resolved by a :class:`TiePolicy`.  The score-based rules (SNTV,
Bloc, k-Borda) treat a tie at the committee boundary differently: outside of
``error`` mode they enumerate every tied committee rather than picking one,
since a boundary tie genuinely means several winning sets.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from math import comb
from typing import Callable, Sequence

import numpy as np

from .core import (
    OutcomeSet,
    Profile,
    ProfileError,
    ScoreVector,
    UnrankedModel,
    borda_scores,
    first_place_counts,
    pairwise_matrix,
    remove_candidate,
    top_k_counts,
)

UNIT = 100_000  # integer vote units of 1e-5


class TiePolicy(str, enum.Enum):
    """What to do when a rule must choose among exactly tied candidates.

    ``ERROR`` raises :class:`TieError` (simulation campaigns discard such
    trials); ``ALPHABETICAL`` picks by candidate name; ``LOWEST_INDEX`` picks
    by roster index.  Either deterministic mode sets the outcome's tie flag.
    """

    ERROR = "error"
    ALPHABETICAL = "alphabetical"
    LOWEST_INDEX = "lowest_index"


class TieError(RuntimeError):
    """An exact tie that the selected policy refuses to break."""


class SearchBudgetError(RuntimeError):
    """Exhaustive committee search would exceed its budget; use greedy_cc."""


def droop_quota(n: int, k: int) -> int:
    """Votes required for election: floor(n / (k + 1)) + 1."""
    return n // (k + 1) + 1


def _break_tie(profile: Profile, cands: Sequence[int], tie: TiePolicy, what: str) -> int:
    """Pick one of ``cands`` (all exactly tied) according to the policy."""
    if len(cands) == 1:
        return cands[0]
    if tie is TiePolicy.ERROR:
        names = ", ".join(profile.names[c] for c in sorted(cands))
        raise TieError(f"tie {what} between {names}")
    if tie is TiePolicy.ALPHABETICAL:
        return min(cands, key=lambda c: (profile.names[c], c))
    return min(cands)


# ---------------------------------------------------------------------------
# STV


@dataclass(frozen=True)
class StvRound:
    """One counting stage: a totals snapshot plus what was decided on it.

    ``totals`` covers the candidates still in play when the stage opened
    (continuing candidates, including any declared elected at this stage);
    values are 1e-5 vote units.  Exactly one of ``transferred`` and
    ``eliminated`` is set unless the count ended at this stage.
    """

    number: int
    totals: tuple[tuple[int, int], ...]
    elected: tuple[tuple[int, int], ...]  # (candidate, surplus units) declared here
    auto_elected: tuple[int, ...]  # filled remaining seats without reaching quota
    transferred: int | None
    eliminated: int | None
    exhausted: int  # cumulative units held by ballots with no continuing preference

    def total_of(self, c: int) -> int:
        for cand, units in self.totals:
            if cand == c:
                return units
        raise KeyError(f"candidate {c} not in play at round {self.number}")


@dataclass(frozen=True)
class TabulationTrace:
    quota: int  # units
    rounds: tuple[StvRound, ...]
    winners: tuple[int, ...]  # in order of election

    @property
    def quota_votes(self) -> int:
        return self.quota // UNIT


_CONTINUING, _ELECTED, _ELIMINATED = 0, 1, 2


def stv(profile: Profile, tie: TiePolicy = TiePolicy.ERROR) -> tuple[OutcomeSet, TabulationTrace]:
    """Single transferable vote with fractional (weighted inclusive) transfers.

    Each stage: declare elected every continuing candidate at or above quota;
    stop once ``k`` are elected, or once the continuing candidates exactly
    fill the remaining seats (they are elected without reaching quota).
    Otherwise transfer the largest untransferred surplus, or, when none is
    pending, exclude the lowest continuing candidate at full current value.
    Transfers skip previously elected and excluded candidates; ballots with
    no continuing preference left are exhausted and their value leaves the
    count.  The quota is fixed from the initial ballot total.
    """
    m, k = profile.m, profile.k
    quota = droop_quota(profile.n, k) * UNIT
    status = [_CONTINUING] * m
    # Parcels: [ranking, paper count, value per paper (units), holder position].
    holdings: list[list[list]] = [[] for _ in range(m)]
    totals = [0] * m
    for ranking, weight in profile.ballots:
        holdings[ranking[0]].append([ranking, weight, UNIT, 0])
        totals[ranking[0]] += weight * UNIT
    exhausted = 0
    pending: list[tuple[int, int]] = []  # (candidate, surplus units) awaiting transfer
    winners: list[int] = []
    rounds: list[StvRound] = []
    tie_used = False

    def next_continuing(ranking: tuple[int, ...], pos: int) -> int | None:
        for j in range(pos + 1, len(ranking)):
            if status[ranking[j]] == _CONTINUING:
                return j
        return None

    def move_parcels(source: int, surplus: int | None) -> None:
        """Transfer source's parcels; ``surplus`` None means full-value exclusion."""
        nonlocal exhausted
        parcels = holdings[source]
        holdings[source] = []
        source_total = totals[source]
        for parcel in parcels:
            ranking, count, value, pos = parcel
            if surplus is not None:
                value = value * surplus // source_total
                if value == 0:
                    continue
            j = next_continuing(ranking, pos)
            if j is None:
                exhausted += count * value
                continue
            target = ranking[j]
            holdings[target].append([ranking, count, value, j])
            totals[target] += count * value

    number = 0
    while True:
        number += 1
        in_play = [c for c in range(m) if status[c] == _CONTINUING]
        snapshot = tuple((c, totals[c]) for c in in_play)

        crossers = [c for c in in_play if totals[c] >= quota]
        crossers.sort(key=lambda c: (-totals[c], c))
        declared: list[tuple[int, int]] = []
        for c in crossers:
            status[c] = _ELECTED
            winners.append(c)
            surplus = totals[c] - quota
            declared.append((c, surplus))
            if surplus > 0:
                pending.append((c, surplus))

        continuing = [c for c in in_play if status[c] == _CONTINUING]
        auto: tuple[int, ...] = ()
        if len(winners) < k and len(continuing) == k - len(winners):
            auto = tuple(continuing)
            for c in auto:
                status[c] = _ELECTED
                winners.append(c)

        transferred: int | None = None
        eliminated: int | None = None
        if len(winners) < k:
            if pending:
                top_surplus = max(s for _, s in pending)
                tied = [c for c, s in pending if s == top_surplus]
                if len(tied) > 1:
                    tie_used = True
                source = _break_tie(profile, tied, tie, "in surplus transfer order")
                pending = [(c, s) for c, s in pending if c != source]
                transferred = source
            else:
                low = min(totals[c] for c in continuing)
                tied = [c for c in continuing if totals[c] == low]
                if len(tied) > 1:
                    tie_used = True
                eliminated = _break_tie(profile, tied, tie, "for elimination")

        rounds.append(
            StvRound(
                number=number,
                totals=snapshot,
                elected=tuple(declared),
                auto_elected=auto,
                transferred=transferred,
                eliminated=eliminated,
                exhausted=exhausted,
            )
        )

        if len(winners) == k:
            break
        if transferred is not None:
            move_parcels(transferred, totals[transferred] - quota)
            totals[transferred] = quota
        else:
            assert eliminated is not None
            status[eliminated] = _ELIMINATED
            move_parcels(eliminated, None)
            totals[eliminated] = 0

    trace = TabulationTrace(quota=quota, rounds=tuple(rounds), winners=tuple(winners))
    return OutcomeSet.single(winners, tie_flag=tie_used), trace


def srcv(profile: Profile, tie: TiePolicy = TiePolicy.ERROR) -> OutcomeSet:
    """Sequential ranked-choice voting: k single-winner runoffs.

    Each seat goes to the instant-runoff winner of the current ballots; the
    winner is then removed from all ballots before the next seat is filled.
    Should every remaining ballot rank only past winners, the leftover seats
    are a pure tie among unranked candidates and fall to the tie policy.
    """
    current = profile
    original = list(range(profile.m))
    seats: list[int] = []
    tie_used = False
    for seat in range(profile.k):
        outcome, _ = stv(current.with_seats(1), tie)
        tie_used = tie_used or outcome.tie_flag
        winner = next(iter(outcome.sole_committee()))
        seats.append(original[winner])
        if seat < profile.k - 1:
            try:
                current = remove_candidate(current.with_seats(1), winner)
            except ProfileError:
                leftovers = [original[i] for i in range(current.m) if i != winner]
                if tie is TiePolicy.ERROR:
                    names = ", ".join(profile.names[c] for c in leftovers)
                    raise TieError(
                        f"all ballots exhausted; remaining seats tie between {names}"
                    ) from None
                if tie is TiePolicy.ALPHABETICAL:
                    leftovers.sort(key=lambda c: (profile.names[c], c))
                seats.extend(leftovers[: profile.k - len(seats)])
                tie_used = True
                break
            del original[winner]
    return OutcomeSet.single(seats, tie_flag=tie_used)


def top_k_irv(profile: Profile, tie: TiePolicy = TiePolicy.ALPHABETICAL) -> OutcomeSet:
    """Eliminate plurality losers, transferring at full value, until k remain."""
    m, k = profile.m, profile.k
    status = [_CONTINUING] * m
    holdings: list[list[list]] = [[] for _ in range(m)]
    totals = [0] * m
    for ranking, weight in profile.ballots:
        holdings[ranking[0]].append([ranking, weight, 0])
        totals[ranking[0]] += weight
    remaining = m
    tie_used = False
    while remaining > k:
        continuing = [c for c in range(m) if status[c] == _CONTINUING]
        low = min(totals[c] for c in continuing)
        tied = [c for c in continuing if totals[c] == low]
        if len(tied) > 1:
            tie_used = True
        out = _break_tie(profile, tied, tie, "for elimination")
        status[out] = _ELIMINATED
        for ranking, weight, pos in holdings[out]:
            for j in range(pos + 1, len(ranking)):
                if status[ranking[j]] == _CONTINUING:
                    holdings[ranking[j]].append([ranking, weight, j])
                    totals[ranking[j]] += weight
                    break
        holdings[out] = []
        totals[out] = 0
        remaining -= 1
    winners = [c for c in range(m) if status[c] == _CONTINUING]
    return OutcomeSet.single(winners, tie_flag=tie_used)


# ---------------------------------------------------------------------------
# Score-based rules


def _top_k_outcome(profile: Profile, scores: ScoreVector, tie: TiePolicy) -> OutcomeSet:
    """Committees formed by the k best scores.

    A tie crossing the k-th place either raises (``error``), yields every
    completion of the certain winners from the tied group (``alphabetical``,
    because such an election genuinely has several winning sets), or is
    resolved to the single lowest-index completion (``lowest_index``, the
    fully resolute mode that large simulation campaigns need so that tied
    trials neither drop out nor multiply).
    """
    k = profile.k
    ordered = sorted(range(profile.m), key=lambda c: (-scores[c], c))
    threshold = scores[ordered[k - 1]]
    certain = [c for c in range(profile.m) if scores[c] > threshold]
    tied = [c for c in range(profile.m) if scores[c] == threshold]
    seats_left = k - len(certain)
    if seats_left == len(tied):
        return OutcomeSet.single(certain + tied, tie_flag=False)
    if tie is TiePolicy.ERROR:
        names = ", ".join(profile.names[c] for c in tied)
        raise TieError(f"score tie at committee boundary between {names}")
    if tie is TiePolicy.LOWEST_INDEX:
        return OutcomeSet.single(ordered[:k], tie_flag=True)
    committees = frozenset(
        frozenset(certain) | frozenset(combo)
        for combo in itertools.combinations(tied, seats_left)
    )
    return OutcomeSet(committees=committees, tie_flag=True)


def sntv(profile: Profile, tie: TiePolicy = TiePolicy.ERROR) -> OutcomeSet:
    """Single non-transferable vote: top k by first-place votes."""
    return _top_k_outcome(profile, first_place_counts(profile), tie)


def bloc(profile: Profile, tie: TiePolicy = TiePolicy.ERROR) -> OutcomeSet:
    """Bloc voting: top k by k-approval score (top-k mentions)."""
    return _top_k_outcome(profile, top_k_counts(profile, profile.k), tie)


def k_borda(
    profile: Profile, model: UnrankedModel, tie: TiePolicy = TiePolicy.ERROR
) -> OutcomeSet:
    """Top k by total Borda score under the given unranked-candidate model."""
    return _top_k_outcome(profile, borda_scores(profile, model), tie)


# ---------------------------------------------------------------------------
# Chamberlin-Courant


def _ballot_point_tables(
    profile: Profile, model: UnrankedModel
) -> list[tuple[dict[int, int], int, int]]:
    """Per ballot type: ranked-candidate points, default points, weight."""
    m = profile.m
    tables = []
    for ranking, weight in profile.ballots:
        points = {c: m - pos - 1 for pos, c in enumerate(ranking)}
        if model is UnrankedModel.OPTIMISTIC and len(ranking) < m:
            default = m - len(ranking) - 1
        else:
            default = 0
        tables.append((points, default, weight))
    return tables


def committee_satisfaction(
    profile: Profile, committee: Sequence[int], model: UnrankedModel
) -> int:
    """Total satisfaction: each voter scores their best committee member.

    A voter ranking no committee member contributes the model's default for
    their ballot length.
    """
    total = 0
    for points, default, weight in _ballot_point_tables(profile, model):
        best = default
        for c in committee:
            p = points.get(c)
            if p is not None and p > best:
                best = p
        total += weight * best
    return total


def chamberlin_courant(
    profile: Profile, model: UnrankedModel, budget: int = 1_000_000
) -> OutcomeSet:
    """Exact Chamberlin-Courant by exhaustive committee enumeration.

    Scans all C(m, k) committees in lexicographic order, streaming the
    maximum; every maximizing committee is returned, so an exact tie shows up
    as a multi-committee outcome.  Refuses profiles where C(m, k) exceeds the
    budget (the winner determination problem is NP-hard in general; fall back
    to :func:`greedy_cc`).
    """
    m, k = profile.m, profile.k
    if comb(m, k) > budget:
        raise SearchBudgetError(
            f"C({m}, {k}) = {comb(m, k)} committees exceeds budget {budget}; use greedy_cc"
        )
    # Ballot-type x candidate point matrix with the model's default filled in
    # for unranked candidates; a ranked candidate never scores below the
    # default, so each voter's satisfaction with a committee is a plain row
    # maximum over its columns.  Integer dtype keeps ties exact.
    points = np.empty((len(profile.ballots), m), dtype=np.int64)
    weights = np.empty(len(profile.ballots), dtype=np.int64)
    for i, (ranking, weight) in enumerate(profile.ballots):
        if model is UnrankedModel.OPTIMISTIC and len(ranking) < m:
            points[i, :] = m - len(ranking) - 1
        else:
            points[i, :] = 0
        for pos, c in enumerate(ranking):
            points[i, c] = m - pos - 1
        weights[i] = weight
    best_value: int | None = None
    best: list[frozenset[int]] = []
    for committee in itertools.combinations(range(m), k):
        value = int(weights @ points[:, committee].max(axis=1))
        if best_value is None or value > best_value:
            best_value = value
            best = [frozenset(committee)]
        elif value == best_value:
            best.append(frozenset(committee))
    return OutcomeSet(committees=frozenset(best), tie_flag=len(best) > 1)


def greedy_cc(
    profile: Profile, model: UnrankedModel, tie: TiePolicy = TiePolicy.ERROR
) -> OutcomeSet:
    """Greedy Chamberlin-Courant approximation.

    Seeds with the Borda winner, then repeatedly adds the candidate whose
    inclusion raises total satisfaction the most.
    """
    tables = _ballot_point_tables(profile, model)
    seed_scores = borda_scores(profile, model)
    seed_set = sorted(seed_scores.argmax_set())
    tie_used = len(seed_set) > 1
    seed = _break_tie(profile, seed_set, tie, "for greedy seed")
    committee = [seed]
    best = [max(points.get(seed, -1), default) for points, default, _ in tables]
    for _ in range(profile.k - 1):
        gains: dict[int, int] = {}
        for c in range(profile.m):
            if c in committee:
                continue
            gain = 0
            for i, (points, _default, weight) in enumerate(tables):
                p = points.get(c)
                if p is not None and p > best[i]:
                    gain += weight * (p - best[i])
            gains[c] = gain
        top_gain = max(gains.values())
        tied = sorted(c for c, g in gains.items() if g == top_gain)
        if len(tied) > 1:
            tie_used = True
        chosen = _break_tie(profile, tied, tie, "for greedy committee extension")
        committee.append(chosen)
        for i, (points, _default, _weight) in enumerate(tables):
            p = points.get(chosen)
            if p is not None and p > best[i]:
                best[i] = p
    return OutcomeSet.single(committee, tie_flag=tie_used)


# ---------------------------------------------------------------------------
# Minimax Condorcet committee


def _condorcet_committee(
    margins: tuple[tuple[int, ...], ...], m: int, size: int
) -> frozenset[int] | None:
    if size == m:
        return frozenset(range(m))
    # need[a]: candidates a fails to beat; any committee containing a must
    # contain them all.
    need = [
        frozenset(b for b in range(m) if b != a and margins[a][b] <= 0)
        for a in range(m)
    ]
    for combo in itertools.combinations(range(m), size):
        members = frozenset(combo)
        if all(need[a] <= members for a in combo):
            return members
    return None


def condorcet_committee(profile: Profile, size: int) -> frozenset[int] | None:
    """The Condorcet committee of the given size, if one exists.

    A committee qualifies when each member strictly pairwise-beats every
    non-member.  Two distinct committees of one size would need candidates
    beating each other both ways, so the committee is unique per size.
    """
    return _condorcet_committee(pairwise_matrix(profile), profile.m, size)


def mcc(profile: Profile, tie: TiePolicy = TiePolicy.ERROR) -> OutcomeSet:
    """Minimax Condorcet committee rule.

    Finds the smallest Condorcet committee of size at least k (the full
    candidate set always qualifies), then, if it is oversized, drops the
    members with the lowest minimum pairwise margin against the rest of the
    committee until k remain.
    """
    m, k = profile.m, profile.k
    margins = pairwise_matrix(profile)
    committee: frozenset[int] = frozenset(range(m))
    for size in range(k, m + 1):
        found = _condorcet_committee(margins, m, size)
        if found is not None:
            committee = found
            break
    if len(committee) == k:
        return OutcomeSet.single(committee, tie_flag=False)
    members = sorted(committee)
    score = {
        a: min(margins[a][b] for b in members if b != a) for a in members
    }
    ordered = sorted(members, key=lambda c: (-score[c], c))
    threshold = score[ordered[k - 1]]
    certain = [c for c in members if score[c] > threshold]
    tied = [c for c in members if score[c] == threshold]
    seats_left = k - len(certain)
    if seats_left != len(tied):
        if tie is TiePolicy.ERROR:
            names = ", ".join(profile.names[c] for c in tied)
            raise TieError(f"margin-score tie at committee cut between {names}")
        if tie is TiePolicy.ALPHABETICAL:
            tied.sort(key=lambda c: (profile.names[c], c))
        drop = len(tied) - seats_left
        tied = tied[drop:]
        return OutcomeSet.single(certain + tied, tie_flag=True)
    return OutcomeSet.single(certain + tied, tie_flag=False)


# ---------------------------------------------------------------------------
# Registry


@dataclass(frozen=True)
class Method:
    id: str
    label: str
    run: Callable[[Profile, TiePolicy], OutcomeSet]


def _stv_outcome(profile: Profile, tie: TiePolicy) -> OutcomeSet:
    return stv(profile, tie)[0]


METHODS: dict[str, Method] = {
    method.id: method
    for method in (
        Method("stv", "STV", _stv_outcome),
        Method("srcv", "SRCV", srcv),
        Method("sntv", "SNTV", sntv),
        Method("bloc", "Bloc", bloc),
        Method(
            "borda_om",
            "Borda (OM)",
            lambda p, tie: k_borda(p, UnrankedModel.OPTIMISTIC, tie),
        ),
        Method(
            "borda_pm",
            "Borda (PM)",
            lambda p, tie: k_borda(p, UnrankedModel.PESSIMISTIC, tie),
        ),
        Method(
            "cc_om",
            "Cham-Cour (OM)",
            lambda p, tie: chamberlin_courant(p, UnrankedModel.OPTIMISTIC),
        ),
        Method(
            "cc_pm",
            "Cham-Cour (PM)",
            lambda p, tie: chamberlin_courant(p, UnrankedModel.PESSIMISTIC),
        ),
        Method(
            "greedy_om",
            "Greedy-CC (OM)",
            lambda p, tie: greedy_cc(p, UnrankedModel.OPTIMISTIC, tie),
        ),
        Method(
            "greedy_pm",
            "Greedy-CC (PM)",
            lambda p, tie: greedy_cc(p, UnrankedModel.PESSIMISTIC, tie),
        ),
        Method("mcc", "MCC", mcc),
        Method("topk_irv", "Top-k IRV", top_k_irv),
    )
}


def run_method(method_id: str, profile: Profile, tie: TiePolicy) -> OutcomeSet:
    try:
        method = METHODS[method_id]
    except KeyError:
        raise KeyError(
            f"unknown method {method_id!r}; known: {', '.join(sorted(METHODS))}"
        ) from None
    return method.run(profile, tie)
