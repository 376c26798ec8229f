"""Market verdicts on top of the generator set.

Arbitrage-freeness is existence of an equivalent martingale measure, which
holds exactly when every outcome carries positive mass under some generator.
Completeness adds affine independence of the payoff columns, equivalently row
rank b of the ones-augmented payoff matrix, equivalently a unique measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import InputError, NotViableError
from .geometry import DEFAULT_MAX_OUTCOMES, GeneratorSet, enumerate_generators
from .market import OnePeriodMarket, augmented_matrix, build_system
from .rationals import (
    Matrix,
    RationalLike,
    Vector,
    dot,
    mean_vector,
    rank,
    unit_vector,
    vector,
)


@dataclass(frozen=True)
class EmmCharacterization:
    """Generators plus, per outcome, which generators give it positive mass.

    A convex combination sum(a_j * p^j) is an equivalent martingale measure
    exactly when for every outcome i some generator j in outcome_support[i]
    has a_j > 0. An equivalent measure exists at all exactly when no
    outcome_support entry is empty.
    """

    generators: GeneratorSet
    outcome_support: tuple[tuple[int, ...], ...]
    emm_exists: bool


@dataclass(frozen=True)
class MeasureCheck:
    is_martingale: bool
    is_equivalent: bool


@dataclass(frozen=True)
class PriceBounds:
    """Extremes of the discounted payoff value over the generators.

    An endpoint is attained by an equivalent measure exactly when the
    generators achieving it jointly put mass on every outcome; otherwise the
    price interval is open at that end.
    """

    low: Fraction
    high: Fraction
    low_attained_by_emm: bool
    high_attained_by_emm: bool


@dataclass(frozen=True)
class CompletionPlan:
    """Assets that raise the augmented rank to b, with their price freedom.

    ``price_map[k][j]`` is the discounted value of added row k under
    generator j; admissible initial prices are its combinations under weights
    obeying the support conditions in ``characterization``. ``prices`` are
    the concrete values under ``weights``.
    """

    added_payoff_rows: Matrix
    price_map: tuple[Vector, ...]
    characterization: EmmCharacterization
    weights: Vector
    prices: Vector

    @property
    def is_empty(self) -> bool:
        return self.added_payoff_rows.rows == 0


@lru_cache(maxsize=512)
def _characterize_cached(mkt: OnePeriodMarket, max_outcomes: int) -> EmmCharacterization:
    gens = enumerate_generators(build_system(mkt), max_outcomes=max_outcomes)
    support = tuple(
        tuple(j for j, g in enumerate(gens.generators) if g[i] > 0)
        for i in range(mkt.outcomes)
    )
    return EmmCharacterization(
        generators=gens,
        outcome_support=support,
        emm_exists=all(support),
    )


def characterize(
    mkt: OnePeriodMarket, *, max_outcomes: int = DEFAULT_MAX_OUTCOMES
) -> EmmCharacterization:
    """Enumerate generators and read off the equivalent-measure conditions."""
    return _characterize_cached(mkt, max_outcomes)


def is_arbitrage_free(
    mkt: OnePeriodMarket, *, max_outcomes: int = DEFAULT_MAX_OUTCOMES
) -> tuple[bool, Vector | None]:
    """Verdict plus witness measure.

    The witness is the uniform average of the generators: it is always a
    martingale measure, and it is equivalent precisely when an equivalent
    measure exists at all, since averaging covers every generator's support.
    """
    char = characterize(mkt, max_outcomes=max_outcomes)
    witness = mean_vector(char.generators.generators) if len(char.generators) else None
    return char.emm_exists, witness


def is_complete(
    mkt: OnePeriodMarket, *, max_outcomes: int = DEFAULT_MAX_OUTCOMES
) -> bool:
    """Arbitrage-free and the ones-augmented payoff matrix has row rank b."""
    char = characterize(mkt, max_outcomes=max_outcomes)
    if not char.emm_exists:
        return False
    return rank(augmented_matrix(build_system(mkt))) == mkt.outcomes


def verify_measure(mkt: OnePeriodMarket, q: Iterable[RationalLike]) -> MeasureCheck:
    """Check a candidate measure against the market, exactly."""
    qv = vector(q)
    if len(qv) != mkt.outcomes:
        raise InputError(f"measure has {len(qv)} entries for {mkt.outcomes} outcomes")
    sys = build_system(mkt)
    is_mart = (
        all(x >= 0 for x in qv)
        and sum(qv) == 1
        and sys.matrix.mul_vec(qv) == sys.rhs
    )
    return MeasureCheck(
        is_martingale=is_mart,
        is_equivalent=is_mart and all(x > 0 for x in qv),
    )


def price_bounds(
    mkt: OnePeriodMarket,
    payoff: Iterable[RationalLike],
    *,
    max_outcomes: int = DEFAULT_MAX_OUTCOMES,
) -> PriceBounds:
    """Range of arbitrage-free prices of a payoff on a viable market."""
    c = vector(payoff)
    if len(c) != mkt.outcomes:
        raise InputError(f"payoff has {len(c)} entries for {mkt.outcomes} outcomes")
    char = characterize(mkt, max_outcomes=max_outcomes)
    if not char.emm_exists:
        raise NotViableError("price bounds are undefined without an equivalent measure")
    discount = 1 + mkt.rate
    values = [dot(c, g) / discount for g in char.generators]
    low, high = min(values), max(values)
    supports = char.generators.supports
    full = set(range(mkt.outcomes))

    def attained(target: Fraction) -> bool:
        covered: set[int] = set()
        for j, v in enumerate(values):
            if v == target:
                covered.update(supports[j])
        return covered == full

    return PriceBounds(
        low=low,
        high=high,
        low_attained_by_emm=attained(low),
        high_attained_by_emm=attained(high),
    )


def mixture(gens: GeneratorSet, weights: Sequence[Fraction]) -> Vector:
    """Convex combination of the generators under the given weights."""
    if len(weights) != len(gens):
        raise InputError("one weight per generator required")
    out = [Fraction(0)] * gens.outcomes
    for w, g in zip(weights, gens.generators):
        for i, x in enumerate(g):
            out[i] += w * x
    return tuple(out)


def validate_weights(
    char: EmmCharacterization, weights: Iterable[RationalLike]
) -> Vector:
    """Weights must be a convex combination meeting every support condition.

    Equivalently, the resulting mixture must be strictly positive in every
    outcome, i.e. an equivalent martingale measure.
    """
    w = vector(weights)
    if len(w) != len(char.generators):
        raise InputError(
            f"{len(w)} weights for {len(char.generators)} generators"
        )
    if any(x < 0 for x in w):
        raise InputError("weights must be nonnegative")
    if sum(w) != 1:
        raise InputError("weights must sum to 1")
    blended = mixture(char.generators, w)
    if any(x <= 0 for x in blended):
        dead = [i for i, x in enumerate(blended) if x <= 0]
        raise InputError(
            f"weights leave zero mass on outcome(s) {dead}; support conditions violated"
        )
    return w


def complete_market(
    mkt: OnePeriodMarket,
    weights: Iterable[RationalLike] | None = None,
    *,
    max_outcomes: int = DEFAULT_MAX_OUTCOMES,
) -> CompletionPlan:
    """Add standard-basis payoff rows until the augmented rank reaches b.

    Rows are chosen greedily, smallest outcome index first, among those that
    increase the rank of the ones-plus-payoffs matrix; an already complete
    market yields an empty plan. Prices of the added assets are the
    discounted mixture values under ``weights`` (uniform by default, which is
    always admissible on a viable market).
    """
    char = characterize(mkt, max_outcomes=max_outcomes)
    if not char.emm_exists:
        raise NotViableError("only arbitrage-free markets can be completed")
    b = mkt.outcomes
    k = len(char.generators)
    if weights is None:
        w = (Fraction(1, k),) * k
    else:
        w = validate_weights(char, weights)

    working = augmented_matrix(build_system(mkt))
    current = rank(working)
    added: list[Vector] = []
    for i in range(b):
        if current == b:
            break
        candidate = unit_vector(i, b)
        extended = working.with_rows([candidate])
        new_rank = rank(extended)
        if new_rank > current:
            working = extended
            current = new_rank
            added.append(candidate)

    discount = 1 + mkt.rate
    price_map = tuple(
        tuple(dot(row, g) / discount for g in char.generators) for row in added
    )
    blended = mixture(char.generators, w)
    prices = tuple(dot(row, blended) / discount for row in added)
    return CompletionPlan(
        added_payoff_rows=Matrix(tuple(added), b),
        price_map=price_map,
        characterization=char,
        weights=w,
        prices=prices,
    )


def apply_completion(mkt: OnePeriodMarket, plan: CompletionPlan) -> OnePeriodMarket:
    """Extended market with the plan's assets traded at the plan's prices."""
    if plan.is_empty:
        return mkt
    return OnePeriodMarket(
        rate=mkt.rate,
        spot=mkt.spot + plan.prices,
        payoffs=mkt.payoffs.with_rows(plan.added_payoff_rows.entries),
        probabilities=mkt.probabilities,
    )
