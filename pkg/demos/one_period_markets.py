"""Walk through four one-period markets with very different verdicts.

Each market is given by its martingale linear system: a probability vector q
is a martingale measure when it solves the system, and the market is
arbitrage-free exactly when some solution is strictly positive everywhere.
"""

from martpoly import (
    characterize,
    enumerate_generators,
    is_arbitrage_free,
    is_complete,
    market_from_system,
    system_from_rows,
    verify_measure,
)


def show(title, matrix, rhs):
    print(f"--- {title}")
    sys = system_from_rows(matrix, rhs)
    mkt = market_from_system(matrix, rhs)
    gens = enumerate_generators(sys)
    print(f"generators ({len(gens)}):")
    for g in gens:
        print("   ", tuple(str(x) for x in g))
    viable, witness = is_arbitrage_free(mkt)
    print("viable:", viable, "  complete:", is_complete(mkt))
    if witness is not None:
        check = verify_measure(mkt, witness)
        print(
            "witness:", tuple(str(x) for x in witness),
            f"(martingale={check.is_martingale}, equivalent={check.is_equivalent})",
        )
    char = characterize(mkt)
    for i, support in enumerate(char.outcome_support):
        who = [f"g{j + 1}" for j in support] or ["nobody"]
        print(f"outcome {i + 1} is fed by: {', '.join(who)}")
    print()


# No measure at all: the affine space misses the simplex entirely.
show("no solutions in the simplex",
     [[18, -6, -6, 75], [99, -33, -33, 291]], [15, 123])

# A single vertex measure: martingale, but outcomes 2..4 get zero mass,
# so no equivalent measure exists and the market admits arbitrage.
show("one vertex, not equivalent",
     [[-3, 1, -15, 1], [-3, 1, -7, 1]], [-3, -3])

# An edge of measures between two vertices: outcomes 3 and 4 starve in
# every combination, so again no equivalent measure.
show("an edge of measures, two dead outcomes",
     [[-1, -1, -3, 3], [1, 1, -3, 3]], [-1, 1])

# Three generators whose open mixtures hit every outcome: arbitrage-free,
# but with many measures the market cannot be complete.
show("viable but incomplete", [[2, 0, 0, 0]], [1])
