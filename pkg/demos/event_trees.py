"""Multi-period markets as event trees of one-period components.

A tree market is arbitrage-free (complete) exactly when every one-period
component between a node and its children is, so multi-period analysis is a
loop over components.
"""

from fractions import Fraction

from martpoly import (
    EventTree,
    TreeMarket,
    TreeNode,
    analyze_tree,
    complete_tree,
    components,
)


def multiplicative_tree(factors, levels, s0=Fraction(1)):
    """Non-recombining information tree; each step multiplies the price."""
    tags = "abcdefghi"[: len(factors)]
    nodes, prices = [], {"r": (s0,)}
    frontier = [("r", s0)]
    for t in range(levels):
        children_of = {}
        nxt = []
        for node_id, price in frontier:
            kids = []
            for tag, f in zip(tags, factors):
                child = node_id + tag
                prices[child] = (price * Fraction(f),)
                kids.append(child)
                nxt.append((child, price * Fraction(f)))
            children_of[node_id] = tuple(kids)
        for node_id, _ in frontier:
            nodes.append(TreeNode(node_id, t, children_of[node_id]))
        frontier = nxt
    nodes.extend(TreeNode(node_id, levels, ()) for node_id, _ in frontier)
    tree = EventTree(nodes)
    return TreeMarket(tree, assets=1, prices=prices, rates=("0",) * levels)


binomial = multiplicative_tree(["2", "1/2"], levels=2)
report = analyze_tree(binomial)
print("binomial tree:", f"viable={report.viable} complete={report.complete}")
for r in report.components:
    print(
        f"   t={r.component.time} node={r.component.node_id}:",
        f"b={r.component.market.outcomes} viable={r.viable} complete={r.complete}",
    )

trinomial = multiplicative_tree(["1/2", "1", "2"], levels=2)
report = analyze_tree(trinomial)
print("\ntrinomial tree:", f"viable={report.viable} complete={report.complete}")
print("components:", len(report.components), "- every node needs one more asset:")
for entry in complete_tree(trinomial):
    rows = [tuple(str(x) for x in row) for row in entry.plan.added_payoff_rows.entries]
    print(f"   t={entry.time} node={entry.node_id}: add {rows} at price "
          f"{[str(p) for p in entry.plan.prices]}")

# the decomposition itself: every edge shows up in exactly one component
edges = sum(c.market.outcomes for c in components(trinomial))
print(f"\n{edges} edges across {len(components(trinomial))} components,",
      f"{len(trinomial.tree.nodes) - 1} edges in the tree")
