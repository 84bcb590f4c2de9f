"""
Decision trees as terms: parsing, evaluation, and the two measures
==================================================================

A tree space fixes the vocabulary (branching functions with weights, label
leaves) and a node budget B.  Every complete tree gets a goodness tuple
(correctness, explainability); both are "higher is better".
"""

from lpotree import (
    Dataset,
    FunctionSpec,
    TreeSpace,
    correctness,
    count_trees,
    dominates,
    enumerate_trees,
    evaluate,
    explainability,
    goodness,
    parse,
    serialize,
)

# A toy weather-alert vocabulary: one ternary field and three binary ones.
# Weights model how hard a human finds each test to read.
space = TreeSpace(
    functions=(
        FunctionSpec("clouds", 3, 1, lambda row: row[0]),
        FunctionSpec("time1", 2, 4, lambda row: row[1]),
        FunctionSpec("time2", 2, 4, lambda row: row[2]),
        FunctionSpec("pos", 2, 3, lambda row: row[3]),
    ),
    labels=("alert", "quiet"),
    budget=5,
)

# Trees are written function[child,...]; N marks a hole in a partial tree.
tree = parse(space, "clouds[alert,time1[pos[alert,quiet],alert],time2[alert,quiet]]")
print("tree:", serialize(space, tree))

# Rows carry 1-based branch indices, one entry per function.
row = (2, 1, 2, 1)  # clouds=2 -> time1 branch, time1=1 -> pos, pos=1 -> alert
print("predicted label index:", evaluate(space, tree, row))

# Explainability charges each used internal node its weight and rewards every
# unused budget slot with W + 1 = 5; a bare leaf therefore scores 5 * 5 = 25,
# and this four-node tree scores one spare slot + 1 + 4 + 4 + 3 = 17.
print("explainability(leaf)  =", explainability(space, parse(space, "alert")))
print("explainability(tree)  =", explainability(space, tree))

# Correctness counts agreements with a labeled sample of black-box decisions.
data = Dataset(
    rows=((2, 1, 2, 1), (1, 1, 1, 1), (3, 2, 2, 2), (2, 2, 1, 2)),
    labels=(0, 0, 1, 0),
)
print("correctness           =", correctness(space, tree, data))
print("goodness              =", goodness(space, tree, data).as_pair())

# Goodness tuples are only partially ordered: improving one measure while
# keeping the other is a strict improvement, trading off is incomparable.
g_tree = goodness(space, tree, data)
g_leaf = goodness(space, parse(space, "alert"), data)
print("leaf", g_leaf.as_pair(), "vs tree", g_tree.as_pair(), "->",
      dominates(g_leaf, g_tree).name)

# Small spaces can be enumerated outright; the count has a closed-form DP.
tiny = TreeSpace((FunctionSpec("f", 2, 1, lambda row: row[0]),), ("a", "b"), 2)
print("trees with budget 2   =", count_trees(tiny))
print("  ", ", ".join(serialize(tiny, t) for t in enumerate_trees(tiny)))
