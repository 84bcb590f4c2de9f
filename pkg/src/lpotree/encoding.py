"""CNF encoding of "a strictly better tree exists inside this window".

The formula talks about one template of B numbered internal-node slots.
Variables:

* ``lambda[i][p]``   node slot i carries function p
* ``tau[i][c][t]``   branch c of node i goes to target t (a later node slot
                     or a label; labels may be targeted repeatedly, node
                     slots at most once so used slots form a tree under
                     the root, slot 1)
* ``m[i][k]``        the subtree hanging off slot i classifies sample k
                     like the recorded label
* ``u[i]/ubar[i]``   slot i is reachable from the root / is not
* ``lambda'[i][p]``  slot i is reachable and carries p

plus auxiliary variables for the two counters: a totalizer over the root's
per-sample correctness bits (C) and a sequential weighted counter over
function weights and unused-slot bonuses (E).  The full formula conjoins the
structural constraints, counter definitions, window bounds c_lo <= C <= c_hi
and e_lo <= E <= e_hi, and the strict-dominance disjunction
(C > c_lo and E >= e_lo) or (E > e_lo and C >= c_lo).

It is satisfiable exactly when some complete tree with 1..B internal nodes
has goodness strictly dominating (c_lo, e_lo) while staying componentwise
at most (c_hi, e_hi); ``decode`` reads the witness tree back out of a model.
Single-leaf trees are deliberately not expressible: slot 1 is always used,
mirroring the search restriction that never labels the root hole.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .measures import Dataset, GoodnessTuple, goodness as measure_goodness, leq, strictly_less
from .trees import Internal, Leaf, Node, TreeSpace

Clause = tuple[int, ...]
# a literal during clause assembly: a variable id, or a constant truth value
_Lit = Union[int, bool]


class EncodingError(RuntimeError):
    """A model contradicts the structure it was built under."""


@dataclass(frozen=True)
class Window:
    c_lo: int
    e_lo: int
    c_hi: int
    e_hi: int

    def __post_init__(self) -> None:
        if self.c_lo < 0 or self.e_lo < 0:
            raise ValueError("window thresholds must be non-negative")
        if self.c_lo > self.c_hi or self.e_lo > self.e_hi:
            raise ValueError(f"empty window {self}")

    def validate(self, space: TreeSpace, data: Dataset) -> None:
        if self.c_hi > data.size:
            raise ValueError(f"c_hi {self.c_hi} exceeds sample count {data.size}")
        if self.e_hi > space.max_explainability:
            raise ValueError(
                f"e_hi {self.e_hi} exceeds maximum explainability "
                f"{space.max_explainability}"
            )

    def admits(self, g: GoodnessTuple) -> bool:
        low = GoodnessTuple(self.c_lo, self.e_lo)
        high = GoodnessTuple(self.c_hi, self.e_hi)
        return strictly_less(low, g) and leq(g, high)


class VarMap:
    """Dense 1-based variable ids, grouped by role."""

    def __init__(self) -> None:
        self.count = 0
        self.lam: dict[tuple[int, int], int] = {}
        self.tau: dict[tuple[int, int, int], int] = {}
        self.m: dict[tuple[int, int], int] = {}
        self.u: dict[int, int] = {}
        self.ubar: dict[int, int] = {}
        self.lam_used: dict[tuple[int, int], int] = {}

    def fresh(self) -> int:
        self.count += 1
        return self.count


def sidecar_map(varmap: VarMap, space: TreeSpace) -> str:
    """Debugging aid: named variables, one "name id" per line."""
    lines = []
    for (i, p), vid in varmap.lam.items():
        lines.append(f"lambda_{i}_{space.functions[p].name} {vid}")
    for (i, c, t), vid in varmap.tau.items():
        tname = f"n{t}" if t <= space.budget else space.labels[t - space.budget - 1]
        lines.append(f"tau_{i}_{c}_{tname} {vid}")
    for i, vid in varmap.u.items():
        lines.append(f"u_{i} {vid}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CnfInstance:
    num_vars: int
    clauses: tuple[Clause, ...]
    space: TreeSpace
    data: Optional[Dataset]
    window: Optional[Window]
    varmap: VarMap


def _amo_pairwise(lits: Sequence[int]) -> list[Clause]:
    return [(-a, -b) for idx, a in enumerate(lits) for b in lits[idx + 1:]]


class PhiEncoder:
    """Builds the formula incrementally with a stable variable order.

    One encoder per (space, data) pair; the structural and counter clauses
    are built once and reused across windows, which differ only in a handful
    of bound and dominance clauses.
    """

    AMO_PAIRWISE_MAX = 6

    def __init__(self, space: TreeSpace, data: Optional[Dataset] = None):
        if space.budget < 1:
            raise ValueError("encoding needs budget >= 1")
        self.space = space
        self.data = data
        self.varmap = VarMap()
        self.syntax_clauses: list[Clause] = []
        self._m_clauses: Optional[list[Clause]] = None
        self._c_outputs: Optional[list[_Lit]] = None
        self._c_clauses: list[Clause] = []
        self._exp_clauses: Optional[list[Clause]] = None
        self._e_outputs: Optional[list[_Lit]] = None
        self._e_clauses: list[Clause] = []
        self._build_syntax()

    # ------------------------------------------------------------------
    # variable layout

    def targets(self, i: int) -> list[int]:
        """Branch targets of node slot i: later slots, then labels.

        Labels are numbered B+1 .. B+|L| in target space.
        """
        b = self.space.budget
        return list(range(i + 1, b + 1)) + [b + 1 + l for l in range(len(self.space.labels))]

    def is_label_target(self, t: int) -> bool:
        return t > self.space.budget

    def label_of_target(self, t: int) -> int:
        return t - self.space.budget - 1

    # ------------------------------------------------------------------
    # constraint groups

    def _exactly_one(self, lits: Sequence[int]) -> list[Clause]:
        return [tuple(lits)] + self._at_most_one(lits)

    def _at_most_one(self, lits: Sequence[int]) -> list[Clause]:
        if len(lits) <= self.AMO_PAIRWISE_MAX:
            return _amo_pairwise(lits)
        # ladder: s_t true once any of lits[..t] is; one true lit forbids the rest
        clauses: list[Clause] = []
        prev = None
        for idx, lit in enumerate(lits):
            if idx == len(lits) - 1:
                if prev is not None:
                    clauses.append((-prev, -lit))
                break
            s = self.varmap.fresh()
            clauses.append((-lit, s))
            if prev is not None:
                clauses.append((-prev, s))
                clauses.append((-prev, -lit))
            prev = s
        return clauses

    def _build_syntax(self) -> None:
        vm = self.varmap
        space = self.space
        b = space.budget
        for i in range(1, b + 1):
            for p in range(len(space.functions)):
                vm.lam[(i, p)] = vm.fresh()
        for i in range(1, b + 1):
            for c in range(1, space.max_branches + 1):
                for t in self.targets(i):
                    vm.tau[(i, c, t)] = vm.fresh()
        out = self.syntax_clauses
        for i in range(1, b + 1):
            out.extend(self._exactly_one([vm.lam[(i, p)] for p in range(len(space.functions))]))
        for i in range(1, b + 1):
            for c in range(1, space.max_branches + 1):
                row = [vm.tau[(i, c, t)] for t in self.targets(i)]
                out.extend(self._at_most_one(row))
                for p, fn in enumerate(space.functions):
                    if c <= fn.branch_count:
                        out.append((-vm.lam[(i, p)], *row))
                    else:
                        for tv in row:
                            out.append((-vm.lam[(i, p)], -tv))
        # at most one incoming edge per node slot keeps used slots a tree
        for j in range(2, b + 1):
            incoming = [
                vm.tau[(i, c, j)]
                for i in range(1, j)
                for c in range(1, space.max_branches + 1)
            ]
            out.extend(self._at_most_one(incoming))

    def _ensure_m(self) -> None:
        if self._m_clauses is not None:
            return
        if self.data is None:
            raise ValueError("correctness clauses need a dataset")
        vm = self.varmap
        space = self.space
        data = self.data
        b = space.budget
        for i in range(1, b + 1):
            for k in range(data.size):
                vm.m[(i, k)] = vm.fresh()
        # branch actually taken by function p on sample k, precomputed
        branch = [
            [fn.branch(row) for fn in space.functions] for row in data.rows
        ]
        out: list[Clause] = []
        for i in range(1, b + 1):
            for k in range(data.size):
                mi = vm.m[(i, k)]
                for p in range(len(space.functions)):
                    lam = vm.lam[(i, p)]
                    c = branch[k][p]
                    for t in self.targets(i):
                        tau = vm.tau[(i, c, t)]
                        if self.is_label_target(t):
                            correct = self.label_of_target(t) == data.labels[k]
                            if correct:
                                out.append((-lam, -tau, mi))
                            else:
                                out.append((-lam, -tau, -mi))
                        else:
                            mj = vm.m[(t, k)]
                            out.append((-lam, -tau, -mi, mj))
                            out.append((-lam, -tau, mi, -mj))
        self._m_clauses = out

    def _totalizer(self, lits: Sequence[int]) -> list[int]:
        """Output vars o[t-1] <-> (at least t of lits are true); both directions."""
        vm = self.varmap
        out_clauses = self._c_clauses

        def build(seg: Sequence[int]) -> list[int]:
            if len(seg) == 1:
                return [seg[0]]
            mid = len(seg) // 2
            left = build(seg[:mid])
            right = build(seg[mid:])
            a, b = len(left), len(right)
            outs = [vm.fresh() for _ in range(a + b)]
            for alpha in range(a + 1):
                for beta in range(b + 1):
                    sigma = alpha + beta
                    if 1 <= sigma:
                        clause = []
                        if alpha > 0:
                            clause.append(-left[alpha - 1])
                        if beta > 0:
                            clause.append(-right[beta - 1])
                        clause.append(outs[sigma - 1])
                        out_clauses.append(tuple(clause))
                    if sigma + 1 <= a + b:
                        clause = []
                        if alpha + 1 <= a:
                            clause.append(left[alpha])
                        if beta + 1 <= b:
                            clause.append(right[beta])
                        clause.append(-outs[sigma])
                        out_clauses.append(tuple(clause))
            return outs

        return build(list(lits))

    def _ensure_corr_counter(self) -> None:
        if self._c_outputs is not None:
            return
        self._ensure_m()
        root_bits = [self.varmap.m[(1, k)] for k in range(self.data.size)]
        self._c_outputs = list(self._totalizer(root_bits))

    def _ensure_exp(self) -> None:
        if self._exp_clauses is not None:
            return
        vm = self.varmap
        space = self.space
        b = space.budget
        for i in range(1, b + 1):
            vm.u[i] = vm.fresh()
        for i in range(1, b + 1):
            vm.ubar[i] = vm.fresh()
        for i in range(1, b + 1):
            for p in range(len(space.functions)):
                vm.lam_used[(i, p)] = vm.fresh()
        out: list[Clause] = []
        out.append((vm.u[1],))
        for i in range(2, b + 1):
            arrivals = []
            for i2 in range(1, i):
                for c in range(1, space.max_branches + 1):
                    tau = vm.tau[(i2, c, i)]
                    edge = vm.fresh()  # edge taken AND source reachable
                    out.append((-edge, tau))
                    out.append((-edge, vm.u[i2]))
                    out.append((-tau, -vm.u[i2], edge))
                    arrivals.append(edge)
            out.append((-vm.u[i], *arrivals))
            for edge in arrivals:
                out.append((-edge, vm.u[i]))
        for i in range(1, b + 1):
            out.append((-vm.ubar[i], -vm.u[i]))
            out.append((vm.ubar[i], vm.u[i]))
        for i in range(1, b + 1):
            for p in range(len(space.functions)):
                lam = vm.lam[(i, p)]
                lp = vm.lam_used[(i, p)]
                out.append((-lp, lam))
                out.append((-lp, vm.u[i]))
                out.append((-lam, -vm.u[i], lp))
        self._exp_clauses = out

    def _seq_weighted(self, terms: Sequence[tuple[int, int]], maxsum: int) -> list[_Lit]:
        """Outputs S[v-1] <-> (weighted sum >= v) for v in 1..maxsum."""
        vm = self.varmap
        out = self._e_clauses
        prev: list[_Lit] = [False] * (maxsum + 1)  # prev[v] = prefix sum >= v
        prefix_cap = 0
        for lit, weight in terms:
            prefix_cap = min(maxsum, prefix_cap + weight)
            cur: list[_Lit] = [False] * (maxsum + 1)
            for v in range(1, prefix_cap + 1):
                cur[v] = vm.fresh()
            for v in range(1, prefix_cap + 1):
                f = cur[v]
                a = prev[v]
                bval: _Lit = True if v - weight <= 0 else prev[v - weight]
                # f <-> a or (lit and bval)
                if a is not False:
                    out.append((-a, f))
                if bval is True:
                    out.append((-lit, f))
                elif bval is not False:
                    out.append((-lit, -bval, f))
                back = [-f]
                if a is not False:
                    back.append(a)
                out.append(tuple(back + [lit]))
                if bval is not True:
                    if bval is False:
                        out.append(tuple(back))
                    else:
                        out.append(tuple(back + [bval]))
            prev = cur
        return prev[1:]

    def _ensure_exp_counter(self) -> None:
        if self._e_outputs is not None:
            return
        self._ensure_exp()
        vm = self.varmap
        space = self.space
        terms: list[tuple[int, int]] = []
        for i in range(1, space.budget + 1):
            for p, fn in enumerate(space.functions):
                terms.append((vm.lam_used[(i, p)], fn.weight))
        bonus = space.max_weight + 1
        for i in range(1, space.budget + 1):
            terms.append((vm.ubar[i], bonus))
        self._e_outputs = self._seq_weighted(terms, space.max_explainability)

    # ------------------------------------------------------------------
    # threshold literals and window clauses

    def _c_geq(self, t: int) -> _Lit:
        self._ensure_corr_counter()
        if t <= 0:
            return True
        if t > len(self._c_outputs):
            return False
        return self._c_outputs[t - 1]

    def _e_geq(self, v: int) -> _Lit:
        self._ensure_exp_counter()
        if v <= 0:
            return True
        if v > len(self._e_outputs):
            return False
        return self._e_outputs[v - 1]

    @staticmethod
    def _bound_clauses(lo_lit: _Lit, above_hi_lit: _Lit) -> list[Clause]:
        clauses: list[Clause] = []
        if lo_lit is False:
            clauses.append(())
        elif lo_lit is not True:
            clauses.append((lo_lit,))
        if above_hi_lit is True:
            clauses.append(())
        elif above_hi_lit is not False:
            clauses.append((-above_hi_lit,))
        return clauses

    def corr_bound_clauses(self, c_lo: int, c_hi: int) -> list[Clause]:
        """c_lo <= C <= c_hi; a lower bound beyond K yields the empty clause."""
        return self._bound_clauses(self._c_geq(c_lo), self._c_geq(c_hi + 1))

    def exp_bound_clauses(self, e_lo: int, e_hi: int) -> list[Clause]:
        return self._bound_clauses(self._e_geq(e_lo), self._e_geq(e_hi + 1))

    def dominance_clauses(self, c_lo: int, e_lo: int) -> list[Clause]:
        """(C > c_lo and E >= e_lo) or (E > e_lo and C >= c_lo), distributed."""
        a = self._c_geq(c_lo + 1)
        b = self._e_geq(e_lo)
        c = self._e_geq(e_lo + 1)
        d = self._c_geq(c_lo)
        clauses: list[Clause] = []
        for (x, y) in ((a, c), (a, d), (b, c), (b, d)):
            if x is True or y is True:
                continue
            clause = tuple(l for l in (x, y) if l is not False)
            clauses.append(clause)
        return clauses

    # ------------------------------------------------------------------
    # assembly

    def base_clauses(self) -> list[Clause]:
        """Everything that does not depend on the window, in stable order."""
        self._ensure_m()
        self._ensure_corr_counter()
        self._ensure_exp()
        self._ensure_exp_counter()
        return (
            self.syntax_clauses
            + self._m_clauses
            + self._c_clauses
            + self._exp_clauses
            + self._e_clauses
        )

    def instance(self, window: Window) -> CnfInstance:
        window.validate(self.space, self.data)
        clauses = list(self.base_clauses())
        clauses.extend(self.corr_bound_clauses(window.c_lo, window.c_hi))
        clauses.extend(self.exp_bound_clauses(window.e_lo, window.e_hi))
        clauses.extend(self.dominance_clauses(window.c_lo, window.e_lo))
        return CnfInstance(
            num_vars=self.varmap.count,
            clauses=tuple(clauses),
            space=self.space,
            data=self.data,
            window=window,
            varmap=self.varmap,
        )


def build_syntax(space: TreeSpace) -> tuple[list[Clause], VarMap]:
    enc = PhiEncoder(space)
    return list(enc.syntax_clauses), enc.varmap


def build_corr(space: TreeSpace, data: Dataset, c_lo: int, c_hi: int,
               encoder: Optional[PhiEncoder] = None) -> list[Clause]:
    enc = encoder or PhiEncoder(space, data)
    enc._ensure_corr_counter()
    return enc._m_clauses + enc._c_clauses + enc.corr_bound_clauses(c_lo, c_hi)


def build_exp(space: TreeSpace, e_lo: int, e_hi: int,
              encoder: Optional[PhiEncoder] = None) -> list[Clause]:
    enc = encoder or PhiEncoder(space)
    enc._ensure_exp_counter()
    return enc._exp_clauses + enc._e_clauses + enc.exp_bound_clauses(e_lo, e_hi)


def build_dominance(space: TreeSpace, data: Dataset, c_lo: int, e_lo: int,
                    encoder: Optional[PhiEncoder] = None) -> list[Clause]:
    enc = encoder or PhiEncoder(space, data)
    return enc.dominance_clauses(c_lo, e_lo)


def build_phi(space: TreeSpace, data: Dataset, window: Window) -> CnfInstance:
    return PhiEncoder(space, data).instance(window)


def decode(model: dict[int, bool], varmap: VarMap, space: TreeSpace,
           data: Dataset, window: Optional[Window] = None) -> tuple[Node, GoodnessTuple]:
    """Read the witness tree off a satisfying assignment and recheck it.

    Unreachable node slots are ignored.  The recomputed goodness must fall
    inside the window when one is given; a violation means the encoding and
    the measures disagree, which is an internal error, not bad input.
    """
    budget = space.budget

    def function_at(i: int) -> int:
        chosen = [p for p in range(len(space.functions)) if model.get(varmap.lam[(i, p)], False)]
        if len(chosen) != 1:
            raise EncodingError(f"node slot {i} carries {len(chosen)} functions")
        return chosen[0]

    def subtree(i: int, seen: frozenset[int]) -> Node:
        if i in seen:
            raise EncodingError(f"node slot {i} reached twice")
        p = function_at(i)
        children = []
        ts = list(range(i + 1, budget + 1)) + [
            budget + 1 + l for l in range(len(space.labels))
        ]
        for c in range(1, space.functions[p].branch_count + 1):
            hits = [t for t in ts if model.get(varmap.tau[(i, c, t)], False)]
            if len(hits) != 1:
                raise EncodingError(f"branch {c} of slot {i} has {len(hits)} targets")
            t = hits[0]
            if t > budget:
                children.append(Leaf(t - budget - 1))
            else:
                children.append(subtree(t, seen | {i}))
        return Internal(p, tuple(children))

    tree = subtree(1, frozenset())
    g = measure_goodness(space, tree, data)
    if window is not None and not window.admits(g):
        raise EncodingError(f"decoded goodness {g.as_pair()} outside window {window}")
    return tree, g


def decode_instance(model: dict[int, bool], instance: CnfInstance) -> tuple[Node, GoodnessTuple]:
    return decode(model, instance.varmap, instance.space, instance.data, instance.window)
