"""Budget-constrained cover optimization via Pareto-front dynamic programming.

A budgeted problem minimizes the objective cover cost over truncated covers
whose auxiliary costs stay strictly below given bounds.  The recursion is
the same take-or-split tree as the unconstrained optimizer; each node now
carries an antichain of cost vectors (objective first, one component per
constraint), children are combined by vector sums, and componentwise
dominance prunes exactly: budget feasibility and the objective are both
monotone in every component.  No nonnegativity is assumed, so signed
objectives and signed constraint measures are handled by the same code.

Values computed here are optima over disjoint witnesses (grade labelings of
the refinement tree); for nonnegative measures this coincides with the
optimum over arbitrary overlapping covers of the truncated class.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import engine, measures, symbolic
from .covers import Cover, TruncationConfig, ValueCertificate, cover_cost, is_valid_cover
from .errors import (
    BudgetExceededError,
    DimensionCapError,
    InfeasibleError,
    RejectedInputError,
    TooLargeError,
)

ZERO = Fraction(0)

CHAIN_CAP = 3


@dataclass(frozen=True)
class BudgetedProblem:
    """Objective measure, strict upper bounds on auxiliary cover costs, and
    the truncation under which to optimize."""

    q: symbolic.WindowSet
    objective: measures.CylinderMeasure
    constraints: tuple[tuple[measures.CylinderMeasure, Fraction], ...]
    cfg: TruncationConfig

    def __post_init__(self):
        object.__setattr__(
            self,
            "constraints",
            tuple((m, Fraction(b)) for m, b in self.constraints),
        )


@dataclass(frozen=True)
class ParetoFront:
    """Antichain of cost vectors under componentwise <=."""

    vectors: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        vecs = tuple(sorted(self.vectors))
        for u in vecs:
            for v in vecs:
                if u is not v and _dominates(u, v):
                    raise RejectedInputError("front contains a dominated vector")
        object.__setattr__(self, "vectors", vecs)


def _dominates(u, v) -> bool:
    return u != v and all(a <= b for a, b in zip(u, v))


def prune(items, cap=engine.FRONT_CAP):
    """Keep the nondominated (vector, trace) pairs, deterministic order."""
    items = sorted(items, key=lambda it: it[0])
    kept = []
    seen = set()
    for vec, trace in items:
        if vec in seen:
            continue
        if any(_dominates(kvec, vec) for kvec, _ in kept):
            continue
        kept = [(kvec, kt) for kvec, kt in kept if not _dominates(vec, kvec)]
        kept.append((vec, trace))
        seen.add(vec)
    if len(kept) > cap:
        raise BudgetExceededError("Pareto front exceeded the size cap")
    return kept


def _combine(fronts, cap):
    """Minkowski sum of child fronts with dominance pruning."""
    acc = [(None, ())]
    for front in fronts:
        nxt = []
        for vec, parts in acc:
            for cvec, ctrace in front:
                nvec = cvec if vec is None else tuple(a + b for a, b in zip(vec, cvec))
                nxt.append((nvec, parts + (ctrace,)))
        acc = prune(nxt, cap)
    return acc


def _solve_fronts(frame, comps, node_cap, front_cap):
    count = 0

    def rec(word, cells, m):
        nonlocal count
        count += 1
        if count > node_cap:
            raise BudgetExceededError("refinement tree exceeded the node cap")
        cyl = engine._cylinder(frame, m, word)
        shift = frame.cost_shift(m)
        take_vec = tuple(measures.eval_shifted(c, shift, cyl) for c in comps)
        options = [(take_vec, ("take", m, word))]
        if m > -frame.depth:
            position = frame.floor(m) - 1 - frame.wlo
            fronts = [
                rec((symbol,) + word, group, m - 1)
                for symbol, group in engine._groups(cells, position)
            ]
            for vec, parts in _combine(fronts, front_cap):
                options.append((vec, ("split", parts)))
        return prune(options, front_cap)

    return [rec(word, cells, 0) for word, cells in engine._roots(frame)]


def _collect_taken(trace, out):
    kind = trace[0]
    if kind == "take":
        out.append((trace[1], trace[2]))
    else:
        for part in trace[1]:
            _collect_taken(part, out)


def psi_budgeted(
    p: BudgetedProblem,
    base_graded: bool = False,
    node_cap: int = engine.NODE_CAP,
    front_cap: int = engine.FRONT_CAP,
) -> ValueCertificate:
    """Exact minimum objective cost subject to every strict budget.

    Raises InfeasibleError when no truncated cover meets the budgets, which
    signals the slack is too small for this truncation.
    """
    comps = [p.objective] + [m for m, _ in p.constraints]
    bounds = [b for _, b in p.constraints]
    frame = engine.build_frame(p.q, p.cfg, base_graded)
    if frame is None:
        if all(b > 0 for b in bounds):
            empty = Cover((), 0 if base_graded else p.cfg.base_shift,
                          p.cfg.base_shift if base_graded else None)
            return ValueCertificate(ZERO, empty, p.cfg, (ZERO,) * len(comps))
        raise InfeasibleError("empty set infeasible under a nonpositive budget")
    fronts = _solve_fronts(frame, comps, node_cap, front_cap)
    combined = _combine(fronts, front_cap)
    feasible = [
        (vec, parts)
        for vec, parts in combined
        if all(vec[k + 1] < bounds[k] for k in range(len(bounds)))
    ]
    if not feasible:
        raise InfeasibleError(
            f"no cover meets the budgets {bounds} at this truncation"
        )
    vec, parts = min(feasible, key=lambda it: it[0])
    taken: list = []
    for part in parts:
        _collect_taken(part, taken)
    witness = engine._witness(frame, taken, base_graded)
    assert is_valid_cover(p.q, witness)
    assert cover_cost(witness, p.objective) == vec[0]
    for k, (m, _) in enumerate(p.constraints):
        assert cover_cost(witness, m) == vec[k + 1]
    return ValueCertificate(vec[0], witness, p.cfg, vec)


def brute_force_psi(
    p: BudgetedProblem,
    base_graded: bool = False,
    leaf_cap: int = 16,
    labeling_cap: int = 400_000,
) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Independent oracle: enumerate every grade labeling of the finest
    classes jointly, filter by the strict budgets, take the best objective."""
    comps = [p.objective] + [m for m, _ in p.constraints]
    bounds = [b for _, b in p.constraints]
    frame = engine.build_frame(p.q, p.cfg, base_graded)
    if frame is None:
        if all(b > 0 for b in bounds):
            return ZERO, (ZERO,) * len(comps)
        raise InfeasibleError("empty set infeasible under a nonpositive budget")
    leaves = []
    for _, cells in engine._roots(frame):
        leaves.extend(engine._leaves(frame, cells))
    if len(leaves) > leaf_cap:
        raise TooLargeError(f"{len(leaves)} classes exceed the enumeration cap")
    depth = frame.depth
    if (depth + 1) ** len(leaves) > labeling_cap:
        raise TooLargeError("too many grade labelings to enumerate")
    floor_d = frame.floor(-depth)
    cache: dict = {}

    def cyl_vec(m, word):
        key = (m, word)
        if key not in cache:
            cyl = engine._cylinder(frame, m, word)
            shift = frame.cost_shift(m)
            cache[key] = tuple(measures.eval_shifted(c, shift, cyl) for c in comps)
        return cache[key]

    best = None
    for labeling in product(range(-depth, 1), repeat=len(leaves)):
        total = (ZERO,) * len(comps)
        for m in set(labeling):
            drop = frame.floor(m) - floor_d
            words = {leaves[k][drop:] for k, g in enumerate(labeling) if g == m}
            for word in words:
                total = tuple(a + b for a, b in zip(total, cyl_vec(m, word)))
        if all(total[k + 1] < bounds[k] for k in range(len(bounds))):
            if best is None or total < best:
                best = total
    if best is None:
        raise InfeasibleError("no labeling meets the budgets at this truncation")
    return best[0], best


# -- grids and chains ---------------------------------------------------


@dataclass(frozen=True)
class EpsGridResult:
    eps_list: tuple[Fraction, ...]
    i_list: tuple[int, ...]
    phi_surrogate: Fraction
    cells: dict  # (eps, i) -> ValueCertificate | None (infeasible)
    nondecreasing_as_eps_shrinks: bool
    nondecreasing_as_i_decreases: bool


def psi_eps_grid(
    q: symbolic.WindowSet,
    psi: measures.CylinderMeasure,
    phi: measures.CylinderMeasure,
    eps_list,
    i_list,
    cfg: TruncationConfig,
) -> EpsGridResult:
    """Budgeted values over a slack-by-shift grid, with monotonicity flags.

    All cells share one absolute grading floor (min(i_list) - depth) and one
    working window, and one budget base: the truncated unconstrained optimum
    over the deepest class plus the cell's slack.  With that convention the
    feasible classes nest along both axes, so exact monotonicity holds with
    infeasible cells read as plus infinity: values never decrease as the
    slack shrinks, and never decrease as the shift moves away from zero.
    """
    eps_list = tuple(Fraction(e) for e in eps_list)
    i_list = tuple(int(i) for i in i_list)
    if any(e <= 0 for e in eps_list) or list(eps_list) != sorted(eps_list, reverse=True):
        raise RejectedInputError("slacks must be positive and decreasing")
    if any(i > 0 for i in i_list) or list(i_list) != sorted(i_list, reverse=True):
        raise RejectedInputError("shifts must be nonpositive and nonincreasing")
    floor_abs = min(i_list) - cfg.depth
    wlo, whi = engine.shared_bounds(q, i_list, cfg.depth, cfg.width)
    deepest = TruncationConfig(
        cfg.depth, cfg.width, min(i_list), window_lo=wlo, window_hi=whi
    )
    surrogate = engine.phi_truncated(q, phi, deepest).value
    cells = {}
    for eps in eps_list:
        for i in i_list:
            cell_cfg = TruncationConfig(
                i - floor_abs, cfg.width, i, window_lo=wlo, window_hi=whi
            )
            problem = BudgetedProblem(q, psi, ((phi, surrogate + eps),), cell_cfg)
            try:
                cells[(eps, i)] = psi_budgeted(problem)
            except InfeasibleError:
                cells[(eps, i)] = None

    def val(eps, i):
        cert = cells[(eps, i)]
        return None if cert is None else cert.value

    def le(a, b):  # a <= b with None as +infinity
        if b is None:
            return True
        if a is None:
            return False
        return a <= b

    eps_ok = all(
        le(val(eps_list[k], i), val(eps_list[k + 1], i))
        for i in i_list
        for k in range(len(eps_list) - 1)
    )
    i_ok = all(
        le(val(eps, i_list[k]), val(eps, i_list[k + 1]))
        for eps in eps_list
        for k in range(len(i_list) - 1)
    )
    return EpsGridResult(eps_list, i_list, surrogate, cells, eps_ok, i_ok)


def _chain(q, phi, objectives, eps, cfg, node_cap, front_cap):
    eps = Fraction(eps)
    if eps <= 0:
        raise RejectedInputError("slack must be positive")
    if len(objectives) > CHAIN_CAP:
        raise DimensionCapError(
            f"chain of length {len(objectives)} beyond the cap {CHAIN_CAP}"
        )
    surrogate = engine.phi_truncated(q, phi, cfg).value
    constraints: list[tuple[measures.CylinderMeasure, Fraction]] = [
        (phi, surrogate + eps)
    ]
    certs = []
    for objective in objectives:
        problem = BudgetedProblem(q, objective, tuple(constraints), cfg)
        cert = psi_budgeted(problem, node_cap=node_cap, front_cap=front_cap)
        certs.append(cert)
        constraints.append((objective, cert.value + eps))
    return certs


def psi_chain(
    q: symbolic.WindowSet,
    phi: measures.CylinderMeasure,
    psi_list,
    eps,
    cfg: TruncationConfig,
    node_cap: int = engine.NODE_CAP,
    front_cap: int = engine.FRONT_CAP,
) -> list[ValueCertificate]:
    """Inductive chain: each level's optimum plus the slack becomes the next
    level's budget.  Level k is a Pareto problem with k+1 cost components."""
    return _chain(q, phi, list(psi_list), eps, cfg, node_cap, front_cap)


def psi_signed(
    q: symbolic.WindowSet,
    phi: measures.CylinderMeasure,
    psi_list,
    c_list,
    eps,
    cfg: TruncationConfig,
    node_cap: int = engine.NODE_CAP,
    front_cap: int = engine.FRONT_CAP,
) -> list[ValueCertificate]:
    """Signed chain: level k optimizes psi_k - c_k * phi, and each level's
    signed optimum feeds the next level's budget.  With all c_k = 0 this is
    exactly the unsigned chain."""
    psi_list = list(psi_list)
    c_list = [Fraction(c) for c in c_list]
    if len(c_list) != len(psi_list):
        raise RejectedInputError("one scale per chain level is required")
    if any(c < 0 for c in c_list):
        raise RejectedInputError("scales must be nonnegative")
    signed = [
        measures.SignedDiffMeasure(psi, c, phi) if c != 0 else psi
        for psi, c in zip(psi_list, c_list)
    ]
    return _chain(q, phi, signed, eps, cfg, node_cap, front_cap)
