"""Executable checkers for measure-theoretic properties at finite scale.

Everything countable in the abstract statements is replaced here by an
explicit finite surrogate: finite algebras of window sets, finite grids of
approximation indices, finite families of samples.  Checkers return
machine-readable verdicts with exact witnesses; the one-sided approximation
check distinguishes INCONCLUSIVE from FAIL because its finite form is only
sufficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import engine, measures, symbolic
from .covers import TruncationConfig
from .errors import GridNotMonotoneError, RejectedInputError, TooLargeError

ZERO = Fraction(0)

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class Check:
    name: str
    verdict: str
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "verdict": self.verdict, "detail": self.detail}


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.checks.append(Check(name, PASS if ok else FAIL, detail))

    def add_verdict(self, name: str, verdict: str, detail: str = ""):
        self.checks.append(Check(name, verdict, detail))

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if c.verdict == FAIL]

    @property
    def inconclusive(self) -> list[Check]:
        return [c for c in self.checks if c.verdict == INCONCLUSIVE]

    @property
    def ok(self) -> bool:
        return not self.failed

    def as_dict(self):
        return {
            "title": self.title,
            "ok": self.ok,
            "checks": [c.as_dict() for c in self.checks],
        }


class SetFunctionHandle:
    """A labelled evaluator WindowSet -> Fraction with a value cache.

    The evaluator must send the empty set to zero; that is checked at
    construction.  Backed by direct measure evaluation or by an optimizer
    at a fixed truncation.
    """

    def __init__(self, label: str, evaluator: Callable[[symbolic.WindowSet], Fraction], n: int):
        self.label = label
        self._evaluator = evaluator
        self._cache: dict = {}
        self.n = n
        if self(symbolic.WindowSet.empty(n)) != 0:
            raise RejectedInputError(f"handle {label!r} does not vanish on the empty set")

    def __call__(self, s: symbolic.WindowSet) -> Fraction:
        key = (s.n, s.canonical_key())
        if key not in self._cache:
            self._cache[key] = self._evaluator(s)
        return self._cache[key]


def measure_handle(label: str, mu: measures.CylinderMeasure) -> SetFunctionHandle:
    return SetFunctionHandle(label, lambda s: measures.eval0(mu, s), mu.symbols)


def phi_handle(
    label: str, phi: measures.CylinderMeasure, cfg: TruncationConfig
) -> SetFunctionHandle:
    """Truncated cover optimum as a set function at one fixed truncation.

    The config must pin the working window so all queries share one class.
    """
    if cfg.window_lo is None or cfg.window_hi is None:
        raise RejectedInputError("handle configs must pin the working window")
    return SetFunctionHandle(
        label, lambda s: engine.phi_truncated(s, phi, cfg).value, phi.symbols
    )


def psi_handle(
    label: str,
    psi: measures.CylinderMeasure,
    phi: measures.CylinderMeasure,
    eps: Fraction,
    cfg: TruncationConfig,
) -> SetFunctionHandle:
    """Budgeted optimum at slack eps, budget base the per-query truncated
    unconstrained optimum, all at one fixed truncation."""
    from .budgeted import BudgetedProblem, psi_budgeted

    if cfg.window_lo is None or cfg.window_hi is None:
        raise RejectedInputError("handle configs must pin the working window")
    eps = Fraction(eps)

    def evaluator(s):
        base = engine.phi_truncated(s, phi, cfg).value
        return psi_budgeted(BudgetedProblem(s, psi, ((phi, base + eps),), cfg)).value

    return SetFunctionHandle(label, evaluator, psi.symbols)


class FiniteAlgebra:
    """Closure of finitely many window sets under union, intersection and
    difference, together with the empty and full sets.

    Built through the atom partition of the generators: every member is a
    union of atoms, so the closure is enumerated directly.
    """

    def __init__(self, n: int, generators: Sequence[symbolic.WindowSet], cap: int = 4096):
        self.n = n
        self.generators = tuple(generators)
        lo = min(
            (int(g.min_coordinate()) for g in generators if not g.is_degenerate),
            default=0,
        )
        hi = max(
            (int(g.max_coordinate()) for g in generators if not g.is_degenerate),
            default=0,
        )
        window = symbolic.Window(lo, hi)
        count = n ** window.span
        gen_bits = [g.bits_on(window) for g in generators]
        atoms: dict[tuple[bool, ...], int] = {}
        for cell in range(count):
            signature = tuple(bool((b >> cell) & 1) for b in gen_bits)
            atoms[signature] = atoms.get(signature, 0) | (1 << cell)
        atom_masks = sorted(atoms.values())
        if 1 << len(atom_masks) > cap:
            raise TooLargeError("algebra closure exceeded the cap")
        members = set()
        for pick in range(1 << len(atom_masks)):
            bits = 0
            for k, mask in enumerate(atom_masks):
                if (pick >> k) & 1:
                    bits |= mask
            members.add(symbolic.WindowSet(n, window, bits).canonicalize())
        self.members = sorted(members, key=lambda s: s.canonical_key().__repr__())

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, s: symbolic.WindowSet) -> bool:
        return s.canonicalize() in set(self.members)

    def materialized(self) -> tuple[symbolic.Window, list[int]]:
        """All members as raw bitsets on one shared window."""
        lo = min(
            (int(m.min_coordinate()) for m in self.members if not m.is_degenerate),
            default=0,
        )
        hi = max(
            (int(m.max_coordinate()) for m in self.members if not m.is_degenerate),
            default=0,
        )
        window = symbolic.Window(lo, hi)
        return window, [m.bits_on(window) for m in self.members]


@dataclass
class SplitResult:
    ok: bool
    counterexample: symbolic.WindowSet | None = None
    left: Fraction | None = None
    right: Fraction | None = None


def caratheodory_measurable(
    mu: SetFunctionHandle, a: symbolic.WindowSet, tests: FiniteAlgebra
) -> SplitResult:
    """Does ``a`` split every test set additively under ``mu``?

    Returns the first violating test set with both side values on failure.
    """
    for q in tests:
        whole = mu(q)
        split = mu(symbolic.intersection(q, a)) + mu(symbolic.difference(q, a))
        if whole != split:
            return SplitResult(False, q, whole, split)
    return SplitResult(True)


def _member_values(mu: SetFunctionHandle, algebra: FiniteAlgebra):
    """Evaluate mu once per member; closure under the Boolean operations
    lets every split be looked up as plain bitset arithmetic."""
    window, bits_list = algebra.materialized()
    values = {
        bits: mu(member) for member, bits in zip(algebra.members, bits_list)
    }
    mask = (1 << (algebra.n ** window.span)) - 1
    return bits_list, values, mask


def passing_family(mu: SetFunctionHandle, algebra: FiniteAlgebra) -> list[symbolic.WindowSet]:
    bits_list, values, mask = _member_values(mu, algebra)
    out = []
    for member, a in zip(algebra.members, bits_list):
        if all(values[q] == values[q & a] + values[q & ~a & mask] for q in bits_list):
            out.append(member)
    return out


def check_splitting_closure(mu: SetFunctionHandle, algebra: FiniteAlgebra) -> Report:
    """Finite-scale closure of the family of splitting sets: closed under
    complement and disjoint union, with ``mu`` finitely additive on it."""
    report = Report(f"splitting family closure under {mu.label}")
    bits_list, values, mask = _member_values(mu, algebra)
    passing = []
    for a in bits_list:
        if all(values[q] == values[q & a] + values[q & ~a & mask] for q in bits_list):
            passing.append(a)
    passing_set = set(passing)
    comp_ok = all((~a & mask) in passing_set for a in passing)
    report.add("closed under complement", comp_ok)
    union_ok = True
    additive_ok = True
    for a in passing:
        for b in passing:
            if a & b:
                continue
            if (a | b) not in passing_set:
                union_ok = False
            if values[a | b] != values[a] + values[b]:
                additive_ok = False
    report.add("closed under disjoint union", union_ok)
    report.add("finitely additive on the family", additive_ok)
    report.add(
        "family size",
        True,
        f"{len(passing)} of {len(algebra)} members pass",
    )
    return report


def check_outer_measure_axioms(
    mu: SetFunctionHandle, samples: Sequence[symbolic.WindowSet]
) -> Report:
    """Vanishing at the empty set, monotonicity, finite subadditivity; all
    comparisons exact over the supplied samples."""
    n = mu.n
    report = Report(f"outer measure axioms for {mu.label}")
    report.add("vanishes on the empty set", mu(symbolic.WindowSet.empty(n)) == 0)
    mono = True
    detail = ""
    for a in samples:
        for b in samples:
            if symbolic.is_subset(a, b) and mu(a) > mu(b):
                mono = False
                detail = f"{a.literal()} inside {b.literal()} but {mu(a)} > {mu(b)}"
    report.add("monotone", mono, detail)
    subadd = True
    detail = ""
    for a in samples:
        for b in samples:
            u = symbolic.union(a, b)
            if mu(u) > mu(a) + mu(b):
                subadd = False
                detail = f"{a.literal()} | {b.literal()}"
    for k in range(0, len(samples) - 2):
        family = samples[k : k + 3]
        u = symbolic.union_all(n, family)
        if mu(u) > sum(mu(s) for s in family):
            subadd = False
            detail = "triple family at offset %d" % k
    report.add("finitely subadditive", subadd, detail)
    return report


@dataclass(frozen=True)
class PiecewiseLinear:
    """Nondecreasing piecewise-linear function on [0, inf) with f(0) = 0,
    given by rational breakpoints and a final slope."""

    points: tuple[tuple[Fraction, Fraction], ...]
    final_slope: Fraction = Fraction(1)

    def __post_init__(self):
        pts = tuple(
            (Fraction(x), Fraction(y)) for x, y in sorted(self.points)
        )
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "final_slope", Fraction(self.final_slope))
        if not pts or pts[0] != (0, 0):
            raise RejectedInputError("first breakpoint must be (0, 0)")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x1 == x0 or y1 < y0:
                raise RejectedInputError("breakpoints must increase")
        if self.final_slope < 0:
            raise RejectedInputError("final slope must be nonnegative")

    def __call__(self, x: Fraction) -> Fraction:
        x = Fraction(x)
        if x < 0:
            raise RejectedInputError("argument must be nonnegative")
        pts = self.points
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        x0, y0 = pts[-1]
        return y0 + self.final_slope * (x - x0)


IDENTITY = PiecewiseLinear(((0, 0),), 1)


@dataclass
class ApproxFamilySpec:
    """A finite decreasing grid of approximation indices with one handle per
    index, the defect functional nu, and the discount f."""

    family: tuple[tuple[Fraction, SetFunctionHandle], ...]
    nu: SetFunctionHandle
    f: PiecewiseLinear = IDENTITY

    def __post_init__(self):
        fam = tuple(sorted(((Fraction(t), h) for t, h in self.family), key=lambda p: p[0]))
        if not fam or fam[0][0] <= 0:
            raise RejectedInputError("grid indices must be positive")
        self.family = fam

    @property
    def t_min(self) -> Fraction:
        return self.family[0][0]

    def limit_surrogate(self) -> SetFunctionHandle:
        """The largest-value grid member, standing in for the limit."""
        return self.family[0][1]

    def at_or_below(self, t: Fraction) -> tuple[Fraction, SetFunctionHandle]:
        """Largest grid index <= t; over-estimates the family at t."""
        best = None
        for ti, h in self.family:
            if ti <= t:
                best = (ti, h)
        if best is None:
            raise RejectedInputError(f"no grid index at or below {t}")
        return best

    def exact(self, t: Fraction):
        for ti, h in self.family:
            if ti == t:
                return h
        return None


def check_approximation(
    spec: ApproxFamilySpec,
    pairs: Sequence[tuple[symbolic.WindowSet, symbolic.WindowSet]],
    disjoint_families: Sequence[Sequence[symbolic.WindowSet]],
    samples: Sequence[symbolic.WindowSet] = (),
) -> Report:
    """The three approximation axioms over finite surrogates.

    (i) is exact on the limit surrogate.  (ii) is verified in the
    sufficient finite form: the family at the largest grid index below
    f(nu(B minus A)) + t_min, applied to A, must not exceed the limit
    surrogate at B; cells where this sufficient check fails are reported
    INCONCLUSIVE, never FAIL.  (iii) uses the two-slack bookkeeping on the
    supplied disjoint families at matched grid indices, and is INCONCLUSIVE
    when the required indices are off the grid.
    """
    report = Report("outer measure approximation axioms")
    n = spec.nu.n
    # grid monotonicity is a precondition of the definition
    check_sets = list(samples) or [symbolic.WindowSet.full_space(n)]
    for s in check_sets:
        values = [h(s) for _, h in spec.family]
        if any(a < b for a, b in zip(values, values[1:])):
            raise GridNotMonotoneError(
                f"family is not setwise decreasing in the index on {s.literal()}"
            )
    limit = spec.limit_surrogate()
    report.add("(i) vanishes on the empty set", limit(symbolic.WindowSet.empty(n)) == 0)
    verdict = PASS
    detail = ""
    for a, b in pairs:
        if not symbolic.is_subset(a, b):
            raise RejectedInputError("pairs must be nested")
        t = spec.f(spec.nu(symbolic.difference(b, a))) + spec.t_min
        t_grid, handle = spec.at_or_below(t)
        if handle(a) > limit(b):
            verdict = INCONCLUSIVE
            detail = (
                f"sufficient check failed at A={a.literal()} B={b.literal()} "
                f"(grid index {t_grid})"
            )
    report.add_verdict("(ii) discounted domination", verdict, detail)
    verdict = PASS
    detail = ""
    for family in disjoint_families:
        family = list(family)
        for x in family:
            for y in family:
                if x is not y and symbolic.meets(x, y):
                    raise RejectedInputError("family members must be disjoint")
        u = symbolic.union_all(n, family)
        for t_union, handle_union in spec.family:
            parts = []
            feasible = True
            for k, part in enumerate(family, start=1):
                t_part = t_union / Fraction(2 ** k) / 2  # eps 2^-k with eps = t/2
                h = spec.exact(t_part)
                if h is None:
                    feasible = False
                    break
                parts.append(h(part))
            if not feasible:
                continue
            if handle_union(u) > sum(parts):
                verdict = FAIL
                detail = f"family union {u.literal()} at index {t_union}"
        if verdict == PASS and not any(
            all(spec.exact(t / Fraction(2 ** k) / 2) is not None
                for k in range(1, len(family) + 1))
            for t, _ in spec.family
        ):
            verdict = INCONCLUSIVE
            detail = "no matched grid indices for the family"
    report.add_verdict("(iii) subadditive on disjoint families", verdict, detail)
    return report


@dataclass
class DefectResult:
    defect: Fraction
    total_mass: Fraction
    truncated_total: Fraction
    bound_holds: bool
    witness: tuple[int, symbolic.WindowSet] | None


def norm_defect(
    phi: measures.CylinderMeasure,
    window_cap: int,
    m_cap: int,
    cfg: TruncationConfig,
) -> DefectResult:
    """Largest shift mismatch |phi(S^m A) - phi(A)| over window sets within
    the cap and |m| <= m_cap; a lower bound for the full supremum.  Also
    checks the truncated total mass against total mass minus the defect."""
    if not phi.nonnegative:
        raise RejectedInputError("defect scan needs a nonnegative measure")
    n = phi.symbols
    defect = ZERO
    witness = None
    window = symbolic.Window(0, window_cap)
    for a in symbolic.all_window_sets(n, window):
        if a.is_degenerate:
            continue
        base = measures.eval0(phi, a)
        for m in range(0, -m_cap - 1, -1):
            shifted = measures.eval0(phi, symbolic.shift(a, m))
            gap = abs(shifted - base)
            if gap > defect:
                defect = gap
                witness = (m, a)
    total = measures.eval0(phi, symbolic.WindowSet.full_space(n))
    truncated = engine.phi_truncated(symbolic.WindowSet.full_space(n), phi, cfg).value
    return DefectResult(defect, total, truncated, truncated <= total - defect, witness)


def check_consistency(
    phi: measures.CylinderMeasure,
    depth: int,
    samples: Sequence[symbolic.WindowSet],
    grid: Sequence[TruncationConfig] = (),
    prepend: measures.CylinderMeasure | None = None,
    eps: Fraction = Fraction(1, 2),
) -> Report:
    """Consistency of the shifted family and its consequences.

    The family phi_m = phi . S^m is consistent iff adjacent grades agree on
    every set of the finer grade; on samples this is an exact scan.  When
    consistent, the truncated optimum of any sampled set must equal its
    direct value at every supplied truncation, and prefixing a consistent
    chain in front (budgeting by its own truncated value plus slack) must
    leave the truncated optimum unchanged on cylinder samples.
    """
    from .budgeted import BudgetedProblem, psi_budgeted

    report = Report("consistency of the shifted family")
    consistent = True
    detail = ""
    for a in samples:
        if a.is_degenerate:
            continue
        top = min(0, int(a.min_coordinate()))
        for m in range(top, -depth, -1):
            left = measures.eval_shifted(phi, m, a)
            right = measures.eval_shifted(phi, m - 1, a)
            if left != right:
                consistent = False
                detail = f"grades {m} and {m - 1} disagree on {a.literal()}"
                break
        if not consistent:
            break
    report.add_verdict(
        "adjacent grades agree", PASS if consistent else FAIL, detail
    )
    if not consistent:
        return report
    ok = True
    detail = ""
    for cfg in grid:
        for a in samples:
            if a.is_degenerate or a.min_coordinate() < 0:
                continue
            direct = measures.eval0(phi, a)
            value = engine.phi_truncated(a, phi, cfg).value
            if value != direct:
                ok = False
                detail = f"{a.literal()} at {cfg}: {value} != {direct}"
    report.add("truncated optimum equals the direct value", ok, detail)
    if prepend is not None:
        ok = True
        detail = ""
        for cfg in grid or (TruncationConfig(depth),):
            for a in samples:
                if a.is_degenerate or a.min_coordinate() < 0:
                    continue
                plain = engine.phi_truncated(a, phi, cfg).value
                budget = engine.phi_truncated(a, prepend, cfg).value + eps
                chained = psi_budgeted(
                    BudgetedProblem(a, phi, ((prepend, budget),), cfg)
                ).value
                if chained != plain:
                    ok = False
                    detail = f"{a.literal()} at {cfg}: {chained} != {plain}"
        report.add("prefixed consistent chain leaves the optimum unchanged", ok, detail)
    return report
