"""Factor-revealing programs and empirical checks of the cost lemmas they
are built from."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from fractions import Fraction
from typing import Sequence

from .algorithms import algorithm_a, algorithm_b, algorithm_c
from .graph import SpanningTree, bridges, is_connected, minimum_spanning_tree
from .model import FgcInstance, InvalidParameters, Solution, is_feasible
from .simplex import simplex_solve
from .subroutines import APPROX_METHODS, Methods
from .thresholds import INFINITY, NoBijection, chain_exchange_bijections, compute_thresholds


class BoundViolated(AssertionError):
    pass


def _ratio(value, name) -> Fraction:
    value = Fraction(value)
    if value < 1:
        raise InvalidParameters(f"{name} must be at least 1")
    return value


# ---------------------------------------------------------------- closed forms

def analytic_bound(lam) -> float:
    lam = float(_ratio(lam, "lambda"))
    r = math.sqrt(lam)
    return lam * (lam + 2 * r) / (2 * r + lam - 1)


def _single_alpha_value(lam: float, alpha: float) -> float:
    # all weight on one alpha: beta = 1/(1 + alpha(lam - 1 + lam alpha))
    return lam * (1 + alpha / (1 + alpha * (lam - 1 + lam * alpha)))


@dataclass(frozen=True)
class EqMax:
    value: float
    alpha: float
    beta_hat: float
    numeric_value: float
    numeric_alpha: float


def eq_max_value(lam, n_alphas: int = 1, resolution: int = 1000) -> EqMax:
    """Optimum of  max lam(1 + sum a_j b_j)  s.t.  sum b_j(1 + a_j(lam-1+lam a_j)) = 1.

    Closed form plus an independent numeric path: the program is linear in
    b for fixed a, so it is solved by the simplex kernel over n_alphas grid
    points, after a grid search and golden-section refinement of the best
    single alpha.
    """
    if n_alphas < 1:
        raise InvalidParameters("need at least one alpha")
    lam_f = float(_ratio(lam, "lambda"))
    r = math.sqrt(lam_f)
    grid = [k / resolution for k in range(resolution + 1)]
    a = max(grid, key=lambda x: _single_alpha_value(lam_f, x))
    lo, hi = max(0.0, a - 1 / resolution), min(1.0, a + 1 / resolution)
    g = (math.sqrt(5) - 1) / 2
    for _ in range(60):
        x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
        if _single_alpha_value(lam_f, x1) < _single_alpha_value(lam_f, x2):
            lo = x1
        else:
            hi = x2
    a = (lo + hi) / 2
    # N candidate alphas: the refined point and N-1 spread over [0, 1]
    alphas = [a] + [(k + 1) / n_alphas for k in range(n_alphas - 1)]
    lp = simplex_solve([lam_f * x for x in alphas],
                       [[1 + x * (lam_f - 1 + lam_f * x) for x in alphas]], ["="], [1],
                       maximize=True, upper=[1] * n_alphas, exact=False)
    return EqMax(analytic_bound(lam), 1 / r, r / (2 * r + lam_f - 1), lam_f + lp.value, a)


def two_algo_bound(lam, tau) -> float:
    lam = float(_ratio(lam, "lambda"))
    tau = float(_ratio(tau, "tau"))
    s = math.sqrt(1 + 4 * tau)
    second = lam * (4 * tau ** 2 + s - 2 * tau - 1) / (
        (1 - lam) * s + 2 * tau ** 2 + (2 * lam - 2) * tau - 1 + lam)
    return min(1 + tau, second)


def two_algo_alpha(tau) -> float:
    tau = float(_ratio(tau, "tau"))
    return (-1 + math.sqrt(1 + 4 * tau)) / (2 * tau)


# ---------------------------------------------------------------- bounded weights

def _decimals(*parts: str) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for p in parts for x in p.split())


# Scaling factors alpha_0 = 0, ..., alpha_{N+1} = 1 exactly as printed.
# The printed sequence has 59 entries, 57 of them interior, although N = 60
# is announced. 0.66 and 0.88 are the visible gaps; the regular list fills
# them (59 interior values).
ALPHA_LIST = _decimals(
    "0 0.05 0.1 0.15 0.2 0.25 0.3 0.35 0.4 0.45 0.5",
    " ".join(f"0.{k}" for k in range(51, 66)),
    " ".join(f"0.{k}" for k in range(67, 88)),
    " ".join(f"0.{k}" for k in range(89, 100)),
    "1",
)
ALPHA_LIST_REGULAR = tuple(sorted(set(ALPHA_LIST) | {Fraction("0.66"), Fraction("0.88")}))


@dataclass(frozen=True)
class BoundProgram:
    """alphas holds alpha_0 = 0 < ... < alpha_{N+1} = 1; the variables are
    beta_0..beta_N, gamma_0..gamma_N and z."""

    alphas: tuple
    lam: Fraction = Fraction(2)
    tau: Fraction = Fraction(3, 2)
    # equality row sums j = first_index..N
    first_index: int = 0
    include_b: bool = True

    def __post_init__(self):
        a = tuple(Fraction(x) for x in self.alphas)
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "lam", _ratio(self.lam, "lambda"))
        object.__setattr__(self, "tau", _ratio(self.tau, "tau"))
        if len(a) < 3:
            raise InvalidParameters("need alpha_0, at least one interior value and alpha_{N+1}")
        if any(y < x for x, y in zip(a, a[1:])) or a[0] < 0 or a[-1] > 1:
            raise InvalidParameters("alphas must be sorted within [0, 1]")
        if self.first_index not in (0, 1):
            raise InvalidParameters("first_index is 0 or 1")

    @property
    def N(self) -> int:
        return len(self.alphas) - 2


class DivisionByZero(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class LpCertificate:
    value: float
    variables: dict

    def to_text(self) -> str:
        return "".join(f"{k} {float(v):.6g}\n" for k, v in self.variables.items())


def bounded_weight_lp(program: BoundProgram, exact: bool = False) -> LpCertificate:
    """Maximize z under the A row and the B_i, C_i rows for 1 <= i <= N.

    Index convention: beta_j, gamma_j for 0 <= j <= N; a beta_j carries the
    factor alpha_{j+1} and gamma_j is divided by alpha_j (only for j >= i >= 1).
    """
    a = program.alphas
    N = program.N
    lam, tau = program.lam, program.tau
    num = Fraction if exact else float
    for j in range(1, N + 1):
        if a[j] == 0:
            raise DivisionByZero(f"alpha_{j} = 0 is used as a divisor")
    width = 2 * (N + 1) + 1
    beta = lambda j: j
    gamma = lambda j: N + 1 + j
    Z = width - 1
    rows, senses, rhs = [], [], []

    def add(coef, sense, value):
        rows.append([num(c) for c in coef])
        senses.append(sense)
        rhs.append(num(value))

    row = [0] * width
    row[Z] = 1
    for j in range(N + 1):
        row[beta(j)] = -lam * a[j + 1]
    add(row, "<=", lam)
    for i in range(1, N + 1):
        families = [(lam - 1, lambda j: lam - 1 + lam * a[j + 1], False)]
        if program.include_b:
            families.append((tau - 1, lambda j: tau - 1 + a[j + 1], True))
        for slope, beta_coef, early_gamma in families:
            row = [0] * width
            row[Z] = 1
            for j in range(N + 1):
                g = slope
                if j >= i:
                    g += 1 / a[j]
                elif early_gamma:
                    g += 1
                row[gamma(j)] = -g
                if j < i:
                    row[beta(j)] = -beta_coef(j)
            add(row, "<=", 1)
    row = [0] * width
    for j in range(program.first_index, N + 1):
        row[beta(j)] = row[gamma(j)] = 1
    add(row, "=", 1)
    row = [0] * width
    row[Z] = 1
    add(row, ">=", 1)
    objective = [0] * width
    objective[Z] = 1
    upper = [1] * (width - 1) + [None]
    res = simplex_solve(objective, rows, senses, rhs, maximize=True, upper=upper, exact=exact)
    names = {}
    for j in range(N + 1):
        names[f"beta_{j}"] = res.x[beta(j)]
    for j in range(N + 1):
        names[f"gamma_{j}"] = res.x[gamma(j)]
    names["z"] = res.x[Z]
    return LpCertificate(float(res.value), names)


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class TreePartition:
    """Edges of one alpha-MST, split by safety and by whether their image
    under the bijection is a safe cut edge of the optimum."""

    alpha: Fraction
    tree: SpanningTree
    mapping: dict
    unsafe_to_cut: frozenset    # D
    safe_to_cut: frozenset      # O
    unsafe_to_rest: frozenset   # F
    safe_to_rest: frozenset     # S
    b0: Fraction
    b_alpha: Fraction
    c0: Fraction
    c_alpha: Fraction


@dataclass(frozen=True)
class AnalysisParameters:
    opt: Fraction
    tree: SpanningTree
    cut_edges: frozenset
    alphas: tuple
    thresholds: dict = field(repr=False)
    beta: tuple
    gamma: tuple
    gamma_sizes: tuple         # edge counts per bucket; zero-weight edges still count
    xi: Fraction
    delta: Fraction
    partitions: tuple
    chain: tuple = field(repr=False, default=())


def charge_index(chain, edge_id: int) -> int:
    """Last position at which the chain maps a safe edge onto `edge_id`,
    or 0 if it never does.

    Safe tree edges are charged to their images, so this is the bucket the
    edge's weight is counted in. Bucketing by the image's own threshold
    instead can undercount: a safe edge that stays in every tree may map
    onto an unsafe edge whose threshold is 0.
    """
    g = chain[0].source.graph
    last = 0
    for k, bij in enumerate(chain):
        for e, f in bij.mapping.items():
            if f == edge_id and g.edge(e).safe:
                last = k
    return last


def _tree_with_chain(instance: FgcInstance, ids: set, alphas, tree_limit: int = 200):
    """Lightest spanning tree of the optimum first; if no consistent chain
    reaches it, any other spanning tree of the optimum will do."""
    g = instance.graph
    first = minimum_spanning_tree(g, subgraph=ids)
    try:
        return first, chain_exchange_bijections(instance, alphas, first)
    except NoBijection:
        pass
    tried = 0
    for combo in combinations(sorted(ids), g.vertex_count - 1):
        if frozenset(combo) == first.edge_ids or not is_connected(g, combo):
            continue
        tried += 1
        if tried > tree_limit:
            break
        tree = SpanningTree(g, frozenset(combo))
        try:
            return tree, chain_exchange_bijections(instance, alphas, tree)
        except NoBijection:
            continue
    raise NoBijection("no spanning tree of the optimum admits a consistent chain")


def extract_parameters(instance: FgcInstance, optimal, alphas: Sequence | None = None) -> AnalysisParameters:
    g = instance.graph
    ids = set(optimal.edge_ids if isinstance(optimal, Solution) else optimal)
    if not is_feasible(instance, ids):
        raise InvalidParameters("optimal solution is infeasible")
    opt = g.weight(ids)
    if opt == 0:
        raise InvalidParameters("parameters are fractions of OPT, which is 0 here")
    ths = compute_thresholds(instance)
    alphas = tuple(sorted({Fraction(a) for a in (ths.scaling_set() if alphas is None else alphas)}))
    tree, chain = _tree_with_chain(instance, ids, alphas)
    cut = frozenset(bridges(g, ids))
    beta = [Fraction(0)] * len(alphas)
    gamma = [Fraction(0)] * len(alphas)
    sizes = [0] * len(alphas)
    for i in tree.edge_ids:
        b = charge_index(chain, i)
        if i in cut:
            beta[b] += g.edge(i).weight / opt
        else:
            gamma[b] += g.edge(i).weight / opt
            sizes[b] += 1
    parts = []
    for a, bij in zip(alphas, chain):
        groups = {(s, c): set() for s in (True, False) for c in (True, False)}
        for e, f in bij.mapping.items():
            groups[(g.edge(e).safe, f in cut)].add(e)
        image = lambda es: g.weight(bij.mapping[e] for e in es) / opt
        d, o = groups[(False, True)], groups[(True, True)]
        fr, s = groups[(False, False)], groups[(True, False)]
        parts.append(TreePartition(a, bij.source, dict(bij.mapping), frozenset(d), frozenset(o),
                                   frozenset(fr), frozenset(s), image(d), image(o), image(fr), image(s)))
    xi = (opt - g.weight(tree.edge_ids)) / opt
    params = AnalysisParameters(opt, tree, cut, alphas, dict(ths.attribution), tuple(beta),
                                tuple(gamma), tuple(sizes), xi, g.weight(cut) / opt, tuple(parts), tuple(chain))
    if sum(beta) + sum(gamma) + xi != 1:
        raise AssertionError("beta, gamma and xi do not add up to 1")
    return params


# ---------------------------------------------------------------- lemma checks

@dataclass(frozen=True)
class LemmaCheck:
    variant: str
    alpha: Fraction | None
    actual: Fraction
    bound: Fraction | float   # multiple of OPT times OPT; inf when vacuous

    @property
    def slack(self):
        return self.bound - self.actual

    @property
    def holds(self) -> bool:
        return self.actual <= self.bound


@dataclass(frozen=True)
class LemmaReport:
    params: AnalysisParameters
    checks: tuple

    @property
    def violations(self) -> list[LemmaCheck]:
        return [c for c in self.checks if not c.holds]


def _over(x: Fraction, a: Fraction, size: int):
    """x / a for a charge over `size` edges. At a = 0 the per-edge charge
    w(e) <= w(image)/a is undefined, so any edge at all makes it vacuous,
    even when the images weigh nothing."""
    if size == 0:
        return Fraction(0)
    if a == 0:
        return INFINITY
    return x / a


def lemma_bounds(params: AnalysisParameters, lam, tau) -> dict:
    """Right-hand sides (as multiples of OPT) keyed by (variant, alpha).

    Threshold-bucketed forms: A, C_i and B_i with beta_j charged at alpha_j.
    Single-factor forms: A_a, B_a and C_a from the partition at alpha.
    """
    lam, tau = Fraction(lam), Fraction(tau)
    a, beta, gamma, xi = params.alphas, params.beta, params.gamma, params.xi
    n = len(a)
    total_gamma = sum(gamma)
    out = {("A", None): lam * (1 + sum(x * b for x, b in zip(a, beta)))}
    for i in range(n):
        tail = sum((_over(gamma[j], a[j], params.gamma_sizes[j]) for j in range(i, n)), Fraction(0))
        c = (1 + sum((lam + lam * a[j] - 1) * beta[j] for j in range(i))
             + (lam - 1) * total_gamma + tail + (lam - 1) * xi)
        b = (1 + sum((tau - 1 + a[j]) * beta[j] for j in range(i))
             + (tau - 1) * total_gamma + tail + sum(gamma[:i]) + (tau - 1) * xi)
        out[("C", a[i])] = c
        out[("B", a[i])] = b
    rest = 1 - params.delta
    for p in params.partitions:
        out[("A1", p.alpha)] = lam * (1 + p.alpha * p.b0 + p.b_alpha)
        out[("C1", p.alpha)] = (p.b_alpha + _over(p.c_alpha, p.alpha, len(p.safe_to_rest))
                                + lam * ((1 + p.alpha) * p.b0 + rest))
        out[("B1", p.alpha)] = ((tau + p.alpha) * p.b0 + p.b_alpha + (tau + 1) * p.c0
                                + tau * p.c_alpha + _over(p.c_alpha, p.alpha, len(p.safe_to_rest)) + tau * xi)
    return out


def verify_lemma_bounds(instance: FgcInstance, optimal, alphas: Sequence | None = None,
                        methods: Methods = APPROX_METHODS, strict: bool = True) -> LemmaReport:
    params = extract_parameters(instance, optimal, alphas)
    ratios = methods.ratios
    bounds = lemma_bounds(params, ratios.lam, ratios.tau)
    opt = params.opt
    a_weight = algorithm_a(instance, methods).weight
    # B and C run on the trees the chain was built from, which may be other
    # alpha-MSTs than the deterministic ones
    trees = {p.alpha: p.tree for p in params.partitions}
    runs = {}
    checks = []
    for (name, alpha), factor in bounds.items():
        if name.startswith("A"):
            actual = a_weight
        else:
            key = (name[0], alpha)
            if key not in runs:
                algo = algorithm_b if name[0] == "B" else algorithm_c
                runs[key] = algo(instance, alpha, methods, tree=trees[alpha]).weight
            actual = runs[key]
        bound = INFINITY if factor == INFINITY else factor * opt
        checks.append(LemmaCheck(name, alpha, actual, bound))
    report = LemmaReport(params, tuple(checks))
    if strict and report.violations:
        v = report.violations[0]
        raise BoundViolated(f"{v.variant} at alpha={v.alpha}: {v.actual} > {v.bound}")
    return report
