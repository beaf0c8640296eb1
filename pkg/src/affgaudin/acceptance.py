"""The ten acceptance checks, each returning a CriterionResult.

Every check states its exact target; nothing here relaxes a target to make a
run pass.  Runtime budgets are part of the verdict.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

from gmpy2 import mpq

from .algebra import Z, State, clear_caches, current, diagonal_action, enumerate_monomials
from .golden import golden_linear_form, golden_state, golden_tags
from .scalars import QExt, S
from .spaces import combine, invariant_subspace, rank, solve_columns, state_to_vector
from .tensors import COLORS, jacobi_holds, verify_syzygies
from .vertex import clear_vertex_caches, mode_action, skew_symmetry_check, translate, twisted_derivative

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all", "property_suite", "SLOW"]

SLOW = frozenset({6})


@dataclass
class CriterionResult:
    number: int
    title: str
    ok: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0
    budget: float | None = None

    @property
    def within_budget(self) -> bool:
        return self.budget is None or self.seconds <= self.budget

    @property
    def passed(self) -> bool:
        return self.ok and self.within_budget

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        extra = "" if self.within_budget else f" (over budget {self.budget:.0f}s)"
        return f"criterion {self.number:2d} {verdict}  {self.title}  [{self.seconds:.1f}s]{extra}"

    def record(self) -> dict:
        return {"criterion": self.number, "title": self.title, "pass": self.passed,
                "ok": self.ok, "seconds": round(self.seconds, 3), "budget": self.budget,
                "detail": self.detail}


def _q(x) -> str:
    return str(x)


# ---------------------------------------------------------------- 1, 2, 3

def criterion_1() -> tuple[bool, dict]:
    expected = [1, 0, 1, 2, 14]
    dims = [invariant_subspace(n).dimension for n in range(5)]
    return dims == expected, {"dims": dims, "expected": expected}


def criterion_2() -> tuple[bool, dict]:
    rep = verify_syzygies()
    jac = jacobi_holds()
    return rep.ok and jac, {"syzygies": rep.ok, "jacobi": jac}


def criterion_3() -> tuple[bool, dict]:
    from .solvers import singular_subspace

    space, _ = singular_subspace(2)
    s1 = golden_state("sigma1")
    witness_ok = all(
        diagonal_action(r, 1, s1) == twisted_derivative(1, Z, golden_state("quadratic_witness", r=r))
        for r in COLORS)
    ok = space.dimension == 1 and space.contains(s1) and witness_ok
    return ok, {"dimension": space.dimension, "contains_sigma1": space.contains(s1), "witness": witness_ok}


# ---------------------------------------------------------------- 4

def _linear(form: dict[int, mpq], x: dict[int, QExt]) -> QExt:
    return sum((QExt(c) * x[i] for i, c in form.items()), QExt(0))


def criterion_4() -> tuple[bool, dict]:
    from .solvers import singular_subspace

    space, witnesses = singular_subspace(4)
    basis = [golden_state(t) for t in golden_tags("quartic_basis.v")]
    cols = [state_to_vector(b) for b in basis]
    relations_ok = True
    rho_ok = True
    for v in space.vectors:
        sol = solve_columns(cols, state_to_vector(v), nullspace=False)
        if not sol.consistent:
            relations_ok = False
            continue
        x = {i + 1: sol.particular.get(i, QExt(0)) for i in range(len(basis))}
        for t in golden_tags("quartic_relations.x"):
            k = int(t.rsplit("x", 1)[1])
            if _linear(golden_linear_form(t), x) != x[k]:
                relations_ok = False
        rho = [_linear(golden_linear_form(t), x) for t in golden_tags("quartic_rho.")]
        for r in COLORS:
            G = combine(rho, [golden_state(t, r=r) for t in golden_tags("quartic_witness.rho")])
            if diagonal_action(r, 1, v) != twisted_derivative(3, Z, G):
                rho_ok = False
    named = [golden_state("sigma3"), golden_state("double_translate")]
    named += [golden_state(t) for t in golden_tags("twisted_derivative_states.")]
    named_rank = rank(named)
    members = all(space.contains(v) for v in named)
    s4 = space.contains(golden_state("s4_comparison"))
    ok = space.dimension == 7 and relations_ok and rho_ok and named_rank == 7 and members and s4
    return ok, {"dimension": space.dimension, "relations": relations_ok, "rho": rho_ok,
                "named_rank": named_rank, "named_in_space": members, "s4": s4}


# ---------------------------------------------------------------- 5, 6, 7

def _perturb(v: State, delta=1) -> State:
    (key, c), *_ = v.sorted_items()
    m, u, h = key
    return v + State.from_monomial(m, QExt(delta), u, h, v.regime)


def criterion_5() -> tuple[bool, dict]:
    from .solvers import decompose_zero_product, skew_partner, verify_given_decomposition

    A11, B11 = golden_state("A11"), golden_state("B11")
    r11 = verify_given_decomposition(1, 1, A11, B11)
    A13, B13 = golden_state("A13"), golden_state("B13")
    r13 = verify_given_decomposition(1, 3, A13, B13)
    d13 = decompose_zero_product(1, 3)
    d31 = decompose_zero_product(3, 1)
    skew = skew_partner(d13)
    canary_appendix = bool(verify_given_decomposition(1, 1, _perturb(A11), B11))
    canary_solver = bool(verify_given_decomposition(1, 3, _perturb(d13.A), d13.B))
    ok = (not r11 and not r13 and d13.ok and d31.ok and skew.ok
          and canary_appendix and canary_solver)
    return ok, {"quadratic_pair_residual_terms": len(r11), "appendix13_residual_terms": len(r13),
                "solver13": d13.report(), "solver31": d31.report(), "skew31": skew.ok,
                "canary_appendix_nonzero": canary_appendix, "canary_solver_nonzero": canary_solver}


def criterion_6() -> tuple[bool, dict]:
    from .solvers import decompose_zero_product

    dec = decompose_zero_product(3, 3)
    return dec.ok, dec.report()


def criterion_7() -> tuple[bool, dict]:
    from .solvers import regular_modulo_translates

    out = {}
    ok = True
    for tag in ("A11", "A13"):
        _, rep = regular_modulo_translates(golden_state(tag))
        out[tag] = rep.feasible
        ok = ok and rep.feasible
    return ok, out


# ---------------------------------------------------------------- 8, 9

def criterion_8(slow: bool = False) -> tuple[bool, dict]:
    from . import hbar

    detail: dict = {}
    ok = True
    uniq = {}
    for n in (1, 2, 3):
        u = hbar.uniqueness_dimension(n)
        uniq[n] = (u["solution_dimension"], u["top_dimension"])
        ok = ok and u["solution_dimension"] == 1 and u["top_dimension"] == 1
    detail["uniqueness"] = uniq
    wit = {}
    for n, target in ((1, mpq(-4)), (2, mpq(-8, 3)), (3, mpq(-12, 5))):
        rep = hbar.check_singular_mod_hbar3(n)
        good = hbar.witness_coefficient(n) == target and rep.ok
        wit[n] = {"coefficient": _q(hbar.witness_coefficient(n)), "singular": rep.ok}
        ok = ok and good
    detail["witness"] = wit
    exps = (1, 3, 5, 7) if slow else (1, 3, 5)
    pairs = {}
    for m in exps:
        for n in exps:
            if slow and 7 not in (m, n):
                continue
            clear_caches()
            clear_vertex_caches()
            # regularity of exponent-7 forms exceeds memory here; the criterion
            # only asks for the residual
            rep = hbar.check_pairwise(m, n, regularity=not slow)
            pairs[f"{m},{n}"] = rec = rep.record()
            if not rep.residual_zero:
                fit = hbar.pairwise_fit(m, n)
                rec["fitted_over_zeta"] = None if fit is None else [_q(c / QExt(hbar.zeta(m, n))) for c in fit]
            ok = ok and rep.ok
    detail["pairwise"] = pairs
    comb_ok = {}
    for m in ((7,) if slow else (3, 5)):
        rep = hbar.check_proof_combinatorics(m)
        comb_ok[m] = rep.ok
        ok = ok and rep.ok
    detail["combinatorics"] = comb_ok
    xi_ok = all(hbar.xi(2 * n - 1) == mpq(n * (2 * n + 1) * (2 * n - 2), 2 * n - 1) for n in range(1, 7))
    detail["xi_identity"] = xi_ok
    return ok and xi_ok, detail


def criterion_9() -> tuple[bool, dict]:
    from .hbar import build_sigma_tilde, correction_coefficient, rescale

    s3 = golden_state("sigma3")
    basis = [golden_state(t) for t in golden_tags("quartic_basis.v")]
    sol = solve_columns([state_to_vector(b) for b in basis], state_to_vector(s3), nullspace=False)
    x1, x2 = sol.particular.get(0, QExt(0)), sol.particular.get(1, QExt(0))
    ratio = x2 / x1 if x1 else None
    exact = rescale(s3.scale(1 / x1) if x1 else s3, 4)
    tilde = build_sigma_tilde(2)
    diff = exact - tilde
    low_orders = [not diff.hbar_part(h) for h in (0, 1)]
    c = correction_coefficient(2)
    ok = all(low_orders) and ratio == QExt(mpq(20, 3)) and c == mpq(20, 3)
    return ok, {"hbar0_agree": low_orders[0], "hbar1_agree": low_orders[1],
                "exact_ratio": _q(ratio), "hbar_route": _q(c)}


# ---------------------------------------------------------------- 10

_COEFFS = (QExt(1), QExt(-1), QExt(2), QExt(mpq(1, 2)), QExt(mpq(-3, 2)), S)


def _random_state(rng: random.Random, max_depth: int = 3) -> State:
    """A homogeneous one-point state with one to three terms."""
    n = rng.randint(1, max_depth)
    p = rng.choice((0, 0, 1))
    monos = enumerate_monomials(n, p)
    if not monos:
        monos = enumerate_monomials(n, 0)
    out = State.zero()
    for m in rng.sample(monos, min(len(monos), rng.randint(1, 3))):
        out = out + State.from_monomial(m, rng.choice(_COEFFS))
    return out if out else State.from_monomial((current(1, -1),))


def _gen_binom(m: int, j: int) -> int:
    out = 1
    for t in range(j):
        out = out * (m - t)
    for t in range(1, j + 1):
        out //= t
    return out


def _prop_skew(rng):
    A, B = _random_state(rng), _random_state(rng)
    return skew_symmetry_check(A, B).ok


def _prop_commutator(rng):
    A, B, C = _random_state(rng), _random_state(rng), _random_state(rng, 2)
    m, n = rng.choice((0, 1, 2)), rng.choice((-1, 0, 1))
    lhs = mode_action(A, m, mode_action(B, n, C)) - mode_action(B, n, mode_action(A, m, C))
    rhs = State.zero()
    for j in range(0, A.depth() + B.depth() + 1):
        c = _gen_binom(m, j)
        if c:
            rhs = rhs + mode_action(mode_action(A, j, B), m + n - j, C).scale(c)
    return lhs == rhs


def _prop_translate_zero(rng):
    A, B = _random_state(rng), _random_state(rng)
    return not mode_action(translate(A), 0, B)


def _prop_zero_mode_commutator(rng):
    X, Y, V = _random_state(rng), _random_state(rng), _random_state(rng)
    lhs = mode_action(X, 0, mode_action(Y, 0, V)) - mode_action(Y, 0, mode_action(X, 0, V))
    return lhs == mode_action(mode_action(X, 0, Y), 0, V)


def _prop_grades(rng):
    A, B = _random_state(rng), _random_state(rng)
    n = rng.randint(-2, 2)
    (dA, pA), (dB, pB) = A.bigrade(), B.bigrade()
    P = mode_action(A, n, B)
    TA = translate(A)
    ok = not P or P.bigrades() == {(dA + dB - n - 1, pA + pB)}
    return ok and (not TA or TA.bigrades() == {(dA + 1, pA)})


PROPERTIES: dict[str, Callable[[random.Random], bool]] = {
    "skew_symmetry": _prop_skew,
    "commutator": _prop_commutator,
    "translate_zero_mode": _prop_translate_zero,
    "zero_mode_commutator": _prop_zero_mode_commutator,
    "grade_conservation": _prop_grades,
}


def property_suite(cases: int = 500, seed: int = 20240613) -> dict:
    rng = random.Random(seed)
    names = list(PROPERTIES)
    counts = {k: [0, 0] for k in names}
    for i in range(cases):
        name = names[i % len(names)]
        counts[name][1] += 1
        if PROPERTIES[name](rng):
            counts[name][0] += 1
    return {k: {"passed": p, "cases": c} for k, (p, c) in counts.items()}


def criterion_10() -> tuple[bool, dict]:
    res = property_suite()
    total = sum(v["cases"] for v in res.values())
    ok = total >= 500 and all(v["passed"] == v["cases"] for v in res.values())
    return ok, {"cases": total, **res}


# ---------------------------------------------------------------- driver

CRITERIA: dict[int, tuple[str, Callable[[], tuple[bool, dict]], float | None]] = {
    1: ("invariant dimensions 1,0,1,2,14", criterion_1, 5.0),
    2: ("syzygies and Jacobi", criterion_2, 1.0),
    3: ("quadratic singular vector", criterion_3, 1.0),
    4: ("quartic singular space", criterion_4, 30.0),
    5: ("zero products (1,1), (1,3), (3,1)", criterion_5, 120.0),
    6: ("quartic-quartic decomposition", criterion_6, 1800.0),
    7: ("diagonal regularity", criterion_7, 60.0),
    8: ("hbar hierarchy", criterion_8, 600.0),
    9: ("cross-limit consistency", criterion_9, None),
    10: ("vertex-algebra property suite", criterion_10, 120.0),
}


def run_criterion(number: int, *, slow: bool = False) -> CriterionResult:
    title, fn, budget = CRITERIA[number]
    clear_caches()
    clear_vertex_caches()
    t0 = time.perf_counter()
    try:
        ok, detail = criterion_8(slow=True) if (number == 8 and slow) else fn()
    except AssertionError as exc:
        ok, detail = False, {"error": str(exc)}
    elapsed = time.perf_counter() - t0
    if number == 8 and slow:
        title, budget = title + " (exponent 7)", None
    return CriterionResult(number, title, ok, detail, elapsed, budget)


def run_all(tier: str = "fast", numbers=None) -> list[CriterionResult]:
    """Run criteria in order; the slow tier adds the (3,3) decomposition and exponent 7."""
    nums = sorted(numbers) if numbers else [k for k in CRITERIA if tier == "slow" or k not in SLOW]
    out = [run_criterion(k) for k in nums]
    if tier == "slow" and (numbers is None or 8 in nums):
        out.append(run_criterion(8, slow=True))
    return out
