"""
Exact-rational verification of the algebraic identities behind the multiplier
hierarchy, plus high-precision checks of the analytic bounds.

The polynomial families

    omega1(k) = sum_i xi_i^{2k} - (xi_1+xi_2)^{2k} - (xi_1+xi_3)^{2k}
                - (xi_1+xi_4)^{2k}
    omega2(k) = sum_i xi_i^{2k+1}

are divisible, on the zero-sum hyperplane, by xi_1 xi_2 xi_3 xi_4 and by
(xi_1+xi_2)(xi_1+xi_3)(xi_1+xi_4) respectively; the decomposed quotients here
witness that divisibility termwise.  Everything in this module runs on exact
`fractions.Fraction` arithmetic except the floating-point bound suite.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from itertools import permutations

import numpy as np

from . import multipliers as mult
from .spectral import ConfigurationError


@dataclass(frozen=True)
class CheckReport:
    name: str
    n_checked: int
    n_failed: int
    witnesses: tuple = ()

    @property
    def passed(self) -> bool:
        return self.n_failed == 0

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "n_checked": self.n_checked,
            "n_failed": self.n_failed,
            "witnesses": [list(map(str, w)) for w in self.witnesses],
        }


def _frac_tuple(xs) -> tuple:
    return tuple(Fraction(x) for x in xs)


def _check_zero_sum(xs) -> None:
    if sum(xs) != 0:
        raise ConfigurationError(f"tuple {xs} is not on the zero-sum hyperplane")


# ---------------------------------------------------------------------------
# tuple generators
# ---------------------------------------------------------------------------


def random_hyperplane_tuples(count: int, arity: int, seed: int, max_abs: int = 40):
    """Integer tuples on the zero-sum hyperplane, components in [-max_abs, max_abs]."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        head = [rng.randint(-max_abs, max_abs) for _ in range(arity - 1)]
        last = -sum(head)
        if abs(last) > max_abs:
            continue
        out.append(tuple(head + [last]))
    return out


def degenerate_hyperplane_tuples(count: int, arity: int, seed: int, max_abs: int = 40):
    """
    Zero-sum tuples forced through the degenerate strata: zero components and
    (for arity 4) vanishing pair sums.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        kind = rng.randrange(3)
        if kind == 0:  # one zero component
            head = [rng.randint(-max_abs, max_abs) for _ in range(arity - 2)]
            tup = [0] + head + [-sum(head)]
        elif kind == 1 and arity >= 4:  # a vanishing pair sum
            a = rng.randint(-max_abs, max_abs)
            head = [a, -a] + [rng.randint(-max_abs, max_abs) for _ in range(arity - 3)]
            tup = head + [-sum(head)]
        else:  # several coincident zeros
            tup = [0] * (arity - 2) + [rng.randint(-max_abs, max_abs)]
            tup.append(-sum(tup))
        if max(abs(t) for t in tup) > max_abs:
            continue
        tup = tup[:]
        rng.shuffle(tup)
        out.append(tuple(tup))
    return out


# ---------------------------------------------------------------------------
# the two polynomial decompositions
# ---------------------------------------------------------------------------


def _s_range(total: int):
    """(i, j) with i + j = total, empty when total < 0 (empty-sum rule)."""
    return [(i, total - i) for i in range(total + 1)] if total >= 0 else []


def omega1_direct(k: int, xs):
    if k < 2:
        raise ConfigurationError(f"omega1 requires k >= 2, got {k}")
    x1, x2, x3, x4 = _frac_tuple(xs)
    return (
        x1 ** (2 * k)
        + x2 ** (2 * k)
        + x3 ** (2 * k)
        + x4 ** (2 * k)
        - (x1 + x2) ** (2 * k)
        - (x1 + x3) ** (2 * k)
        - (x1 + x4) ** (2 * k)
    )


def omega1_quotient(k: int, xs):
    """The decomposed quotient omega1(k) / (xi_1 xi_2 xi_3 xi_4), exact."""
    if k < 2:
        raise ConfigurationError(f"omega1 quotient requires k >= 2, got {k}")
    x1, x2, x3, x4 = _frac_tuple(xs)
    t = Fraction(0)
    for i, j in _s_range(2 * k - 5):
        s = -1 if i % 2 else 1
        t += s * (
            -(x1 ** (j + 1) + x2 ** (j + 1))
            * sum((x3**m * (x3 + x4) ** l for m, l in _s_range(i)), Fraction(0))
            + (x1 ** (i + 1) + x3 ** (i + 1))
            * sum((x2**m * (x2 + x4) ** l for m, l in _s_range(j)), Fraction(0))
            + (x2 ** (i + 1) + x3 ** (i + 1))
            * sum((x1**m * (x1 + x4) ** l for m, l in _s_range(j)), Fraction(0))
            + (x1 ** (i + 1) + x2 ** (i + 1))
            * sum((x4**m * (x3 + x4) ** l for m, l in _s_range(j)), Fraction(0))
        )
    for i, j in _s_range(2 * k - 4):
        s = -1 if i % 2 else 1
        t -= 2 * (
            x1**i * (x1 + x4) ** j
            + x2**i * (x2 + x4) ** j
            + x3**i * (x3 + x4) ** j
            + x4**i * (x3 + x4) ** j
        )
        t -= s * (
            x4**i * sum((x1**m * (x1 + x3) ** l for m, l in _s_range(j)), Fraction(0))
            + x3**i * sum((x4**m * (x2 + x4) ** l for m, l in _s_range(j)), Fraction(0))
        )
        t -= s * x4**i * sum(
            ((x2**m + x3**m) * (x2 + x3) ** l for m, l in _s_range(j)), Fraction(0)
        )
    return t


def omega1_decomposed(k: int, xs):
    x1, x2, x3, x4 = _frac_tuple(xs)
    return x1 * x2 * x3 * x4 * omega1_quotient(k, xs)


def omega2_direct(k: int, xs):
    if k < 1:
        raise ConfigurationError(f"omega2 requires k >= 1, got {k}")
    return sum((x ** (2 * k + 1) for x in _frac_tuple(xs)), Fraction(0))


def omega2_quotient(k: int, xs):
    """The decomposed quotient omega2(k) / ((xi_1+xi_2)(xi_1+xi_3)(xi_1+xi_4))."""
    if k < 1:
        raise ConfigurationError(f"omega2 quotient requires k >= 1, got {k}")
    x1, x2, x3, x4 = _frac_tuple(xs)
    t = Fraction(0)
    for i, j in _s_range(2 * k - 2):
        s = -1 if i % 2 else 1
        t += s * (2 * x1**i * x4**j + x2**i * x3**j)
        if j >= 1:
            t += (
                s
                * sum((x1**n * (-x4) ** h for n, h in _s_range(i)), Fraction(0))
                * sum((x2**m * (-x4) ** l for m, l in _s_range(j)), Fraction(0))
            )
            inner = sum(
                ((x3**m * (-x2) ** l + x4**m * (-x1) ** l) for m, l in _s_range(j - 1)),
                Fraction(0),
            )
            inner += sum(
                (
                    (-x1) ** l
                    * sum((x3**n * (-x2) ** h for n, h in _s_range(m - 1)), Fraction(0))
                    + (-x2) ** m
                    * sum((x4**n * (-x1) ** h for n, h in _s_range(l - 1)), Fraction(0))
                    for m, l in _s_range(j)
                    if m >= 1 and l >= 1
                ),
                Fraction(0),
            )
            t -= s * x4 ** (i + 1) * inner
    for i, j in _s_range(2 * k - 1):
        if i < 1 or j < 1:
            continue
        s = -1 if i % 2 else 1
        t += s * x3**i * sum(
            (x1**m * (-x4) ** l for m, l in _s_range(j - 1)), Fraction(0)
        )
        t += x4**j * sum(
            ((-x2) ** m * x3**l for m, l in _s_range(i - 1)), Fraction(0)
        )
    return t


def omega2_decomposed(k: int, xs):
    x1, x2, x3, x4 = _frac_tuple(xs)
    return (x1 + x2) * (x1 + x3) * (x1 + x4) * omega2_quotient(k, xs)


# ---------------------------------------------------------------------------
# identity checks
# ---------------------------------------------------------------------------


def _report(name: str, failures: list, n: int) -> CheckReport:
    return CheckReport(name, n, len(failures), tuple(failures[:10]))


def check_omega1(tuples, k_range=range(2, 7)) -> CheckReport:
    failures = []
    n = 0
    for xs in tuples:
        _check_zero_sum(_frac_tuple(xs))
        for k in k_range:
            n += 1
            if omega1_direct(k, xs) != omega1_decomposed(k, xs):
                failures.append((k, xs))
    return _report("omega1 decomposition", failures, n)


def check_omega2(tuples, k_range=range(1, 7)) -> CheckReport:
    failures = []
    n = 0
    for xs in tuples:
        _check_zero_sum(_frac_tuple(xs))
        for k in k_range:
            n += 1
            if omega2_direct(k, xs) != omega2_decomposed(k, xs):
                failures.append((k, xs))
    return _report("omega2 decomposition", failures, n)


def check_alpha4(tuples) -> CheckReport:
    """The three factored forms of the quartic resonance symbol agree exactly."""
    failures = []
    n = 0
    for xs in tuples:
        x1, x2, x3, x4 = _frac_tuple(xs)
        _check_zero_sum((x1, x2, x3, x4))
        n += 1
        f1 = x1**3 + x2**3 + x3**3 + x4**3
        f2 = 3 * (x1 * x2 * x3 + x1 * x2 * x4 + x1 * x3 * x4 + x2 * x3 * x4)
        f3 = 3 * (x1 + x2) * (x1 + x3) * (x1 + x4)
        if not (f1 == f2 == f3):
            failures.append((xs,))
    return _report("alpha4 factorizations", failures, n)


def cubic_coefficient(k: int, xs3):
    """sum_{i+j=2k-2} (xi_3^j((-xi_1)^i + (-xi_2)^i) + xi_1^i(-xi_2)^j), exact."""
    x1, x2, x3 = _frac_tuple(xs3)
    return sum(
        (
            x3**j * ((-x1) ** i + (-x2) ** i) + x1**i * (-x2) ** j
            for i, j in _s_range(2 * k - 2)
        ),
        Fraction(0),
    )


def check_cubic_identity(tuples3, k_range=range(1, 7)) -> CheckReport:
    """xi_1^{2k+1} + xi_2^{2k+1} + xi_3^{2k+1} = xi_1 xi_2 xi_3 * C_k exactly."""
    failures = []
    n = 0
    for xs in tuples3:
        x1, x2, x3 = _frac_tuple(xs)
        _check_zero_sum((x1, x2, x3))
        for k in k_range:
            n += 1
            lhs = x1 ** (2 * k + 1) + x2 ** (2 * k + 1) + x3 ** (2 * k + 1)
            if lhs != x1 * x2 * x3 * cubic_coefficient(k, xs):
                failures.append((k, xs))
    return _report("cubic correction identity", failures, n)


def _quartic_def_coefficient(k: int, xs):
    """
    Exact expansion coefficient (of sigma^{2k}/(2k)!) of the quartic
    multiplier divided by i: symmetrization of the cubic-correction
    coefficients over the pair splits.
    """
    x = _frac_tuple(xs)
    acc = Fraction(0)
    for (a, b), (c, d) in (
        ((0, 1), (2, 3)),
        ((0, 2), (1, 3)),
        ((0, 3), (1, 2)),
        ((1, 2), (0, 3)),
        ((1, 3), (0, 2)),
        ((2, 3), (0, 1)),
    ):
        pair = x[c] + x[d]
        acc += cubic_coefficient(k, (x[a], x[b], pair)) * pair
    return acc / 6 / 6  # -(3/2) * (-(1/9)) * mean over the 6 splits


def _quartic_id_coefficient(k: int, xs, c=Fraction(-1)):
    """
    Exact expansion coefficient of the closed-form identity:
    -(c/108)(sum xi^3 / prod xi) omega1_direct(k) + (c/36) sum xi^{2k-1}.
    Requires a nondegenerate tuple.
    """
    x1, x2, x3, x4 = _frac_tuple(xs)
    prod = x1 * x2 * x3 * x4
    if prod == 0:
        raise ConfigurationError("identity coefficient requires nonzero components")
    alpha = x1**3 + x2**3 + x3**3 + x4**3
    bracket = omega1_direct(k, xs) if k >= 2 else _bracket_low(k, (x1, x2, x3, x4))
    tail = sum((x ** (2 * k - 1) for x in (x1, x2, x3, x4)), Fraction(0))
    return -Fraction(c, 108) * (alpha / prod) * bracket + Fraction(c, 36) * tail


def _bracket_low(k: int, xs):
    x1, x2, x3, x4 = xs
    return (
        x1 ** (2 * k)
        + x2 ** (2 * k)
        + x3 ** (2 * k)
        + x4 ** (2 * k)
        - (x1 + x2) ** (2 * k)
        - (x1 + x3) ** (2 * k)
        - (x1 + x4) ** (2 * k)
    )


def check_quartic_identity(tuples, k_range=range(2, 7)) -> CheckReport:
    """
    Per-expansion-order form of the closed quartic-multiplier identity with
    c = -1, on nondegenerate tuples.
    """
    failures = []
    n = 0
    for xs in tuples:
        x = _frac_tuple(xs)
        _check_zero_sum(x)
        if 0 in x:
            continue
        for k in k_range:
            n += 1
            if _quartic_def_coefficient(k, xs) != _quartic_id_coefficient(k, xs):
                failures.append((k, xs))
    return _report("quartic multiplier identity (c = -1)", failures, n)


def check_low_order_vanishing(tuples) -> CheckReport:
    """
    The k = 0 and k = 1 expansion coefficients of the quartic multiplier
    vanish identically on the hyperplane (exact rational functions on
    nondegenerate tuples).
    """
    failures = []
    n = 0
    for xs in tuples:
        x = _frac_tuple(xs)
        _check_zero_sum(x)
        if 0 in x:
            continue
        for k in (0, 1):
            n += 1
            def_side = _quartic_def_coefficient(k, xs)
            id_side = _quartic_id_coefficient(k, xs)
            if def_side != 0 or id_side != 0:
                failures.append((k, xs, def_side, id_side))
    return _report("low-order vanishing", failures, n)


def check_factorial(p_max: int = 6, n_max: int = 25) -> CheckReport:
    """
    Exhaustive factorial inequality: for 0 <= n_1 <= n_i <= n_p <= n_max with
    n_1 + n_p = n_2 + ... + n_{p-1} and 4 <= p <= p_max,

        n_2! n_3! ... n_{p-1}! <= n_1! n_p!.
    """
    if p_max < 4 or n_max < 1:
        raise ConfigurationError("check_factorial requires p_max >= 4, n_max >= 1")
    fact = [math.factorial(i) for i in range(n_max + 1)]
    failures = []
    n_checked = 0

    def middles(count, lo, hi, total):
        if count == 0:
            if total == 0:
                yield ()
            return
        lo_needed = max(lo, total - hi * (count - 1))
        hi_allowed = min(hi, total)
        for v in range(lo_needed, hi_allowed + 1):
            for rest in middles(count - 1, lo, hi, total - v):
                yield (v,) + rest

    for p in range(4, p_max + 1):
        for n1 in range(n_max + 1):
            for npv in range(n1, n_max + 1):
                bound = fact[n1] * fact[npv]
                for mid in middles(p - 2, n1, npv, n1 + npv):
                    n_checked += 1
                    prod = 1
                    for v in mid:
                        prod *= fact[v]
                    if prod > bound:
                        failures.append(((n1,) + mid + (npv,),))
    return _report("factorial inequality", failures, n_checked)


# ---------------------------------------------------------------------------
# majorant series and bound checks (floating point)
# ---------------------------------------------------------------------------


def theta_bounds(k: int, xs):
    """
    The two exact majorant polynomials at order k (absolute values of the
    signed tuple; the primed sum ranges over ordered triples of distinct
    indices).
    """
    if k < 0:
        raise ConfigurationError(f"theta_bounds requires k >= 0, got {k}")
    x = _frac_tuple(xs)
    a = [abs(v) for v in x]
    p14, p24, p34 = abs(x[0] + x[3]), abs(x[1] + x[3]), abs(x[2] + x[3])

    theta1 = Fraction(0)
    for i, j in _s_range(k):
        theta1 += (
            a[0] ** i * p14**j
            + a[1] ** i * p24**j
            + a[2] ** i * p34**j
            + a[3] ** i * p34**j
        )
    for p1, p2, p3 in permutations(range(4), 3):
        pair = abs(x[p2] + x[p3])
        for i, j in _s_range(k):
            theta1 += a[p1] ** i * sum(
                (a[p2] ** m * pair**l for m, l in _s_range(j)), Fraction(0)
            )

    theta2 = Fraction(0)
    for i, j in _s_range(k):
        theta2 += a[0] ** i * a[3] ** j + a[1] ** i * a[2] ** j
        theta2 += a[2] ** i * sum(
            (a[0] ** m * a[3] ** l for m, l in _s_range(j)), Fraction(0)
        )
        theta2 += a[3] ** j * sum(
            (a[1] ** m * a[2] ** l for m, l in _s_range(i)), Fraction(0)
        )
        theta2 += a[3] ** i * sum(
            (a[3] ** m * a[0] ** l for m, l in _s_range(j)), Fraction(0)
        )
        theta2 += sum(
            (a[0] ** n * a[3] ** h for n, h in _s_range(i)), Fraction(0)
        ) * sum((a[1] ** m * a[3] ** l for m, l in _s_range(j)), Fraction(0))
        inner = Fraction(0)
        for m, l in _s_range(j):
            inner += a[0] ** l * sum(
                (a[2] ** n * a[1] ** h for n, h in _s_range(m)), Fraction(0)
            )
            inner += a[1] ** m * sum(
                (a[3] ** n * a[0] ** h for n, h in _s_range(l)), Fraction(0)
            )
        theta2 += a[3] ** i * inner
    return theta1, theta2


class _NestedTables:
    """
    Running tables for the majorant recurrences: S_k(a,b) (pair-power sums)
    and nests N_k = a*N_{k-1} + inner_k, updated one order at a time so the
    whole positive series runs in O(1) vector work per order.
    """

    def __init__(self):
        self._nodes = []

    def pair(self, a, b):
        node = {"kind": "pair", "a": a, "b": b, "b_pow": np.ones_like(a), "val": np.ones_like(a)}
        self._nodes.append(node)
        return node

    def nest(self, a, inner):
        node = {"kind": "nest", "a": a, "inner": inner, "val": inner["val"].copy()}
        self._nodes.append(node)
        return node

    def advance(self):
        """Move every table from order k to order k+1 (call in creation order:
        inner tables are created before their nests)."""
        for node in self._nodes:
            if node["kind"] == "pair":
                node["b_pow"] = node["b_pow"] * node["b"]
                node["val"] = node["a"] * node["val"] + node["b_pow"]
            else:
                node["val"] = node["a"] * node["val"] + node["inner"]["val"]


def _theta_majorant_batch(sigma: float, arr: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """
    |c|/54 * sum_k sigma^{k+4}/(k+4)! (Theta1(k) + Theta2(k)) for a batch of
    signed tuples (rows of arr), via the running recurrences, arguments
    normalized so the factorial envelope controls truncation.
    """
    a = np.abs(arr.T)
    scale = np.maximum(a.max(axis=0), 1.0)
    an = a / scale
    x = arr.T / scale
    p = {
        (i, j): np.abs(x[i] + x[j])
        for i in range(4)
        for j in range(4)
        if i != j
    }

    t = _NestedTables()
    theta1_nodes = [
        t.pair(an[0], p[(0, 3)]),
        t.pair(an[1], p[(1, 3)]),
        t.pair(an[2], p[(2, 3)]),
        t.pair(an[3], p[(2, 3)]),
    ]
    for p1, p2, p3 in permutations(range(4), 3):
        inner = t.pair(an[p2], p[(p2, p3)])
        theta1_nodes.append(t.nest(an[p1], inner))

    theta2_nodes = [t.pair(an[0], an[3]), t.pair(an[1], an[2])]
    theta2_nodes.append(t.nest(an[2], t.pair(an[0], an[3])))
    theta2_nodes.append(t.nest(an[3], t.pair(an[1], an[2])))
    theta2_nodes.append(t.nest(an[3], t.pair(an[3], an[0])))
    # product of the two alternating pair sums: two stacked nests
    w5 = t.nest(an[1], t.pair(an[0], an[3]))
    theta2_nodes.append(t.nest(an[3], w5))
    w6a = t.nest(an[0], t.pair(an[2], an[1]))
    w6b = t.nest(an[1], t.pair(an[3], an[0]))
    n6a = t.nest(an[3], w6a)
    n6b = t.nest(an[3], w6b)
    theta2_nodes += [n6a, n6b]

    smax = float(np.max(2.0 * sigma * scale))
    total = np.zeros(arr.shape[0])
    weight = sigma**4 / 24.0 * np.ones_like(scale)  # sigma^{k+4} scale^k / (k+4)!
    k = 0
    while True:
        theta = sum(n["val"] for n in theta1_nodes) + sum(
            n["val"] for n in theta2_nodes
        )
        term = weight * theta / 54.0
        total += term
        if k > smax and float(np.max(term / np.maximum(total, 1e-300))) < tol:
            return total
        t.advance()
        weight = weight * (sigma * scale) / (k + 5)
        k += 1
        if k > 2000:
            raise mult.SeriesTruncationError("theta majorant did not converge")


def check_beta_bounds(
    tuples, sigma_grid=(0.01, 0.1, 0.5, 1.0), c_inferred: float = mult.INFERRED_C
) -> CheckReport:
    """
    The five analytic bound families, with a truncation-tail allowance: the
    series values carry relative error ~1e-12, so a bound counts as violated
    only if exceeded by more than 1e-9 relative.

      (i)   |beta4| <= termwise majorant series (checked on a subsample;
            the majorant is evaluated tuple by tuple in exact arithmetic)
      (ii)  |beta4| <= (43|c|/54) sigma^4 e^{sigma sum|xi|}          (sigma <= 1)
      (iii) |beta4| <= (|c|/9) sum_{p1 != p2} [(1+|xi_p1|)(1+|xi_p2|)]^{-1}
                        e^{sigma sum|xi|}                            (sigma <= 1)
      (iv)  |beta3| <= sum_i (1+|xi_i|)^{-1} e^{sigma sum|xi|}  (on 3-tuples
            obtained by dropping the last component and closing the sum)
      (v)   |M5| <= (86|c|/27) sigma^4 e^{sigma sum|xi|} max|xi|  (on 5-tuples
            obtained by splitting the last component)
    """
    allowance = 1e-9
    failures = []
    n = 0
    cc = abs(c_inferred)
    full = np.array([[float(v) for v in xs] for xs in tuples], dtype=np.float64)
    chunk_size = 1000

    for sigma in sigma_grid:
        if sigma > 1.0:
            raise ConfigurationError("bound families require sigma <= 1")
        for start in range(0, full.shape[0], chunk_size):
            arr = full[start : start + chunk_size]
            offset = start
            x1, x2, x3, x4 = arr.T
            abs_sum = np.abs(arr).sum(axis=1)
            b4 = np.abs(mult.beta4_series(sigma, (x1, x2, x3, x4), tol=1e-13))
            env = np.exp(sigma * abs_sum)

            bound1 = _theta_majorant_batch(sigma, arr)
            bad = np.nonzero(b4 > bound1 * (1.0 + allowance))[0]
            n += arr.shape[0]
            failures += [("(i)", sigma, tuples[offset + i]) for i in bad]

            bound2 = (43.0 * cc / 54.0) * sigma**4 * env
            bad = np.nonzero(b4 > bound2 * (1.0 + allowance))[0]
            n += arr.shape[0]
            failures += [("(ii)", sigma, tuples[offset + i]) for i in bad]

            recip = np.zeros_like(b4)
            cols = [np.abs(c) for c in (x1, x2, x3, x4)]
            for p in range(4):
                for q in range(4):
                    if p != q:
                        recip += 1.0 / ((1.0 + cols[p]) * (1.0 + cols[q]))
            bound3 = (cc / 9.0) * recip * env
            bad = np.nonzero(b4 > bound3 * (1.0 + allowance))[0]
            n += arr.shape[0]
            failures += [("(iii)", sigma, tuples[offset + i]) for i in bad]

            # cubic bound on derived 3-tuples
            t3 = -(x1 + x2)
            b3 = np.abs(mult.beta3(sigma, (x1, x2, t3), tol=1e-14))
            env3 = np.exp(sigma * (np.abs(x1) + np.abs(x2) + np.abs(t3)))
            bound4 = (
                1.0 / (1.0 + np.abs(x1))
                + 1.0 / (1.0 + np.abs(x2))
                + 1.0 / (1.0 + np.abs(t3))
            ) * env3
            bad = np.nonzero(b3 > bound4 * (1.0 + allowance))[0]
            n += arr.shape[0]
            failures += [("(iv)", sigma, tuples[offset + i]) for i in bad]

            # quintic bound on derived 5-tuples (split the last component)
            half = np.floor(x4 / 2.0)
            q5 = (x1, x2, x3, half, x4 - half)
            m5v = np.abs(mult.m5(sigma, q5, tol=1e-12))
            abs5 = sum(np.abs(np.asarray(q)) for q in q5)
            max5 = np.max(
                np.abs(np.stack([np.asarray(q, dtype=np.float64) for q in q5])), axis=0
            )
            bound5 = (86.0 * cc / 27.0) * sigma**4 * np.exp(sigma * abs5) * max5
            bad = np.nonzero(m5v > bound5 * (1.0 + allowance))[0]
            n += arr.shape[0]
            failures += [("(v)", sigma, tuples[offset + i]) for i in bad]
    return _report("analytic bound families", failures, n)
