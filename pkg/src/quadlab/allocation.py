"""Heavy-tailed weight law, conditioned allocations and their bounds.

The law of a single pendant size is

    p(k) = 3 |Q_{k+1}| / (4 * 12^(k-1)),   k >= 1,

which equals ``(3/2) * C(2k-2, k-1) / (4^(k-1) k (k+1))``.  Products of
``p`` over an allocation are ``(3/4)^N 12^(N-m)`` times the integer weight
``prod |Q_{y_i+1}|``, so every conditioned probability is a ratio of
integers.  Exact polynomial powers use Kronecker substitution on ``gmpy2``
integers.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import gmpy2
import numpy as np
from scipy import stats
from scipy.special import gammaln

from .enumeration import compositions, count_quadrangulations

SQRT_PI = math.sqrt(math.pi)
W_BAR = 2 * SQRT_PI / 3
W_BAR_SYMBOL = "2*sqrt(pi)/3"
TAIL_EXPONENT = Fraction(5, 2)
NU_EXACT = Fraction(2)  # closed form of the generating function; see tests
DP_BUDGET = 10**9
COMPOSITION_BUDGET = 2 * 10**6


class BudgetExceeded(ValueError):
    """Exact table would exceed the configured work budget."""


class RegimeViolation(ValueError):
    """``nu * N / m`` is not bounded away from 1."""


# ---------------------------------------------------------------------------
# the weight sequence
# ---------------------------------------------------------------------------


def p_exact(k: int) -> Fraction:
    if k < 1:
        raise ValueError("k must be positive")
    return Fraction(3 * count_quadrangulations(k + 1), 4 * 12 ** (k - 1))


def psi(k: int) -> float:
    """Correction term ``psi(k) = |Q_{k+1}| sqrt(pi) k^(5/2) / (2 12^(k-1)) - 1``."""
    if k < 1:
        raise ValueError("k must be positive")
    return math.expm1(float(log_p(k)) + math.log(2 * SQRT_PI / 3) + 2.5 * math.log(k))


def log_p(k) -> np.ndarray:
    """``log p(k)`` in floating point, vectorised."""
    k = np.asarray(k, dtype=float)
    return (
        math.log(1.5)
        + gammaln(2 * k - 1)
        - 2 * gammaln(k)
        - (k - 1) * math.log(4.0)
        - np.log(k)
        - np.log(k + 1)
    )


def p_float(cap: int) -> np.ndarray:
    """``p(1..cap)`` as floats; index 0 holds ``p(1)``."""
    return np.exp(log_p(np.arange(1, cap + 1)))


# relative error of ``p_float`` entries, generous for gammaln at k <= 1e7
_P_FLOAT_RTOL = 1e-12


def _tail_bounds(K: int, power: int) -> tuple[float, float]:
    """Bounds on ``sum_{k>K} k^power p(k)`` for power 0 or 1.

    Uses ``1/sqrt(pi (j+1)) <= C(2j,j)/4^j <= 1/sqrt(pi j)`` and an
    integral comparison, so both bounds decay like ``K^(power - 3/2)``.
    """
    if K < 2:
        raise ValueError("K must be at least 2")
    e = 1.5 - power
    hi = 1.5 / SQRT_PI * (K - 1) ** (-e) / e
    lo = 1.5 / SQRT_PI * (K + 2) ** (-e) / e
    return lo, hi


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= float(x) <= self.hi


def _partial_sums(K: int) -> tuple[float, float]:
    p = p_float(K)
    k = np.arange(1, K + 1, dtype=float)
    return math.fsum(p), math.fsum(k * p)


def normalization_bracket(cap: int = 10**6) -> Bracket:
    """Interval containing ``sum_k p(k)``: partial sum plus tail bounds."""
    s, _ = _partial_sums(cap)
    lo, hi = _tail_bounds(cap, 0)
    slack = s * _P_FLOAT_RTOL
    return Bracket(s + lo - slack, s + hi + slack)


def m_at_twelfth_bracket(cap: int = 10**6, exact_terms: int = 200) -> Bracket:
    """Interval containing ``1 + M(1/12) = sum_{l>=0} |Q_{l+2}| / 12^l``.

    The first ``exact_terms`` terms are exact rationals; the rest come from
    the float weight law and the analytic tail.
    """
    head = sum(Fraction(count_quadrangulations(l + 2), 12**l) for l in range(exact_terms))
    # |Q_{l+2}| / 12^l = (4/3) p(l+1)
    p = p_float(cap)[exact_terms:]
    mid = 4 / 3 * math.fsum(p)
    lo, hi = _tail_bounds(cap, 0)
    slack = mid * _P_FLOAT_RTOL + 1e-15
    return Bracket(float(head) + mid + 4 / 3 * lo - slack, float(head) + mid + 4 / 3 * hi + slack)


def generating_function_at_twelfth() -> float:
    """``1 + M(1/12)`` from the closed form ``(18z - 1 - (1-12z)^(3/2)) / (54 z^2)``."""
    z = 1 / 12
    return (18 * z - 1 - (1 - 12 * z) ** 1.5) / (54 * z * z)


@dataclass(frozen=True)
class NuInterval:
    lo: Fraction
    hi: Fraction
    cap: int

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi


def _down(x: float) -> Fraction:
    return Fraction(math.nextafter(x, -math.inf))


def _up(x: float) -> Fraction:
    return Fraction(math.nextafter(x, math.inf))


def exact_partial_mean(K: int) -> Fraction:
    return sum((k * p_exact(k) for k in range(1, K + 1)), Fraction(0))


@lru_cache(maxsize=16)
def mean_nu(cap: int = 10**6) -> NuInterval:
    """Rational enclosure of ``nu = E[xi]``.

    Terms up to ``cap`` are summed in floating point with a relative error
    allowance; the tail ``sum_{k>cap} k p(k)`` is bracketed analytically and
    contributes width of order ``cap^(-3/2)``, while the tail itself scales
    like ``cap^(-1/2)``.
    """
    _, s = _partial_sums(cap)
    lo, hi = _tail_bounds(cap, 1)
    slack = s * _P_FLOAT_RTOL
    return NuInterval(_down(s + lo - slack), _up(s + hi + slack), cap)


def nu_tail_bound(cap: int) -> float:
    """Upper bound on ``sum_{k > cap} k p(k)``."""
    return _tail_bounds(cap, 1)[1]


@dataclass(frozen=True)
class WeightLaw:
    cap: int
    p: tuple[Fraction, ...]
    nu: NuInterval
    tail_exponent: Fraction = TAIL_EXPONENT
    w_bar: float = W_BAR
    w_bar_symbol: str = W_BAR_SYMBOL
    c_lower: float = 0.0
    d_upper: float = 0.0

    @classmethod
    def build(cls, cap: int = 64, nu_cap: int = 10**6) -> "WeightLaw":
        p = tuple(p_exact(k) for k in range(1, cap + 1))
        ks = np.arange(1, max(cap, 10**5) + 1)
        scaled = np.exp(log_p(ks) + 2.5 * np.log(ks))
        # k^(5/2) p(k) increases to 3/(2 sqrt(pi)) after its minimum at k = 2
        return cls(
            cap=cap,
            p=p,
            nu=mean_nu(nu_cap),
            c_lower=float(scaled.min()),
            d_upper=max(float(scaled.max()), 3 / (2 * SQRT_PI)),
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p"] = [str(x) for x in self.p[:8]]
        d["nu"] = {"lo": float(self.nu.lo), "hi": float(self.nu.hi), "cap": self.nu.cap}
        d["tail_exponent"] = str(self.tail_exponent)
        return d


# ---------------------------------------------------------------------------
# exact polynomial arithmetic
# ---------------------------------------------------------------------------


def _pack(coeffs: Sequence[int], nbytes: int) -> gmpy2.mpz:
    raw = b"".join(int(c).to_bytes(nbytes, "little") for c in coeffs)
    return gmpy2.mpz(int.from_bytes(raw, "little"))


def _unpack(x, nbytes: int, count: int) -> list[int]:
    raw = int(x).to_bytes(nbytes * count, "little")
    return [int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") for i in range(count)]


def poly_mul(a: Sequence[int], b: Sequence[int], deg: int) -> list[int]:
    """Product of nonnegative integer polynomials truncated to degree ``deg``."""
    a = list(a[: deg + 1])
    b = list(b[: deg + 1])
    if not a or not b:
        return [0] * (deg + 1)
    bound = max(a) * max(b) * min(len(a), len(b))
    nbytes = max(1, (int(bound).bit_length() + 8) // 8)
    prod = _pack(a, nbytes) * _pack(b, nbytes)
    full = len(a) + len(b) - 1
    out = _unpack(prod, nbytes, full)[: deg + 1]
    return out + [0] * (deg + 1 - len(out))


def poly_pow(a: Sequence[int], e: int, deg: int) -> list[int]:
    result = [1] + [0] * deg
    base = list(a[: deg + 1]) + [0] * max(0, deg + 1 - len(a))
    while e:
        if e & 1:
            result = poly_mul(result, base, deg)
        e >>= 1
        if e:
            base = poly_mul(base, base, deg)
    return result


@lru_cache(maxsize=64)
def _size_weights(m: int) -> tuple[int, ...]:
    """``[0, |Q_2|, ..., |Q_{m+1}|]``."""
    return (0,) + tuple(count_quadrangulations(y + 1) for y in range(1, m + 1))


def _check_dp_budget(m: int, N: int, budget: int):
    if N * m * m > budget:
        raise BudgetExceeded(f"N*m^2 = {N * m * m} exceeds budget {budget}")


def allocation_weight_total(m: int, N: int, budget: int = DP_BUDGET) -> int:
    """``W_N(m) = sum over B_{m,N} of prod |Q_{y_i+1}|`` by exact DP."""
    if N < 1 or m < N:
        return 0
    _check_dp_budget(m, N, budget)
    return poly_pow(_size_weights(m), N, m)[m]


def allocation_weight_closed(m: int, N: int) -> int:
    """``W_N(m)`` by Lagrange inversion of ``R = 1 + 3 z R^2``.

    With ``U = R - 1`` the generating function of ``|Q_{k+1}|`` is
    ``U (3 - U) / (9 (1 + U))``; extracting ``[z^m]`` of its ``N``-th power
    gives a finite alternating sum of ``N`` binomial terms.
    """
    if N < 1 or m < N:
        return 0
    K = 2 * m - N - 1
    t = m - N
    comb = gmpy2.comb

    def c(tt: int):
        return comb(K, tt) if 0 <= tt <= K else gmpy2.mpz(0)

    c0, c1, c2 = c(t), c(t - 1), c(t - 2)
    outer = gmpy2.mpz(3) ** (N - 1)
    total = gmpy2.mpz(0)
    for j in range(min(N, t + 1)):
        term = outer * (3 * c0 - 2 * c1 - c2)
        total += -term if j % 2 else term
        # C(K, s - 1) = C(K, s) s / (K - s + 1) with s = t - j - 2
        s = t - j - 2
        c0, c1, c2 = c1, c2, (c2 * s // (K - s + 1) if s > 0 else gmpy2.mpz(0))
        if j + 1 < N:
            outer = outer * (N - 1 - j) // (3 * (j + 1))
    num = gmpy2.mpz(3) ** m * N * total
    den = gmpy2.mpz(m) * gmpy2.mpz(9) ** N
    q, rem = gmpy2.f_divmod(num, den)
    if rem:
        raise ArithmeticError("closed form is not integral")
    return int(q)


def _sum_scale(m: int, N: int) -> Fraction:
    return Fraction(3**N * 12**N, 4**N * 12**m)


def prob_sum_equals(N: int, m: int, budget: int = DP_BUDGET) -> Fraction:
    """``P(S_N = m)`` as an exact rational, by DP."""
    if N < 1 or m < N:
        return Fraction(0)
    return _sum_scale(m, N) * allocation_weight_total(m, N, budget)


def prob_sum_equals_closed(N: int, m: int) -> Fraction:
    """``P(S_N = m)`` through the closed-form weight."""
    if N < 1 or m < N:
        return Fraction(0)
    return _sum_scale(m, N) * allocation_weight_closed(m, N)


# ---------------------------------------------------------------------------
# conditioned allocations
# ---------------------------------------------------------------------------


def conditioned_allocation_exact(
    m: int, N: int, budget: int = DP_BUDGET, max_outcomes: int = COMPOSITION_BUDGET
) -> dict[tuple[int, ...], Fraction]:
    """Law of ``(xi_1..xi_N)`` given ``S_N = m`` as exact rationals."""
    if N < 1 or m < N:
        raise ValueError("need m >= N >= 1")
    _check_dp_budget(m, N, budget)
    if math.comb(m - 1, N - 1) > max_outcomes:
        raise BudgetExceeded(f"{math.comb(m - 1, N - 1)} allocations exceed {max_outcomes}")
    total = allocation_weight_total(m, N, budget)
    w = _size_weights(m)
    out = {}
    for y in compositions(m, N):
        num = 1
        for v in y:
            num *= w[v]
        out[y] = Fraction(num, total)
    return out


@dataclass
class _DPTables:
    m: int
    N: int
    p: np.ndarray  # p[y] for y = 0..m (p[0] = 0)
    T: np.ndarray  # T[j, s] = P(S_j = s)


@lru_cache(maxsize=32)
def _dp_tables(m: int, N: int) -> _DPTables:
    p = np.zeros(m + 1)
    p[1:] = p_float(m)
    T = np.zeros((N + 1, m + 1))
    T[0, 0] = 1.0
    for j in range(1, N + 1):
        T[j] = np.convolve(T[j - 1], p)[: m + 1]
    T.setflags(write=False)
    return _DPTables(m, N, p, T)


def _sample_dp(m: int, N: int, rng: np.random.Generator, reps: int) -> np.ndarray:
    tab = _dp_tables(m, N)
    out = np.empty((reps, N), np.int64)
    for r in range(reps):
        left = m
        for i in range(N, 0, -1):
            if i == 1:
                out[r, N - i] = left
                break
            ys = np.arange(1, left - (i - 1) + 1)
            w = tab.p[ys] * tab.T[i - 1, left - ys]
            y = ys[np.searchsorted(np.cumsum(w), rng.random() * w.sum(), side="right").clip(max=ys.size - 1)]
            out[r, N - i] = y
            left -= y
    return out


@lru_cache(maxsize=32)
def _xi_table(m: int) -> tuple[np.ndarray, np.ndarray]:
    p = p_float(m)
    return np.cumsum(p), 1.0 / p


def _jump_lower_bound(m: int, N: int) -> float:
    """Lower bound on ``min over B_{m,N} of sum 1/p(y_i)``.

    ``1/p(k) >= (2/3) sqrt(pi) (k-1)^(5/2)`` is convex, so Jensen applies;
    every term is also at least ``1/p(1) = 4/3``.
    """
    x = m / N - 1
    return max(4 * N / 3, N * (2 / 3) * SQRT_PI * max(x, 0.0) ** 2.5) * (1 - 1e-12)


def _sample_jump(m: int, N: int, rng: np.random.Generator, reps: int, batch: int = 4096) -> np.ndarray:
    """Rejection sampler with a planted big jump.

    Proposal: a uniform box receives ``m`` minus the sum of the others,
    which are i.i.d. ``xi``.  Accepting with probability
    ``L / sum_J 1/p(y_J)`` corrects the proposal density exactly.
    """
    cdf, inv_p = _xi_table(m)
    L = _jump_lower_bound(m, N)
    out = np.empty((reps, N), np.int64)
    got = 0
    while got < reps:
        u = rng.random((batch, N - 1))
        others = np.searchsorted(cdf, u * 1.0, side="right") + 1  # > m means overflow
        big = m - others.sum(axis=1)
        ok = (big >= 1) & (others <= m).all(axis=1)
        others, big = others[ok], big[ok]
        if big.size == 0:
            continue
        # inv_p index y-1
        s = inv_p[big - 1] + inv_p[others - 1].sum(axis=1)
        acc = rng.random(big.size) < L / s
        others, big = others[acc], big[acc]
        slot = rng.integers(0, N, size=big.size)
        for i in range(big.size):
            if got == reps:
                break
            row = np.insert(others[i], slot[i], big[i])
            out[got] = row
            got += 1
    return out


def choose_strategy(m: int, N: int, dp_budget: int = 10**8) -> str:
    if N == m or N == 1:
        return "trivial"
    return "dp" if N * m * m <= dp_budget else "jump"


def sample_conditioned(
    m: int,
    N: int,
    seed=None,
    reps: int | None = None,
    strategy: str | None = None,
) -> np.ndarray:
    """Draw from the law of ``(xi_1..xi_N)`` given ``S_N = m``.

    Returns one allocation (1-d array) or, with ``reps``, a ``(reps, N)``
    array.  ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    if not 1 <= N <= m:
        raise ValueError("need m >= N >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    count = 1 if reps is None else reps
    strategy = strategy or choose_strategy(m, N)
    if N == m:
        out = np.ones((count, N), np.int64)
    elif N == 1:
        out = np.full((count, 1), m, np.int64)
    elif strategy == "dp":
        out = _sample_dp(m, N, rng, count)
    elif strategy == "jump":
        out = _sample_jump(m, N, rng, count)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return out[0] if reps is None else out


# ---------------------------------------------------------------------------
# truncated sums and the Chernoff bound
# ---------------------------------------------------------------------------


def truncated_tail(m: int, k: int, x: float) -> Fraction:
    """``P(S_m^k >= x)`` exactly, where ``xi^k = xi 1{xi <= k}``."""
    if m < 1 or k < 1:
        raise ValueError("need m, k >= 1")
    D = 4 * 12 ** (k - 1)
    a = [0] * (k + 1)
    for t in range(1, k + 1):
        a[t] = 3 * count_quadrangulations(t + 1) * 12 ** (k - t)
    a[0] = D - sum(a[1:])
    dist = poly_pow(a, m, m * k)
    start = max(0, math.ceil(x))
    return Fraction(sum(dist[start:]), D**m)


def chernoff_eta(k: int, nu: float = float(NU_EXACT)) -> float:
    """``eta`` with ``E exp(xi^k / k) <= 1 + nu (1 + eta) / k``.

    ``eta = k / nu * sum_{t<=k} p(t) (e^{t/k} - 1 - t/k)``, which is
    ``O(k^(-1/2))``.
    """
    t = np.arange(1, k + 1)
    p = p_float(k)
    s = t / k
    return float(k / nu * math.fsum(p * (np.expm1(s) - s)))


def chernoff_bound(m: int, k: int, x: float, nu: float | None = None) -> float:
    """``exp(-x/k + nu m (1 + eta) / k)``; ``nu`` defaults to the upper enclosure."""
    nu = float(mean_nu().hi) if nu is None else nu
    eta = chernoff_eta(k, nu)
    return math.exp(-x / k + nu * m * (1 + eta) / k)


@dataclass
class ChernoffPoint:
    m: int
    k: int
    x: float
    exact: float
    bound: float
    eta: float

    @property
    def dominated(self) -> bool:
        return self.exact <= self.bound


def chernoff_check(m: int, k: int, x: float) -> ChernoffPoint:
    nu = float(mean_nu().hi)
    return ChernoffPoint(m, k, x, float(truncated_tail(m, k, x)), chernoff_bound(m, k, x, nu), chernoff_eta(k, nu))


def local_floor(N: int, m: int) -> float:
    """``P(S_N = m) m^(5/2) / N`` from the exact DP."""
    return float(prob_sum_equals(N, m)) * m**2.5 / N


def local_floor_sweep(Ns: Sequence[int], lam: float = 0.5) -> list[tuple[int, int, float]]:
    """``(N, m, floor)`` with ``m = ceil(2 nu N / lam)``."""
    nu = mean_nu().hi
    out = []
    for N in Ns:
        m = math.ceil(2 * nu * N / Fraction(lam))
        out.append((int(N), int(m), local_floor(int(N), int(m))))
    return out


# ---------------------------------------------------------------------------
# number of facial 2-cycles
# ---------------------------------------------------------------------------


@dataclass
class NWeights:
    """Exact weights ``|Q_{n,r,N}| / |R_r|`` for ``N = 1..N_max``.

    ``tail_bound`` bounds the total weight of ``N > N_max`` relative to the
    listed total; zero when the list is complete.
    """

    n: int
    r: int
    weights: list[int]
    tail_bound: float = 0.0

    @property
    def Ns(self) -> np.ndarray:
        return np.arange(1, len(self.weights) + 1)

    def probabilities(self) -> np.ndarray:
        total = sum(self.weights)
        scale = max(total.bit_length() - 900, 0)
        w = np.array([float(x >> scale) for x in self.weights])
        return w / w.sum()

    def exact_probability(self, N: int) -> Fraction:
        return Fraction(self.weights[N - 1], sum(self.weights))


def _weight_N(n: int, r: int, N: int, closed: bool) -> int:
    m = n - r
    W = allocation_weight_closed(m, N) if closed else allocation_weight_total(m, N)
    return math.comb(2 * r - 4 + N, N) * 2**N * W


@lru_cache(maxsize=64)
def n_weights(n: int, r: int, rel_tail: float = 1e-30, closed: bool = True) -> NWeights:
    """Exact N-weights, truncated once a geometric tail certificate is small.

    For ``N >= 2r - 4`` the ratio ``w_N / w_{2r-4}`` is at most
    ``(4/9)^(N - 2r + 4) / P(S_{2r-4} = n - r)``, so the weight beyond
    ``N_max`` is at most ``w_{2r-4} (9/5) (4/9)^(N_max - 2r + 5) / P``.
    """
    if r < 4:
        raise ValueError("r must be at least 4")
    m = n - r
    if m < 1:
        raise ValueError("need r < n")
    a = 2 * r - 4
    if m <= a + 8:
        return NWeights(n, r, [_weight_N(n, r, N, closed) for N in range(1, m + 1)])
    ws = [_weight_N(n, r, N, closed) for N in range(1, a + 1)]
    p_a = prob_sum_equals_closed(a, m)
    base = Fraction(ws[a - 1]) / p_a
    N = a
    while N < m:
        tail = base * Fraction(9, 5) * Fraction(4, 9) ** (N - a + 1)
        total = sum(ws)
        if tail <= Fraction(rel_tail) * total:
            return NWeights(n, r, ws, float(tail / total))
        N += 1
        ws.append(_weight_N(n, r, N, closed))
    return NWeights(n, r, ws)


def sample_N(n: int, r: int, rng: np.random.Generator, size: int | None = None):
    w = n_weights(n, r)
    return rng.choice(w.Ns, size=size, p=w.probabilities())


def n_tail_probability(n: int, r: int, threshold: int) -> Fraction:
    """``P(N >= threshold)`` under uniform ``Q_{n,r}`` (up to the certified tail)."""
    w = n_weights(n, r)
    total = sum(w.weights)
    return Fraction(sum(w.weights[threshold - 1 :]), total) if threshold <= len(w.weights) else Fraction(0)


# ---------------------------------------------------------------------------
# Monte Carlo bound checks
# ---------------------------------------------------------------------------


def wilson(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    ci = stats.binomtest(int(k), int(n)).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass
class BoundsReport:
    m: int
    N: int
    n: int
    r: int
    reps: int
    seed: int | None
    nu_hi: float
    regime_ratio: float
    largest_threshold: float
    largest_frac: float
    largest_ci: tuple[float, float]
    second_threshold: float
    second_frac: float
    second_ci: tuple[float, float]
    local_constant: float | None
    chernoff: list[dict] = field(default_factory=list)

    @property
    def chernoff_dominated(self) -> bool:
        return all(c["exact"] <= c["bound"] for c in self.chernoff)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["chernoff_dominated"] = self.chernoff_dominated
        return d


def regime_ratio(m: int, N: int) -> float:
    return float(mean_nu().hi * N / m)


def check_regime(m: int, N: int, margin: float = 0.05):
    ratio = regime_ratio(m, N)
    if ratio >= 1 - margin:
        raise RegimeViolation(f"nu*N/m = {ratio:.3f} is not below {1 - margin}")
    return ratio


def check_bounds(
    m: int,
    N: int,
    reps: int = 1000,
    seed: int | None = 0,
    n: int | None = None,
    r: int | None = None,
    margin: float = 0.05,
    exact_budget: int = 10**8,
) -> BoundsReport:
    """Monte Carlo and exact checks of the condensation bounds at ``(m, N)``.

    ``n`` defaults to ``m + r`` and ``r`` to ``N``; they only enter the
    thresholds ``m / (ln n)^2`` and ``r^(5/6)``.
    """
    ratio = check_regime(m, N, margin)
    r = N if r is None else r
    n = m + r if n is None else n
    ln2 = math.log(n) ** 2
    t1 = m / ln2
    t2 = r ** (5 / 6)
    ys = np.sort(sample_conditioned(m, N, seed=seed, reps=reps), axis=1)[:, ::-1]
    k1 = int((ys[:, 0] <= t1).sum())
    k2 = int((ys[:, 1] > t2).sum()) if N > 1 else 0
    local = local_floor(N, m) if N * m * m <= exact_budget else None
    cher = []
    k = max(1, int(m // ln2))
    if N > 1 and (N - 1) * k * (N - 1) * k <= exact_budget:
        pt = chernoff_check(N - 1, k, m * (1 - 1 / ln2))
        cher.append(asdict(pt) | {"dominated": pt.dominated})
    return BoundsReport(
        m=m,
        N=N,
        n=n,
        r=r,
        reps=reps,
        seed=seed,
        nu_hi=float(mean_nu().hi),
        regime_ratio=ratio,
        largest_threshold=t1,
        largest_frac=k1 / reps,
        largest_ci=wilson(k1, reps),
        second_threshold=t2,
        second_frac=k2 / reps,
        second_ci=wilson(k2, reps),
        local_constant=local,
        chernoff=cher,
    )
