"""Closed-form expected costs under random deletion models.

Positions here are 1-based to match the usual order-statistics sums, logs
are base 2 and real-valued, and ceilings appear only in the reduced-range
formulas, which are about ``ceil(log2 i_max)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
import math

from .errors import NonConvergence, TooLarge

_EXACT_LIMIT = 64


def binom(n: int, k: int) -> float:
    """C(n, k) as a float; exact integers for small n, log-gamma otherwise."""
    if k < 0 or k > n or n < 0:
        return 0.0
    if n <= _EXACT_LIMIT:
        return float(math.comb(n, k))
    return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))


def binom_ratio(n1: int, k1: int, n2: int, k2: int) -> float:
    """C(n1, k1) / C(n2, k2) without overflowing."""
    if k1 < 0 or k1 > n1:
        return 0.0
    if max(n1, n2) <= _EXACT_LIMIT:
        return math.comb(n1, k1) / math.comb(n2, k2)
    lg = math.lgamma
    return math.exp(lg(n1 + 1) - lg(k1 + 1) - lg(n1 - k1 + 1)
                    - lg(n2 + 1) + lg(k2 + 1) + lg(n2 - k2 + 1))


@dataclass(frozen=True)
class EditModel:
    """UD: one deletion per block; CND: D deletions over all B*ell symbols;
    PND: each symbol deleted independently with probability p."""

    variant: str
    ell: int
    B: int
    D: int | None = None
    p: float | None = None

    def __post_init__(self):
        v = self.variant.upper()
        object.__setattr__(self, "variant", v)
        if v not in ("UD", "CND", "PND"):
            raise ValueError(f"unknown edit model {self.variant!r}")
        if self.ell < 1 or self.B < 1:
            raise ValueError("ell and B must be positive")
        if v == "CND" and (self.D is None or not 0 <= self.D <= self.B * self.ell):
            raise ValueError(f"CND needs 0 <= D <= B*ell, got D={self.D}")
        if v == "PND" and (self.p is None or not 0 <= self.p <= 1):
            raise ValueError(f"PND needs 0 <= p <= 1, got p={self.p}")

    @classmethod
    def ud(cls, ell, B):
        return cls("UD", ell, B)

    @classmethod
    def cnd(cls, ell, B, D):
        return cls("CND", ell, B, D=D)

    @classmethod
    def pnd(cls, ell, B, p):
        return cls("PND", ell, B, p=p)

    def expected_edits(self) -> float:
        """Expected deletions in one user's block."""
        if self.variant == "UD":
            return 1.0
        if self.variant == "CND":
            return self.D / self.B
        return self.p * self.ell


@dataclass(frozen=True)
class CostEstimate:
    bits: float
    breakdown: dict = field(default_factory=dict)


def prob_imin_at_least(model: EditModel, i: int) -> float:
    ell, B = model.ell, model.B
    if model.variant == "UD":
        return ((ell - i + 1) / ell) ** B
    if model.variant == "CND":
        return binom_ratio(B * (ell - i + 1), model.D, B * ell, model.D)
    return (1 - model.p) ** (B * (i - 1))


def expected_imin(model: EditModel) -> float:
    """E[min(i_min, ell)] over 1-based positions; no deletion counts as ell."""
    return math.fsum(prob_imin_at_least(model, i) for i in range(1, model.ell + 1))


def expected_span(model: EditModel) -> float:
    """Expected number of resent symbols per user in Scheme T.

    UD: E[i_max - i_min] = ell + 1 - 2 E[i_min], using E[i_max] = ell + 1 - E[i_min].
    CND/PND: ell - E[i_min].
    """
    e = expected_imin(model)
    if model.variant == "UD":
        return model.ell + 1 - 2 * e
    return model.ell - e


def expected_min_deletions(model: EditModel) -> float:
    """E[min_s d_s], the fewest deletions any single block receives."""
    ell, B = model.ell, model.B
    if model.variant == "UD":
        return 1.0
    if model.variant == "PND":
        p = model.p
        tail = [0.0] * (ell + 2)     # tail[m] = P(d >= m) for one block
        for d in range(ell, -1, -1):
            tail[d] = tail[d + 1] + binom(ell, d) * p ** d * (1 - p) ** (ell - d)
        return math.fsum(min(tail[m], 1.0) ** B for m in range(1, ell + 1))
    D = model.D
    total = 0.0
    for m in range(1, D // B + 1):
        # ways[u] counts placements of u deletions with every block holding >= m
        ways = [1] + [0] * D
        for _ in range(B):
            nxt = [0] * (D + 1)
            for u, w in enumerate(ways):
                if w:
                    for d in range(m, min(ell, D - u) + 1):
                        nxt[u + d] += w * math.comb(ell, d)
            ways = nxt
        total += ways[D] / math.comb(B * ell, D)
    return total


def expected_span_implemented(model: EditModel) -> float:
    """Expected resent span of the multi-deletion Scheme T protocol.

    With several deletions per block the new length is ell - min_s d_s and
    every coordinate from i_min onwards is resent, so per round
    |I| = (ell - i_min) + 1 - min_s d_s whenever something is deleted.  UD
    uses the exact span i_max - i_min and matches :func:`expected_span`.
    """
    if model.variant == "UD":
        return expected_span(model)
    if model.variant == "CND":
        p_any = 1.0 if model.D > 0 else 0.0
    else:
        p_any = 1 - (1 - model.p) ** (model.B * model.ell)
    return expected_span(model) + p_any - expected_min_deletions(model)


def expected_cost_T(model: EditModel, q: int) -> CostEstimate:
    bits = expected_span(model) * math.log2(q)
    return CostEstimate(bits, {"position_bits": 0.0, "value_bits": 0.0, "span_bits": bits})


def eta(model: EditModel) -> float:
    return expected_span(model) / model.ell


@dataclass(frozen=True)
class EtaLimit:
    value: float
    is_bound: bool      # True: the limit is at least ``value``


def eta_limit(model: EditModel, c: float | None = None) -> EtaLimit:
    """Limit of eta as ell grows.

    ``c`` is lim B/ell for UD with growing B, or lim B*p for PND (defaults to
    the model's own B*p).  Without ``c`` UD is taken at constant B.
    """
    if model.variant == "UD":
        if c is None:
            return EtaLimit((model.B - 1) / (model.B + 1), False)
        return EtaLimit(1 - 2 * math.exp(-c), True)
    if model.variant == "CND":
        return EtaLimit(model.D / (model.D + 1), True)
    if c is None:
        c = model.B * model.p
    return EtaLimit(1 - math.exp(-c), True)


def expected_cost_PV(model: EditModel, q: int) -> CostEstimate:
    m = model.expected_edits()
    pos, val = m * math.log2(model.ell), m * math.log2(q)
    return CostEstimate(pos + val, {"position_bits": pos, "value_bits": val, "span_bits": 0.0})


# Lower bounds ------------------------------------------------------------

def lev_lower_bound(ell: int, d: int, q: int, mode: str = "deletions") -> float:
    if not 0 <= d <= ell:
        raise ValueError(f"need 0 <= d <= ell, got d={d} ell={ell}")
    if mode == "deletions":
        c = math.comb(ell - d, d)
        return math.log2(c) if c else float("-inf")
    if mode == "indels":
        return d * math.log2(q - 1) + math.log2(math.comb(ell + d, d)) if q > 1 else float("-inf")
    raise ValueError(f"unknown mode {mode!r}")


def edit_ball_size(x, d: int, limit: int = 2_000_000) -> int:
    """Number of distinct strings reachable from ``x`` by at most ``d`` deletions."""
    x = tuple(x)
    ell = len(x)
    if sum(math.comb(ell, j) for j in range(min(d, ell) + 1)) > limit:
        raise TooLarge(f"ball of radius {d} around a length-{ell} string is too large to enumerate")
    seen = {x}
    frontier = {x}
    for _ in range(min(d, ell)):
        nxt = set()
        for y in frontier:
            for i in range(len(y)):
                nxt.add(y[:i] + y[i + 1:])
        nxt -= seen
        seen |= nxt
        frontier = nxt
    return len(seen)


# Reduced-range position encoding ----------------------------------------

def reduced_range_savings(ell: int, d: int) -> float:
    """s(ell, d): expected bits saved per position by encoding against i_max."""
    if not 1 <= d <= ell:
        raise ValueError(f"need 1 <= d <= ell, got d={d} ell={ell}")
    top = math.ceil(math.log2(ell)) if ell > 1 else 0
    return math.fsum(binom_ratio(2 ** (i - 1), d, ell, d) for i in range(1, top + 1))


def expected_log_imax(ell: int, d: int) -> float:
    """E[ceil(log2 i_max)] when d of the ell positions are deleted uniformly."""
    top = math.ceil(math.log2(ell)) if ell > 1 else 0
    return top - reduced_range_savings(ell, d)


def _ceil_log(ell: int) -> int:
    return math.ceil(math.log2(ell)) if ell > 1 else 0


def expected_cost_reduced_range(model: EditModel) -> float:
    """Expected position bits per user-node pair with reduced-range encoding.

    CND treats every split (d_1, ..., d_B) of the D deletions as equally
    likely, which is what the generating-function closed form computes.
    """
    ell, B = model.ell, model.B
    top = _ceil_log(ell)
    if model.variant == "CND":
        D = model.D
        if D == 0:
            return 0.0
        if D > ell:
            raise ValueError(f"closed form needs D <= ell, got D={D} ell={ell}")
        total = math.comb(B + D - 1, D)
        acc = math.fsum(d * reduced_range_savings(ell, d) * math.comb(B + D - d - 2, D - d)
                        for d in range(1, D + 1)) if B > 1 else D * reduced_range_savings(ell, D)
        return D / B * top - acc / total
    if model.variant == "PND":
        p = model.p
        if p == 0:
            return 0.0
        acc = 0.0
        for d in range(1, ell + 1):
            w = d * p ** d * (1 - p) ** (ell - d)
            if w == 0.0:
                continue
            acc += w * math.fsum(binom(2 ** (i - 1), d) for i in range(1, top + 1))
        return p * ell * top - acc
    if model.variant == "UD":
        return expected_log_imax(ell, 1)
    raise ValueError(model.variant)


def homogeneous_h(k: int, weights) -> float:
    """Complete homogeneous symmetric polynomial h_k evaluated at ``weights``."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    h = [1.0] + [0.0] * k
    for w in weights:
        for j in range(1, k + 1):
            h[j] += w * h[j - 1]
    return h[k]


def expected_cost_reduced_range_weighted(ell: int, D: int, lambdas, s: int) -> float:
    """Per-user reduced-range cost when split (d_1..d_B) has weight prod lambda_i**d_i."""
    top = _ceil_log(ell)
    others = [w for i, w in enumerate(lambdas) if i != s]
    num = 0.0
    for d in range(1, min(D, ell) + 1):
        num += lambdas[s] ** d * d * (top - reduced_range_savings(ell, d)) * homogeneous_h(D - d, others)
    return num / homogeneous_h(D, lambdas)


def brute_force_reduced_range_cnd(ell: int, B: int, D: int) -> float:
    """Average of d_0 * E[ceil(log2 i_max) | d_0] over all weak compositions of D."""
    total = 0.0
    count = 0
    for bars in combinations(range(D + B - 1), B - 1):
        d0 = bars[0] if bars else D
        count += 1
        if d0:
            total += d0 * expected_log_imax(ell, d0)
    return total / count


# Lambert W ---------------------------------------------------------------

def lambert_w(x: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Principal branch W(x) for x >= 0 by Newton iteration from log(1 + x)."""
    if x < 0:
        raise ValueError("only x >= 0 is supported")
    if x == 0:
        return 0.0
    w = math.log1p(x)
    for _ in range(max_iter):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol * max(1.0, x):
            return w
        w -= f / (ew * (w + 1))
    raise NonConvergence(f"Lambert W did not converge for x={x}")


def lambert_w_of_log(log_x: float, max_iter: int = 200) -> float:
    """W(exp(log_x)), usable when exp(log_x) overflows a float."""
    if log_x < 700:
        return lambert_w(math.exp(log_x))
    # solve w + ln w = log_x
    w = log_x - math.log(log_x)
    for _ in range(max_iter):
        f = w + math.log(w) - log_x
        if abs(f) <= 1e-14 * log_x:
            return w
        w -= f / (1 + 1 / w)
    raise NonConvergence(f"Lambert W did not converge for log x={log_x}")
