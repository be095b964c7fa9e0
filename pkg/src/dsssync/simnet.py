"""Simulated users, storage nodes and coordinator.

Randomness comes from numpy's PCG64.  Trial ``i`` of a run seeded with
``seed`` draws from ``SeedSequence(seed, spawn_key=(i,))``, so results do
not depend on how trials are split across worker processes.
"""
from __future__ import annotations

from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np

from . import schemes as sch
from .analysis import EditModel
from .dsscore import CodeSpec, connected_nodes, make_rs_systematic, make_single_parity
from .errors import DssError
from .intermediary import IntermediaryConfig
from .matlib import (
    default_vandermonde_nodes,
    make_blockdiag,
    make_cauchy,
    make_identity,
    make_vandermonde,
)

SCHEMES = ("T", "P", "V", "C", "H")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


@dataclass
class SystemState:
    storage: sch.StorageState
    scheme: str
    rng_seed: int
    round: int = 0

    @property
    def spec(self) -> CodeSpec:
        return self.storage.spec

    @property
    def config(self) -> IntermediaryConfig:
        return self.storage.config

    @property
    def blocks(self):
        return self.storage.blocks

    @property
    def tensor(self):
        return self.storage.tensor

    @property
    def ledger(self):
        return self.storage.ledger


@lru_cache(maxsize=64)
def make_code(n: int, k: int, q: int) -> CodeSpec:
    if n == k + 1:
        return make_single_parity(k, q)
    return make_rs_systematic(n, k, q)


def ell_star_for(ell: int, gamma: float) -> int:
    """Tail length (1 - gamma) * ell, rounded to the nearest integer."""
    if not 0 <= gamma <= 1:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    return ell - int(round(gamma * ell))


@lru_cache(maxsize=64)
def _config(scheme: str, n: int, k: int, ell: int, q: int, ell_star: int | None) -> IntermediaryConfig:
    spec = make_code(n, k, q)
    f = spec.field
    B = spec.B
    if scheme in ("T", "P"):
        mats = [make_identity(f, ell)] * B
    elif scheme == "V":
        mats = [make_vandermonde(f, default_vandermonde_nodes(f, ell), ell)] * B
    elif scheme == "C":
        c = make_cauchy(f, list(range(ell)), list(range(ell, 2 * ell)))
        mats = [make_identity(f, ell)] + [c] * (B - 1)
    elif scheme == "H":
        head = ell - ell_star
        top = make_vandermonde(f, default_vandermonde_nodes(f, head), head)
        mats = [make_blockdiag(top, make_identity(f, ell_star))] * B
    else:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")
    return IntermediaryConfig(tuple(mats))


def build_system(scheme: str, n: int, k: int, B: int | None, ell: int, q: int, *,
                 blocks=None, seed: int = 0, ell_star: int | None = None,
                 gamma: float | None = None, pad: int = 0) -> SystemState:
    """Fresh system running ``scheme`` on an [n, k] MDS code.

    Random blocks come from ``seed`` unless ``blocks`` is given.  ``pad``
    zero slots at the end of each block leave room for Scheme P insertions.
    """
    scheme = scheme.upper()
    spec = make_code(n, k, q)
    if B is not None and B != spec.B:
        raise ValueError(f"an [n, k] MDS code carries B = k = {k} blocks, got B={B}")
    if scheme == "H":
        if ell_star is None:
            ell_star = ell_star_for(ell, 0.5 if gamma is None else gamma)
        if not 0 <= ell_star <= ell:
            raise ValueError(f"ell_star must lie in [0, {ell}], got {ell_star}")
    else:
        ell_star = None
    config = _config(scheme, n, k, ell, q, ell_star)
    lengths = None
    if blocks is None:
        rng = np.random.default_rng(seed)
        blocks = spec.field.random(rng, (spec.B, ell))
        if pad:
            blocks[:, ell - pad:] = 0
            lengths = [ell - pad] * spec.B
    storage = sch.StorageState.create(spec, config, blocks, lengths=lengths, ell_star=ell_star)
    return SystemState(storage, scheme, seed)


def sample_positions(model: EditModel, rng: np.random.Generator) -> dict[int, list[int]]:
    """Deleted 0-based positions per user; users without deletions are omitted."""
    ell, B = model.ell, model.B
    out: dict[int, list[int]] = {}
    if model.variant == "UD":
        pos = rng.integers(0, ell, size=B)
        return {s: [int(p)] for s, p in enumerate(pos)}
    if model.variant == "CND":
        flat = np.sort(rng.choice(B * ell, size=model.D, replace=False))
        for c in flat:
            out.setdefault(int(c) // ell, []).append(int(c) % ell)
        return out
    hit = rng.random((B, ell)) < model.p
    for s in range(B):
        ps = np.flatnonzero(hit[s])
        if ps.size:
            out[s] = [int(p) for p in ps]
    return out


def sample_edits(model: EditModel, rng: np.random.Generator, blocks) -> list[sch.EditEvent]:
    """Deletions drawn from ``model`` with the deleted values read from ``blocks``."""
    edits = []
    for s, ps in sorted(sample_positions(model, rng).items()):
        for p in ps:
            edits.append(sch.deletion(s, p, int(blocks[s][p])))
    return edits


@dataclass
class TrialResult:
    scheme: str
    bits_by_kind: dict[str, int]
    pair_bits: dict[tuple[int, int], int]
    mean_pair_bits: float
    span: int | None
    consistent: bool
    failures: list[str] = field(default_factory=list)


def _is_uniform(edits, B) -> bool:
    users = [e.user for e in edits]
    return sorted(users) == list(range(B))


def _descending(edits):
    return sorted(edits, key=lambda e: (e.user, -e.position))


def run_round(system: SystemState, edits, check: bool = True,
              rng: np.random.Generator | None = None, multi: bool | None = None) -> TrialResult:
    """Apply one round of edits with the system's scheme, then verify the state.

    Positions refer to the blocks as they were before the round.  For Scheme
    T, ``multi`` forces the multi-deletion protocol (resend from i_min to the
    end); by default it is used unless every block has exactly one deletion.
    """
    st = system.storage
    scheme = system.scheme
    B = st.spec.B
    messages = []
    span = None
    if scheme == "T":
        if multi is None:
            multi = not _is_uniform(edits, B)
        if not multi:
            rep = sch.scheme_t_round(st, edits)
        else:
            rep = sch.scheme_t_round_multi(st, edits)
        messages, span = rep.messages, rep.info["span"]
    elif scheme == "V":
        rep = sch.scheme_v_round(st, edits) if _is_uniform(edits, B) else sch.scheme_v_round_nonuniform(st, edits)
        messages = rep.messages
    elif scheme == "C":
        messages = sch.scheme_c_round(st, edits).messages
    elif scheme in ("P", "H"):
        step = sch.scheme_p_apply_edit if scheme == "P" else sch.scheme_h_apply_edit
        ordered = edits if scheme == "P" and any(e.kind == sch.EditKind.INSERTION for e in edits) \
            else _descending(edits)
        for e in ordered:
            messages.extend(step(st, e).messages)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    system.round += 1

    by_kind: dict[str, int] = defaultdict(int)
    for m in messages:
        by_kind[m.kind.value] += m.bits
    pairs = sch.pair_bits(messages)
    n_pairs = sum(len(connected_nodes(st.spec, s)) for s in range(B))
    failures = sch.consistency_failures(st, rng=rng) if check else []
    return TrialResult(scheme, dict(by_kind), pairs, sum(pairs.values()) / n_pairs, span,
                       not failures, failures)


@dataclass(frozen=True)
class SchemeConfig:
    scheme: str
    n: int
    k: int
    ell: int
    q: int
    gamma: float | None = None
    ell_star: int | None = None


@dataclass
class MonteCarloSummary:
    scheme: str
    model: str
    trials: int
    mean_bits: float
    stderr_bits: float
    mean_span_fraction: float | None
    stderr_span_fraction: float | None
    errors: int
    inconsistent: int


def _mean_stderr(xs) -> tuple[float, float]:
    a = np.asarray(xs, dtype=float)
    if a.size == 0:
        return math.nan, math.nan
    if a.size == 1:
        return float(a[0]), 0.0
    return float(a.mean()), float(a.std(ddof=1) / math.sqrt(a.size))


def _run_trials(cfg: SchemeConfig, model: EditModel, seed: int, start: int, stop: int,
                check_every: int):
    out = []
    spec = make_code(cfg.n, cfg.k, cfg.q)
    for i in range(start, stop):
        rng = trial_rng(seed, i)
        blocks = spec.field.random(rng, (spec.B, cfg.ell))
        try:
            system = build_system(cfg.scheme, cfg.n, cfg.k, None, cfg.ell, cfg.q, blocks=blocks,
                                  ell_star=cfg.ell_star, gamma=cfg.gamma)
            edits = sample_edits(model, rng, blocks)
            check = check_every > 0 and i % check_every == 0
            r = run_round(system, edits, check=check, rng=rng, multi=model.variant != "UD")
        except DssError:
            out.append(None)
            continue
        out.append((r.mean_pair_bits, r.span, r.consistent))
    return out


def monte_carlo(cfg: SchemeConfig, model: EditModel, trials: int, seed: int = 0,
                check_every: int = 1, workers: int = 1) -> MonteCarloSummary:
    """Run independent single-round trials; results depend only on (cfg, model, trials, seed).

    Consistency is verified on every ``check_every``-th trial (0 disables it).
    """
    if model.ell != cfg.ell or model.B != make_code(cfg.n, cfg.k, cfg.q).B:
        raise ValueError("edit model and scheme configuration disagree on ell or B")
    if workers > 1 and trials > workers:
        bounds = np.linspace(0, trials, workers + 1).astype(int)
        with ProcessPoolExecutor(workers) as ex:
            parts = ex.map(_run_trials, *zip(*[(cfg, model, seed, int(a), int(b), check_every)
                                               for a, b in zip(bounds[:-1], bounds[1:])]))
            results = [r for part in parts for r in part]
    else:
        results = _run_trials(cfg, model, seed, 0, trials, check_every)
    ok = [r for r in results if r is not None]
    mean, se = _mean_stderr([r[0] for r in ok])
    spans = [r[1] / cfg.ell for r in ok if r[1] is not None]
    smean, sse = _mean_stderr(spans) if spans else (None, None)
    return MonteCarloSummary(cfg.scheme, model.variant, trials, mean, se, smean, sse,
                             errors=len(results) - len(ok),
                             inconsistent=sum(1 for r in ok if not r[2]))


def monte_carlo_imin(model: EditModel, trials: int, seed: int = 0) -> tuple[float, float]:
    """Mean and standard error of min(i_min, ell) with 1-based positions."""
    vals = []
    for i in range(trials):
        pos = sample_positions(model, trial_rng(seed, i))
        first = min((p for ps in pos.values() for p in ps), default=model.ell - 1)
        vals.append(min(first + 1, model.ell))
    return _mean_stderr(vals)
