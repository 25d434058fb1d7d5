"""Bayesian posterior inference for the hierarchical graphical model.

The sampler augments the observations with the per-replicate anchors and link
values and cycles through five blocks in a fixed order: all link values, all
anchors, every edge intensity, the global concentration c0 and the global
location s0.  Links and anchors are conditionally independent across
replicates and are updated as vectors; anchors and the normal-family links
have exact conjugate draws, discrete links are drawn by (adaptive)
enumeration, the continuous gamma-type links and all top-level parameters use
random-walk Metropolis steps on transformed scales with step sizes adapted
toward a 0.44 acceptance rate during burn-in only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special

from .errors import (
    ChainError,
    DomainError,
    EnumerationOverflowError,
)
from .families import Family, FamilyKind, get_family
from .model import Dataset, ModelParams, log_joint_likelihood_arrays

__all__ = [
    "NormalS0Prior",
    "GammaS0Prior",
    "UniformOnC0S0Prior",
    "PriorConfig",
    "StepSizes",
    "MCMCConfig",
    "ChainState",
    "PosteriorSamples",
    "ParamSummary",
    "log_full_conditional_s0",
    "log_full_conditional_c0",
    "log_full_conditional_cjk",
    "sample_link_conditional",
    "sample_w_conditional",
    "gibbs_sweep",
    "run_chains",
    "initial_state",
    "log_posterior",
    "split_chain_psrf",
    "summarize",
    "predictive_mse",
    "link_conditional_pmf",
    "link_conditional_normal_coeffs",
]

_NEG_INF = float("-inf")


def _gamma_logpdf(x: float, a: float, b: float) -> float:
    """Log density of a gamma with shape a and rate b."""
    if x <= 0.0 or not math.isfinite(x):
        return _NEG_INF
    return a * math.log(b) - special.gammaln(a) + (a - 1.0) * math.log(x) - b * x


def _poisson_logpmf(k: float, lam: float) -> float:
    if k < 0 or k != round(k):
        return _NEG_INF
    return k * math.log(lam) - special.gammaln(k + 1.0) - lam


# ---------------------------------------------------------------------------
# Priors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalS0Prior:
    """Normal prior on s0 with mean mu and precision tau."""

    mu: float = 0.0
    tau: float = 0.01

    def logpdf(self, s0: float, c0: float) -> float:
        d = s0 - self.mu
        return 0.5 * (math.log(self.tau) - math.log(2.0 * math.pi)) - 0.5 * self.tau * d * d


@dataclass(frozen=True)
class GammaS0Prior:
    """Gamma prior on a positive s0 with shape a and rate b."""

    a: float = 0.01
    b: float = 0.01

    def logpdf(self, s0: float, c0: float) -> float:
        return _gamma_logpdf(s0, self.a, self.b)


@dataclass(frozen=True)
class UniformOnC0S0Prior:
    """Uniform prior for s0 on (0, c0); density 1/c0 inside the interval."""

    def logpdf(self, s0: float, c0: float) -> float:
        if 0.0 < s0 < c0:
            return -math.log(c0)
        return _NEG_INF


_S0_PRIOR_FORMS = {
    FamilyKind.NORMAL: NormalS0Prior,
    FamilyKind.GSST: NormalS0Prior,
    FamilyKind.GAMMA: GammaS0Prior,
    FamilyKind.INVERSE_GAMMA: GammaS0Prior,
    FamilyKind.INVERSE_BETA: GammaS0Prior,
    FamilyKind.BETA: UniformOnC0S0Prior,
}


@dataclass(frozen=True)
class PriorConfig:
    """Hyper-prior constants.

    Continuous edge intensities get a Ga(a0, b0) prior; integer intensities
    (binomial and negative-binomial link families) get a Po(d0) prior
    restricted to positive values.  c0 is Ga(ac, bc) in every family and the
    s0 prior takes the family-matched form.
    """

    a0: float = 1.0
    b0: float = 1.0
    d0: float = 1.0
    ac: float = 0.01
    bc: float = 0.01
    s0_prior: NormalS0Prior | GammaS0Prior | UniformOnC0S0Prior = field(
        default_factory=GammaS0Prior
    )

    def __post_init__(self):
        for name in ("a0", "b0", "d0", "ac", "bc"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"prior constant {name} must be strictly positive")
        sp = self.s0_prior
        if isinstance(sp, NormalS0Prior) and not sp.tau > 0.0:
            raise DomainError("s0 prior precision tau must be strictly positive")
        if isinstance(sp, GammaS0Prior) and not (sp.a > 0.0 and sp.b > 0.0):
            raise DomainError("s0 prior shape and rate must be strictly positive")

    @classmethod
    def default_for(cls, family, **kwargs) -> "PriorConfig":
        kind = get_family(family).kind
        form = _S0_PRIOR_FORMS[kind]
        return cls(s0_prior=form(), **kwargs)

    def validate_for(self, family) -> None:
        kind = get_family(family).kind
        expected = _S0_PRIOR_FORMS[kind]
        if not isinstance(self.s0_prior, expected):
            raise DomainError(
                f"s0 prior form {type(self.s0_prior).__name__} does not match the "
                f"{kind.value} family (expected {expected.__name__})"
            )

    def log_edge_prior(self, fam: Family, c: float) -> float:
        if fam.integer_intensity:
            if c < 1:
                return _NEG_INF  # intensities are kept strictly positive
            return _poisson_logpmf(c, self.d0)
        return _gamma_logpdf(c, self.a0, self.b0)

    def log_c0_prior(self, c0: float) -> float:
        return _gamma_logpdf(c0, self.ac, self.bc)

    def log_prior(self, fam: Family, s0: float, c0: float, edges: np.ndarray) -> float:
        total = self.log_c0_prior(c0) + self.s0_prior.logpdf(s0, c0)
        p = edges.shape[0]
        for j in range(p):
            for k in range(j + 1, p):
                total += self.log_edge_prior(fam, float(edges[j, k]))
        return total


# ---------------------------------------------------------------------------
# Chain configuration and state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepSizes:
    """Initial random-walk scales per block (adapted during burn-in)."""

    s0: float = 0.5
    c0: float = 0.5
    edge: float = 0.5
    link: float = 0.8


@dataclass(frozen=True)
class MCMCConfig:
    iterations: int = 105_000
    burn_in: int = 15_000
    thinning: int = 40
    chains: int = 2
    seed: int = 0
    step_sizes: StepSizes = field(default_factory=StepSizes)
    enum_tail_tol: float = 1e-12
    adapt_window: int = 50
    max_enum_states: int = 1_000_000
    keep_latents: bool = True
    edge_moves: int = 3

    def __post_init__(self):
        if not self.burn_in < self.iterations:
            raise DomainError("burn_in must be smaller than iterations")
        if self.thinning < 1:
            raise DomainError("thinning must be >= 1")
        if self.chains < 1:
            raise DomainError("at least one chain is required")
        if self.adapt_window < 1:
            raise DomainError("adapt_window must be >= 1")
        if self.edge_moves < 1:
            raise DomainError("edge_moves must be >= 1")
        for name in ("s0", "c0", "edge", "link"):
            if not getattr(self.step_sizes, name) > 0.0:
                raise DomainError(f"step size {name} must be strictly positive")

    @property
    def retained_per_chain(self) -> int:
        return (self.iterations - self.burn_in) // self.thinning


@dataclass
class ChainState:
    """Current parameters and latents of one chain.

    ``accept`` maps block names to cumulative [accepted, attempted] counts;
    ``step_sizes`` holds the current per-block random-walk scales.
    """

    family: FamilyKind
    s0: float
    c0: float
    edges: np.ndarray
    w: np.ndarray
    links: np.ndarray
    log_posterior: float = _NEG_INF
    accept: dict = field(default_factory=dict)
    step_sizes: dict = field(default_factory=dict)

    @property
    def params(self) -> ModelParams:
        return ModelParams(
            family=self.family, s0=self.s0, c0=self.c0, edge_intensity=self.edges.copy()
        )

    def counter(self, name: str) -> list:
        return self.accept.setdefault(name, [0, 0])


def _pairs(p: int) -> list[tuple[int, int]]:
    return [(j, k) for j in range(p) for k in range(j + 1, p)]


def _edge_label(j: int, k: int) -> str:
    return f"c_{j + 1}_{k + 1}"


# ---------------------------------------------------------------------------
# Data summaries shared by the conditionals
# ---------------------------------------------------------------------------

class _Precomp:
    """Per-dataset quantities reused across sweeps."""

    def __init__(self, fam: Family, data: Dataset):
        self.fam = fam
        self.y = data.y
        self.n, self.p = data.y.shape
        self.theta_y = np.asarray(fam.theta(data.y), dtype=float)
        self.m_y = np.asarray(fam.cumulant(data.y), dtype=float)
        self.theta_y_total = float(self.theta_y.sum())
        self.m_y_total = float(self.m_y.sum())
        self.m_y_node = self.m_y.sum(axis=0)
        self.pairs = _pairs(self.p)


# ---------------------------------------------------------------------------
# Full conditionals for the top-level parameters
# ---------------------------------------------------------------------------

def _cond_s0_core(fam, prior, cand, c0, c_star, link_rowsum, n, theta_total) -> float:
    if not fam.hyper_ok(cand, c0):
        return _NEG_INF
    lp = prior.s0_prior.logpdf(cand, c0)
    if lp == _NEG_INF:
        return _NEG_INF
    s_star = cand + link_rowsum
    h_sum = float(np.sum(fam.log_h(s_star, c_star[None, :])))
    return h_sum + n * float(fam.log_h(cand, c0)) + cand * theta_total + lp


def _cond_c0_core(fam, prior, cand, s0, s_star, edge_rowsum, n, m_total) -> float:
    if cand <= 0.0 or not fam.hyper_ok(s0, cand):
        return _NEG_INF
    lp = prior.log_c0_prior(cand) + prior.s0_prior.logpdf(s0, cand)
    c_star = cand + edge_rowsum
    h_sum = float(np.sum(fam.log_h(s_star, c_star[None, :])))
    return h_sum + n * float(fam.log_h(s0, cand)) - cand * m_total + lp


def _cond_edge_core(
    fam, prior, cand, cur, j, k, s_star, c_star, links_jk, m_y_node, m_w_total
) -> float:
    lp = prior.log_edge_prior(fam, cand)
    if not np.isfinite(lp):
        return _NEG_INF
    if fam.kind is FamilyKind.BETA and np.any(links_jk > cand):
        return _NEG_INF
    cj = c_star[j] - cur + cand
    ck = c_star[k] - cur + cand
    h_sum = float(np.sum(fam.log_h(s_star[:, j], cj))) + float(
        np.sum(fam.log_h(s_star[:, k], ck))
    )
    b_sum = float(np.sum(fam.log_b(links_jk, cand)))
    return h_sum + b_sum - cand * (m_y_node[j] + m_y_node[k] + m_w_total) + lp


def _state_sums(state: ChainState):
    link_rowsum = state.links.sum(axis=2)
    edge_rowsum = state.edges.sum(axis=1)
    return link_rowsum, edge_rowsum


def log_full_conditional_s0(state: ChainState, data: Dataset, prior: PriorConfig,
                            s0_candidate: float) -> float:
    """Log full conditional of s0 (up to an additive constant); -inf outside
    the admissible region."""
    fam = get_family(state.family)
    pre = _Precomp(fam, data)
    link_rowsum, edge_rowsum = _state_sums(state)
    c_star = state.c0 + edge_rowsum
    theta_total = pre.theta_y_total + float(np.sum(fam.theta(state.w)))
    return _cond_s0_core(
        fam, prior, float(s0_candidate), state.c0, c_star, link_rowsum, pre.n, theta_total
    )


def log_full_conditional_c0(state: ChainState, data: Dataset, prior: PriorConfig,
                            c0_candidate: float) -> float:
    """Log full conditional of c0; -inf for nonpositive candidates (and for
    candidates not exceeding s0 in the beta family)."""
    fam = get_family(state.family)
    pre = _Precomp(fam, data)
    link_rowsum, edge_rowsum = _state_sums(state)
    s_star = state.s0 + link_rowsum
    m_total = pre.m_y_total + float(np.sum(fam.cumulant(state.w)))
    return _cond_c0_core(
        fam, prior, float(c0_candidate), state.s0, s_star, edge_rowsum, pre.n, m_total
    )


def log_full_conditional_cjk(state: ChainState, data: Dataset, prior: PriorConfig,
                             j: int, k: int, c_candidate: float) -> float:
    """Log full conditional of the edge intensity between nodes j and k."""
    if j == k:
        raise IndexError("edge conditional requires two distinct nodes")
    if j > k:
        j, k = k, j
    fam = get_family(state.family)
    pre = _Precomp(fam, data)
    link_rowsum, edge_rowsum = _state_sums(state)
    s_star = state.s0 + link_rowsum
    c_star = state.c0 + edge_rowsum
    m_w_total = float(np.sum(fam.cumulant(state.w)))
    return _cond_edge_core(
        fam,
        prior,
        float(c_candidate),
        float(state.edges[j, k]),
        j,
        k,
        s_star,
        c_star,
        state.links[:, j, k],
        pre.m_y_node,
        m_w_total,
    )


# ---------------------------------------------------------------------------
# Link-value conditionals (block IV)
# ---------------------------------------------------------------------------

def _normal_link_moments(c_jk, cj, ck, excl_j, excl_k, t_sum):
    """Completed-square mean and standard deviation of a normal link value.

    ``excl_j``/``excl_k`` are the node sums s* with the current link value
    removed; ``t_sum`` is theta(y_j) + theta(y_k) + theta(w).
    """
    prec = 1.0 / cj + 1.0 / ck + 1.0 / c_jk
    mean = (t_sum - excl_j / cj - excl_k / ck) / prec
    return mean, 1.0 / np.sqrt(prec)


def _enum_link_logmass(fam, values, a_j, a_k, cj, ck, c_jk, t_sum):
    """Unnormalized log mass of integer link values on a grid.

    ``values`` has shape (m,), the replicate-dependent inputs shape (r,);
    the result has shape (r, m).
    """
    s = values[None, :]
    g = (
        fam.log_h(a_j[:, None] + s, cj)
        + fam.log_h(a_k[:, None] + s, ck)
        + fam.log_b(values, c_jk)[None, :]
        + t_sum[:, None] * s
    )
    return g


def _enum_link_grid(fam, a_j, a_k, cj, ck, c_jk, t_sum, tail_tol, cap):
    """Adaptive grid of an unbounded discrete link conditional.

    Grows the grid until, for every replicate, the terms decay past the mode
    and the geometric tail bound drops below ``tail_tol`` relative to the
    largest term.
    """
    m = 64
    while True:
        values = np.arange(0.0, m + 1.0)
        g = _enum_link_logmass(fam, values, a_j, a_k, cj, ck, c_jk, t_sum)
        g_max = g.max(axis=1)
        last = g[:, -1]
        prev = g[:, -2]
        decreasing = last < prev
        ratio = np.exp(np.minimum(last - prev, -1e-12))
        bound = np.exp(last - g_max) * ratio / (1.0 - ratio)
        if np.all(decreasing) and np.all(bound < tail_tol):
            return values, g
        m *= 2
        if m > cap:
            raise EnumerationOverflowError(
                f"link enumeration exceeded {cap} states before reaching the tail"
            )


def _rows_softmax_sample(g, rng):
    gm = g.max(axis=1, keepdims=True)
    p = np.exp(g - gm)
    p /= p.sum(axis=1, keepdims=True)
    cum = np.cumsum(p, axis=1)
    u = rng.random(g.shape[0])
    idx = (u[:, None] > cum).sum(axis=1)
    return np.minimum(idx, g.shape[1] - 1)


class _SweepKernel:
    """One-dataset sampler machinery shared by all chains."""

    def __init__(self, fam: Family, data: Dataset, prior: PriorConfig, config: MCMCConfig):
        if fam.kind is FamilyKind.GSST:
            raise DomainError("posterior inference is not available for the gsst family")
        prior.validate_for(fam)
        self.fam = fam
        self.prior = prior
        self.config = config
        self.pre = _Precomp(fam, data)
        self.n = self.pre.n
        self.p = self.pre.p
        self.pairs = self.pre.pairs

    # -- block IV: one pair of link values across all replicates -----------
    def _update_links_pair(self, state: ChainState, j, k, rng, s_star, idx=None):
        fam = self.fam
        c_jk = float(state.edges[j, k])
        if c_jk == 0.0:
            return
        sel = slice(None) if idx is None else idx
        orig = np.array(state.links[sel, j, k], dtype=float)  # snapshot, not a view
        cur = orig
        cj = state.c0 + state.edges[:, j].sum()
        ck = state.c0 + state.edges[:, k].sum()
        t_sum = (
            self.pre.theta_y[sel, j]
            + self.pre.theta_y[sel, k]
            + np.asarray(fam.theta(state.w[sel]), dtype=float)
        )
        a_j = s_star[sel, j] - cur
        a_k = s_star[sel, k] - cur

        if fam.kind is FamilyKind.NORMAL:
            mean, sd = _normal_link_moments(c_jk, cj, ck, a_j, a_k, t_sum)
            new = rng.normal(mean, sd)
        elif fam.kind in (FamilyKind.GAMMA, FamilyKind.INVERSE_BETA):
            values, g = _enum_link_grid(
                fam, a_j, a_k, cj, ck, c_jk, t_sum,
                self.config.enum_tail_tol, self.config.max_enum_states,
            )
            new = values[_rows_softmax_sample(g, rng)]
        elif fam.kind is FamilyKind.BETA:
            count = int(round(c_jk))
            if count > self.config.max_enum_states:
                raise EnumerationOverflowError(
                    f"binomial link enumeration over {count + 1} states exceeds the cap"
                )
            values = np.arange(0.0, count + 1.0)
            g = _enum_link_logmass(fam, values, a_j, a_k, cj, ck, c_jk, t_sum)
            new = values[_rows_softmax_sample(g, rng)]
        elif fam.kind is FamilyKind.INVERSE_GAMMA:
            # log h(s, c) = (c + 1) log s - const, log b(t, c) = (c - 1) log t - const
            t_y = t_sum - np.asarray(fam.theta(state.w[sel]), dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                # independence refresh: propose from the conditional link prior
                # Ga(c_jk, scale w); the proposal cancels everything except the
                # two level-normalizer factors and the observation tilt
                prop = rng.gamma(shape=c_jk, scale=state.w[sel])
                delta = (
                    (cj + 1.0) * (np.log(a_j + prop) - np.log(a_j + cur))
                    + (ck + 1.0) * (np.log(a_k + prop) - np.log(a_k + cur))
                    + (prop - cur) * t_y
                )
                accept = (np.log(rng.random(cur.shape[0])) < delta) & (prop > 0.0)
                cur = np.where(accept, prop, cur)
                # local log-scale random walk
                step = state.step_sizes[f"link_{j + 1}_{k + 1}"]
                eps = rng.normal(0.0, step, size=cur.shape)
                prop = cur * np.exp(eps)
                delta = (
                    (cj + 1.0) * (np.log(a_j + prop) - np.log(a_j + cur))
                    + (ck + 1.0) * (np.log(a_k + prop) - np.log(a_k + cur))
                    + (c_jk - 1.0) * (np.log(prop) - np.log(cur))
                    + (prop - cur) * t_sum
                    + (np.log(prop) - np.log(cur))  # log-scale proposal Jacobian
                )
                accept = (np.log(rng.random(cur.shape[0])) < delta) & (prop > 0.0)
            new = np.where(accept, prop, cur)
            counter = state.counter(f"link_{j + 1}_{k + 1}")
            counter[0] += int(accept.sum())
            counter[1] += int(accept.size)
        else:  # pragma: no cover - guarded in __init__
            raise DomainError(f"no link conditional for family {fam.kind.value}")

        delta_s = new - orig
        state.links[sel, j, k] = new
        state.links[sel, k, j] = new
        s_star[sel, j] += delta_s
        s_star[sel, k] += delta_s

    # -- block V: anchors ----------------------------------------------------
    def _update_anchors(self, state: ChainState, rng, s_star):
        tri = np.triu_indices(self.p, k=1)
        s_i = state.s0 + state.links[:, tri[0], tri[1]].sum(axis=1)
        c_i = state.c0 + float(state.edges[tri].sum())
        state.w = np.asarray(self.fam.sample_w(s_i, c_i, rng), dtype=float)

    # -- block III: edge intensities ------------------------------------------
    def _update_edge(self, state: ChainState, j, k, rng, s_star, c_star, m_w_total):
        fam = self.fam
        cur = float(state.edges[j, k])
        name = f"edge_{j + 1}_{k + 1}"
        counter = state.counter(name)
        links_jk = state.links[:, j, k]
        args = (s_star, c_star, links_jk, self.pre.m_y_node, m_w_total)

        if fam.integer_intensity:
            prop = cur + (1.0 if rng.random() < 0.5 else -1.0)
            counter[1] += 1
            lo = _cond_edge_core(fam, self.prior, prop, cur, j, k, *args)
            if lo == _NEG_INF:
                return
            lc = _cond_edge_core(fam, self.prior, cur, cur, j, k, *args)
            if math.log(rng.random()) < lo - lc:
                counter[0] += 1
                state.edges[j, k] = state.edges[k, j] = prop
                c_star[j] += prop - cur
                c_star[k] += prop - cur
        else:
            step = state.step_sizes[name]
            prop = cur * math.exp(rng.normal(0.0, step))
            counter[1] += 1
            lo = _cond_edge_core(fam, self.prior, prop, cur, j, k, *args)
            if lo == _NEG_INF:
                return
            lc = _cond_edge_core(fam, self.prior, cur, cur, j, k, *args)
            if math.log(rng.random()) < lo - lc + math.log(prop) - math.log(cur):
                counter[0] += 1
                state.edges[j, k] = state.edges[k, j] = prop
                c_star[j] += prop - cur
                c_star[k] += prop - cur

    # -- block refresh of one edge intensity and its link values ----------------
    def _update_edge_refresh(self, state: ChainState, j, k, rng, s_star, c_star):
        # Propose a new intensity together with a full redraw of the pair's
        # links from their conditional prior given the anchors; the link
        # density factors cancel, so acceptance rests on the node-level
        # terms alone.  This decouples the intensity from the tight
        # information its current links carry about it.
        fam = self.fam
        cur_c = float(state.edges[j, k])
        name = f"refresh_{j + 1}_{k + 1}"
        counter = state.counter(name)
        if fam.integer_intensity:
            new_c = cur_c + (1.0 if rng.random() < 0.5 else -1.0)
            jac = 0.0
        else:
            step = state.step_sizes[name]
            new_c = cur_c * math.exp(rng.normal(0.0, step))
            jac = math.log(new_c) - math.log(cur_c)
        counter[1] += 1
        lp_new = self.prior.log_edge_prior(fam, new_c)
        if not np.isfinite(lp_new) or new_c <= 0.0:
            return
        cur_s = np.array(state.links[:, j, k], dtype=float)
        new_s = np.asarray(fam.sample_link(state.w, new_c, rng), dtype=float)
        if fam.kind is FamilyKind.INVERSE_GAMMA and not np.all(new_s > 0.0):
            return  # gamma draws can underflow at tiny intensities
        a_j = s_star[:, j] - cur_s
        a_k = s_star[:, k] - cur_s
        cj_base = c_star[j] - cur_c
        ck_base = c_star[k] - cur_c
        y = self.pre.y
        with np.errstate(divide="ignore", invalid="ignore"):
            delta = (
                float(np.sum(fam.log_w_density(y[:, j], a_j + new_s, cj_base + new_c)))
                - float(np.sum(fam.log_w_density(y[:, j], a_j + cur_s, cj_base + cur_c)))
                + float(np.sum(fam.log_w_density(y[:, k], a_k + new_s, ck_base + new_c)))
                - float(np.sum(fam.log_w_density(y[:, k], a_k + cur_s, ck_base + cur_c)))
                + lp_new
                - self.prior.log_edge_prior(fam, cur_c)
                + jac
            )
        if math.isfinite(delta) and math.log(rng.random()) < delta:
            counter[0] += 1
            state.edges[j, k] = state.edges[k, j] = new_c
            state.links[:, j, k] = new_s
            state.links[:, k, j] = new_s
            s_star[:, j] = a_j + new_s
            s_star[:, k] = a_k + new_s
            c_star[j] = cj_base + new_c
            c_star[k] = ck_base + new_c

    # -- joint rescale of one edge intensity and its link values ---------------
    def _update_edge_scale(self, state: ChainState, j, k, rng, s_star, c_star):
        # Deterministic scaling move (c, S_1..S_n) -> e^eps * (c, S_1..S_n);
        # breaks the ridge between an intensity and its links.  Only applies
        # to continuous-link families.
        fam = self.fam
        cur_c = float(state.edges[j, k])
        name = f"scale_{j + 1}_{k + 1}"
        counter = state.counter(name)
        step = state.step_sizes[name]
        eps = rng.normal(0.0, step)
        factor = math.exp(eps)
        cur_s = state.links[:, j, k]
        new_c = cur_c * factor
        new_s = cur_s * factor

        lp_new = self.prior.log_edge_prior(fam, new_c)
        counter[1] += 1
        if not np.isfinite(lp_new) or new_c <= 0.0:
            return
        a_j = s_star[:, j] - cur_s
        a_k = s_star[:, k] - cur_s
        cj_base = c_star[j] - cur_c
        ck_base = c_star[k] - cur_c
        y = self.pre.y
        w = state.w
        delta = (
            float(np.sum(fam.log_link_density(new_s, w, new_c)))
            - float(np.sum(fam.log_link_density(cur_s, w, cur_c)))
            + float(np.sum(fam.log_w_density(y[:, j], a_j + new_s, cj_base + new_c)))
            - float(np.sum(fam.log_w_density(y[:, j], a_j + cur_s, cj_base + cur_c)))
            + float(np.sum(fam.log_w_density(y[:, k], a_k + new_s, ck_base + new_c)))
            - float(np.sum(fam.log_w_density(y[:, k], a_k + cur_s, ck_base + cur_c)))
            + lp_new
            - self.prior.log_edge_prior(fam, cur_c)
            + (self.n + 1.0) * eps
        )
        if math.log(rng.random()) < delta:
            counter[0] += 1
            state.edges[j, k] = state.edges[k, j] = new_c
            state.links[:, j, k] = new_s
            state.links[:, k, j] = new_s
            s_star[:, j] = a_j + new_s
            s_star[:, k] = a_k + new_s
            c_star[j] = cj_base + new_c
            c_star[k] = ck_base + new_c

    # -- block II: c0 ----------------------------------------------------------
    def _update_c0(self, state: ChainState, rng, s_star, edge_rowsum, m_w_total):
        counter = state.counter("c0")
        step = state.step_sizes["c0"]
        cur = state.c0
        prop = cur * math.exp(rng.normal(0.0, step))
        counter[1] += 1
        m_total = self.pre.m_y_total + m_w_total
        lo = _cond_c0_core(self.fam, self.prior, prop, state.s0, s_star, edge_rowsum,
                           self.n, m_total)
        if lo == _NEG_INF:
            return
        lc = _cond_c0_core(self.fam, self.prior, cur, state.s0, s_star, edge_rowsum,
                           self.n, m_total)
        if math.log(rng.random()) < lo - lc + math.log(prop) - math.log(cur):
            counter[0] += 1
            state.c0 = prop

    # -- block I: s0 -------------------------------------------------------------
    def _update_s0(self, state: ChainState, rng, link_rowsum, c_star, theta_w_total):
        fam = self.fam
        counter = state.counter("s0")
        step = state.step_sizes["s0"]
        cur = state.s0
        theta_total = self.pre.theta_y_total + theta_w_total
        counter[1] += 1

        if isinstance(self.prior.s0_prior, NormalS0Prior):
            prop = cur + rng.normal(0.0, step)
            jac = 0.0
        elif isinstance(self.prior.s0_prior, UniformOnC0S0Prior):
            # random walk on logit(s0/c0); the transform keeps 0 < s0 < c0
            u = math.log(cur) - math.log(state.c0 - cur)
            u_new = u + rng.normal(0.0, step)
            prop = state.c0 / (1.0 + math.exp(-u_new))
            jac = (math.log(prop) + math.log(state.c0 - prop)
                   - math.log(cur) - math.log(state.c0 - cur))
        else:
            prop = cur * math.exp(rng.normal(0.0, step))
            jac = math.log(prop) - math.log(cur)

        args = (state.c0, c_star, link_rowsum, self.n, theta_total)
        lo = _cond_s0_core(fam, self.prior, prop, *args)
        if lo == _NEG_INF:
            return
        lc = _cond_s0_core(fam, self.prior, cur, *args)
        if math.log(rng.random()) < lo - lc + jac:
            counter[0] += 1
            state.s0 = prop

    # -- full systematic scan ------------------------------------------------------
    def sweep(self, state: ChainState, rng):
        fam = self.fam
        s_star = state.s0 + state.links.sum(axis=2)
        for j, k in self.pairs:
            self._update_links_pair(state, j, k, rng, s_star)
        self._update_anchors(state, rng, s_star)

        m_w_total = float(np.sum(fam.cumulant(state.w)))
        edge_rowsum = state.edges.sum(axis=1)
        c_star = state.c0 + edge_rowsum
        scaling = not fam.discrete_links
        for j, k in self.pairs:
            for _ in range(self.config.edge_moves):
                self._update_edge(state, j, k, rng, s_star, c_star, m_w_total)
                if scaling:
                    self._update_edge_scale(state, j, k, rng, s_star, c_star)
                self._update_edge_refresh(state, j, k, rng, s_star, c_star)

        edge_rowsum = state.edges.sum(axis=1)
        self._update_c0(state, rng, s_star, edge_rowsum, m_w_total)

        c_star = state.c0 + edge_rowsum
        link_rowsum = s_star - state.s0
        theta_w_total = float(np.sum(fam.theta(state.w)))
        self._update_s0(state, rng, link_rowsum, c_star, theta_w_total)

        state.log_posterior = self.log_posterior(state)
        return state

    def log_posterior(self, state: ChainState) -> float:
        lik = log_joint_likelihood_arrays(
            self.fam, self.pre.y, state.w, state.links, state.s0, state.c0, state.edges
        )
        return lik + self.prior.log_prior(self.fam, state.s0, state.c0, state.edges)


# ---------------------------------------------------------------------------
# Public single-site operations
# ---------------------------------------------------------------------------

def _default_steps(config: MCMCConfig, p: int) -> dict:
    steps = {"s0": config.step_sizes.s0, "c0": config.step_sizes.c0}
    for j, k in _pairs(p):
        steps[f"edge_{j + 1}_{k + 1}"] = config.step_sizes.edge
        steps[f"link_{j + 1}_{k + 1}"] = config.step_sizes.link
        steps[f"scale_{j + 1}_{k + 1}"] = config.step_sizes.edge
        steps[f"refresh_{j + 1}_{k + 1}"] = config.step_sizes.edge
    return steps


def _ensure_steps(state: ChainState, config: MCMCConfig):
    if not state.step_sizes:
        state.step_sizes = _default_steps(config, state.edges.shape[0])


def sample_link_conditional(state: ChainState, data: Dataset, i: int, j: int, k: int,
                            rng, config: MCMCConfig | None = None) -> float:
    """Redraw the link value of replicate i on edge (j, k), mirroring it.

    Exact for normal (completed square) and binomial links, adaptive
    enumeration for Poisson/negative-binomial links, random-walk Metropolis
    on the log scale for gamma links.
    """
    config = config or MCMCConfig()
    kernel = _SweepKernel(get_family(state.family), data, PriorConfig.default_for(state.family), config)
    _ensure_steps(state, config)
    if float(state.edges[j, k]) <= 0.0:
        raise DomainError("link conditional requires a positive edge intensity")
    s_star = state.s0 + state.links.sum(axis=2)
    kernel._update_links_pair(state, min(j, k), max(j, k), rng, s_star, idx=np.array([i]))
    return float(state.links[i, j, k])


def sample_w_conditional(state: ChainState, data: Dataset, i: int, rng) -> float:
    """Exact conjugate draw of the anchor of replicate i given the rest."""
    fam = get_family(state.family)
    if fam.kind is FamilyKind.GSST:
        raise DomainError("posterior inference is not available for the gsst family")
    p = state.edges.shape[0]
    tri = np.triu_indices(p, k=1)
    s_i = state.s0 + float(state.links[i][tri].sum())
    c_i = state.c0 + float(state.edges[tri].sum())
    value = float(fam.sample_w(s_i, c_i, rng))
    state.w[i] = value
    return value


def link_conditional_pmf(state: ChainState, data: Dataset, i: int, j: int, k: int,
                         config: MCMCConfig | None = None):
    """Normalized enumeration mass of a discrete link conditional.

    Returns (values, probabilities); available for the Poisson, binomial and
    negative-binomial link families.
    """
    config = config or MCMCConfig()
    fam = get_family(state.family)
    if not fam.discrete_links:
        raise DomainError(f"{fam.kind.value}: link conditional is not discrete")
    if j > k:
        j, k = k, j
    c_jk = float(state.edges[j, k])
    s_star = state.s0 + state.links.sum(axis=2)
    cur = state.links[i, j, k]
    a_j = np.array([s_star[i, j] - cur])
    a_k = np.array([s_star[i, k] - cur])
    cj = state.c0 + state.edges[:, j].sum()
    ck = state.c0 + state.edges[:, k].sum()
    t_sum = np.array(
        [
            float(fam.theta(data.y[i, j]))
            + float(fam.theta(data.y[i, k]))
            + float(fam.theta(state.w[i]))
        ]
    )
    if fam.kind is FamilyKind.BETA:
        values = np.arange(0.0, int(round(c_jk)) + 1.0)
        g = _enum_link_logmass(fam, values, a_j, a_k, cj, ck, c_jk, t_sum)
    else:
        values, g = _enum_link_grid(
            fam, a_j, a_k, cj, ck, c_jk, t_sum, config.enum_tail_tol,
            config.max_enum_states,
        )
    g = g[0]
    g -= g.max()
    probs = np.exp(g)
    probs /= probs.sum()
    return values, probs


def link_conditional_normal_coeffs(state: ChainState, data: Dataset, i: int, j: int, k: int):
    """Completed-square (mean, sd) of a normal-family link conditional."""
    fam = get_family(state.family)
    if fam.kind is not FamilyKind.NORMAL:
        raise DomainError("completed-square coefficients exist for the normal family only")
    if j > k:
        j, k = k, j
    c_jk = float(state.edges[j, k])
    s_star = state.s0 + state.links.sum(axis=2)
    cur = state.links[i, j, k]
    cj = state.c0 + state.edges[:, j].sum()
    ck = state.c0 + state.edges[:, k].sum()
    t_sum = data.y[i, j] + data.y[i, k] + state.w[i]
    mean, sd = _normal_link_moments(
        c_jk, cj, ck, s_star[i, j] - cur, s_star[i, k] - cur, np.asarray(t_sum)
    )
    return float(mean), float(sd)


def gibbs_sweep(state: ChainState, data: Dataset, prior: PriorConfig,
                config: MCMCConfig, rng) -> ChainState:
    """One systematic scan over links, anchors, edges, c0 and s0 in place."""
    kernel = _SweepKernel(get_family(state.family), data, prior, config)
    _ensure_steps(state, config)
    return kernel.sweep(state, rng)


def log_posterior(state: ChainState, data: Dataset, prior: PriorConfig) -> float:
    """Log joint of data, latents and parameters under the priors."""
    fam = get_family(state.family)
    lik = log_joint_likelihood_arrays(
        fam, data.y, state.w, state.links, state.s0, state.c0, state.edges
    )
    return lik + prior.log_prior(fam, state.s0, state.c0, state.edges)


# ---------------------------------------------------------------------------
# Chain orchestration
# ---------------------------------------------------------------------------

def initial_state(family, data: Dataset, prior: PriorConfig, config: MCMCConfig,
                  chain_index: int, rng) -> ChainState:
    """Overdispersed chain start: prior-mean parameters (jittered for chains
    past the first) with latents drawn from the generative construction."""
    fam = get_family(family)
    if fam.kind is FamilyKind.GSST:
        raise DomainError("posterior inference is not available for the gsst family")
    n, p = data.y.shape

    c0 = prior.ac / prior.bc
    sp = prior.s0_prior
    if isinstance(sp, NormalS0Prior):
        s0 = sp.mu
    elif isinstance(sp, GammaS0Prior):
        s0 = sp.a / sp.b
    else:
        s0 = 0.5 * c0
    edge0 = max(1.0, round(prior.d0)) if fam.integer_intensity else prior.a0 / prior.b0

    if chain_index > 0:
        def factor():
            return math.exp(0.5 if rng.random() < 0.5 else -0.5)

        c0 *= factor()
        if isinstance(sp, NormalS0Prior):
            s0 += (0.5 if rng.random() < 0.5 else -0.5) * (1.0 / math.sqrt(sp.tau))
        elif isinstance(sp, GammaS0Prior):
            s0 *= factor()
        else:
            s0 = 0.5 * c0 * factor()
            s0 = min(s0, 0.95 * c0)
        if fam.integer_intensity:
            edge0 = max(1.0, round(edge0 * factor()))
        else:
            edge0 *= factor()

    edges = np.full((p, p), float(edge0))
    np.fill_diagonal(edges, 0.0)

    w = np.asarray(fam.sample_w(s0, c0, rng, size=n), dtype=float)
    links = np.zeros((n, p, p))
    for j, k in _pairs(p):
        draw = np.asarray(fam.sample_link(w, edges[j, k], rng), dtype=float)
        links[:, j, k] = draw
        links[:, k, j] = draw

    state = ChainState(
        family=fam.kind, s0=float(s0), c0=float(c0), edges=edges, w=w, links=links,
        step_sizes=_default_steps(config, p),
    )
    return state


def _adapt_block_steps(state: ChainState, window_start: dict, round_index: int,
                       target: float = 0.44):
    gain = 1.0 / math.sqrt(round_index)
    for name, step in state.step_sizes.items():
        if name.startswith("refresh_"):
            continue  # acceptance of block refreshes is not step-controlled
        acc, tries = state.accept.get(name, [0, 0])
        a0, t0 = window_start.get(name, (0, 0))
        d_tries = tries - t0
        if d_tries <= 0:
            continue
        rate = (acc - a0) / d_tries
        state.step_sizes[name] = step * math.exp((rate - target) * gain)
    window_start.clear()
    window_start.update({n: tuple(c) for n, c in state.accept.items()})


@dataclass(eq=False)
class PosteriorSamples:
    """Retained post-burn-in draws of all parameters, by chain.

    ``edges`` is indexed (chain, draw, pair) following ``pairs``; latents are
    kept only when the run was configured to retain them.
    """

    family: FamilyKind
    node_names: list[str]
    pairs: list[tuple[int, int]]
    s0: np.ndarray
    c0: np.ndarray
    edges: np.ndarray
    w: np.ndarray | None
    links: np.ndarray | None
    meta: dict

    @property
    def chains(self) -> int:
        return self.s0.shape[0]

    @property
    def retained(self) -> int:
        return self.s0.shape[1]

    def parameter_names(self) -> list[str]:
        return ["s0", "c0"] + [_edge_label(j, k) for j, k in self.pairs]

    def parameter_array(self, name: str) -> np.ndarray:
        """Per-chain draws of one parameter, shape (chains, retained)."""
        if name == "s0":
            return self.s0
        if name == "c0":
            return self.c0
        for idx, (j, k) in enumerate(self.pairs):
            if name == _edge_label(j, k):
                return self.edges[:, :, idx]
        raise KeyError(f"unknown parameter {name!r}")

    def pooled(self, name: str) -> np.ndarray:
        return self.parameter_array(name).reshape(-1)

    def edge_matrix_mean(self) -> np.ndarray:
        """Posterior-mean edge intensities as a symmetric matrix."""
        p = len(self.node_names)
        out = np.zeros((p, p))
        means = self.edges.reshape(-1, len(self.pairs)).mean(axis=0)
        for idx, (j, k) in enumerate(self.pairs):
            out[j, k] = out[k, j] = means[idx]
        return out


def run_chains(data: Dataset, family, prior: PriorConfig, config: MCMCConfig) -> PosteriorSamples:
    """Run independent chains from overdispersed starts; fully reproducible.

    Burn-in sweeps adapt the random-walk scales toward a 0.44 acceptance
    rate; adaptation is frozen afterwards and acceptance counters reset so
    reported rates describe the stationary phase.  Any chain failure aborts
    the run with the chain index and sweep number attached.
    """
    fam = get_family(family)
    data.validate_support(fam)
    prior.validate_for(fam)
    kernel = _SweepKernel(fam, data, prior, config)
    n, p = data.y.shape
    pairs = kernel.pairs
    kept = config.retained_per_chain

    s0_out = np.empty((config.chains, kept))
    c0_out = np.empty((config.chains, kept))
    edges_out = np.empty((config.chains, kept, len(pairs)))
    w_out = np.empty((config.chains, kept, n)) if config.keep_latents else None
    links_out = (
        np.empty((config.chains, kept, n, len(pairs))) if config.keep_latents else None
    )

    seeds = np.random.SeedSequence(config.seed).spawn(config.chains)
    acceptance = []
    tri = np.array(pairs)

    for m in range(config.chains):
        rng = np.random.default_rng(seeds[m])
        t = 0
        try:
            state = initial_state(fam, data, prior, config, m, rng)
            window_start: dict = {}
            adapt_round = 0
            keep_idx = 0
            for t in range(1, config.iterations + 1):
                kernel.sweep(state, rng)
                if t <= config.burn_in:
                    if t % config.adapt_window == 0:
                        adapt_round += 1
                        _adapt_block_steps(state, window_start, adapt_round)
                    if t == config.burn_in:
                        state.accept = {}
                elif (t - config.burn_in) % config.thinning == 0:
                    s0_out[m, keep_idx] = state.s0
                    c0_out[m, keep_idx] = state.c0
                    edges_out[m, keep_idx] = state.edges[tri[:, 0], tri[:, 1]]
                    if config.keep_latents:
                        w_out[m, keep_idx] = state.w
                        links_out[m, keep_idx] = state.links[:, tri[:, 0], tri[:, 1]]
                    keep_idx += 1
        except Exception as exc:  # noqa: BLE001 - re-raise with chain context
            raise ChainError(
                f"chain {m} failed at sweep {t}: {exc}", chain=m, sweep=t
            ) from exc
        rates = {
            name: (c[0] / c[1] if c[1] else float("nan"))
            for name, c in sorted(state.accept.items())
        }
        acceptance.append(rates)

    meta = {
        "iterations": config.iterations,
        "burn_in": config.burn_in,
        "thinning": config.thinning,
        "chains": config.chains,
        "seed": config.seed,
        "n": n,
        "p": p,
        "acceptance": acceptance,
    }
    return PosteriorSamples(
        family=fam.kind,
        node_names=list(data.node_names),
        pairs=pairs,
        s0=s0_out,
        c0=c0_out,
        edges=edges_out,
        w=w_out,
        links=links_out,
        meta=meta,
    )


# ---------------------------------------------------------------------------
# Summaries and diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParamSummary:
    mean: float
    sd: float
    q025: float
    q975: float


def summarize(samples: PosteriorSamples) -> dict[str, ParamSummary]:
    """Pooled-chain posterior summaries with interpolated quantiles."""
    out = {}
    for name in samples.parameter_names():
        draws = samples.pooled(name)
        if draws.size == 0:
            raise DomainError("cannot summarize empty samples")
        sd = float(draws.std(ddof=1)) if draws.size > 1 else 0.0
        lo, hi = np.quantile(draws, [0.025, 0.975])
        out[name] = ParamSummary(float(draws.mean()), sd, float(lo), float(hi))
    return out


def split_chain_psrf(samples: PosteriorSamples) -> dict[str, float]:
    """Split-chain potential scale reduction factor per parameter.

    Each chain is halved, giving 2 * chains pieces; values close to 1
    indicate convergence (pass threshold 1.1).
    """
    out = {}
    for name in samples.parameter_names():
        arr = samples.parameter_array(name)
        half = arr.shape[1] // 2
        if half < 2:
            raise DomainError("need at least 4 retained draws per chain for the PSRF")
        pieces = np.concatenate([arr[:, :half], arr[:, half: 2 * half]], axis=0)
        within = pieces.var(axis=1, ddof=1).mean()
        if within == 0.0:
            out[name] = 1.0
            continue
        between = half * pieces.mean(axis=1).var(ddof=1)
        pooled = (half - 1.0) / half * within + between / half
        out[name] = float(np.sqrt(pooled / within))
    return out


def predictive_mse(samples: PosteriorSamples, data: Dataset, rng) -> float:
    """Posterior mean of the predictive mean squared error.

    For every retained draw, one replicate table is simulated from the
    node-level density under that draw's parameters and latents, and the
    squared error against the observed table is averaged.
    """
    if samples.links is None:
        raise DomainError("predictive_mse requires samples retained with latents")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    fam = get_family(samples.family)
    n, p = data.y.shape
    pairs = samples.pairs
    incidence = np.zeros((len(pairs), p))
    for idx, (j, k) in enumerate(pairs):
        incidence[idx, j] = 1.0
        incidence[idx, k] = 1.0

    total = 0.0
    count = 0
    for m in range(samples.chains):
        for t in range(samples.retained):
            s_star = samples.s0[m, t] + samples.links[m, t] @ incidence
            c_star = samples.c0[m, t] + samples.edges[m, t] @ incidence
            yf = np.asarray(fam.sample_w(s_star, c_star[None, :], rng), dtype=float)
            total += float(np.mean((yf - data.y) ** 2))
            count += 1
    return total / count
