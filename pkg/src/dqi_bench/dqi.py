"""Measurement probabilities and cost estimates for decoded interferometry.

The protocol prepares a superposition over errors of Hamming weight k <= l,
weighted per shell by the principal eigenvector of a tridiagonal matrix,
maps each error to its syndrome, uncomputes the error through a decoder
and post-selects on success.  What survives per shell k is the set D_k of
correctly decoded weight-k errors; the probability density of measuring an
assignment x combines the per-shell signed sums over D_k.

Everything here is classical: failure rates are measured by enumerating or
sampling errors, and densities are evaluated in closed form.  Probability
arithmetic is 64-bit float; binomial coefficients and shell sums are exact
integers converted as late as possible.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb, inf, sqrt

import numpy as np

from .decoder import DECODERS, PathList, build_graph, build_path_list
from .encoding import XorsatInstance
from .errors import CapacityError, ValidationError

POWER_ITERATION_CAP = 10**5
_CHANGE_TOL = 1e-12
_RESIDUAL_TOL = 1e-11
ENUMERATION_BUDGET = 10**7
DEFAULT_SAMPLES = 2000


@dataclass(frozen=True)
class DickeWeights:
    """Per-shell weights w_0..w_l: positive, unit-norm principal eigenvector."""

    m: int
    l: int
    w: tuple[float, ...]
    lambda_max: float


def dicke_weights(m: int, l: int) -> DickeWeights:
    """Principal eigenvector of the (l+1)x(l+1) tridiagonal with a_k = sqrt(k(m-k+1)).

    Shifted power iteration (the raw matrix has a symmetric spectrum, so a
    positive diagonal shift makes the top eigenvalue strictly dominant).
    Iterates until the vector change drops below 1e-12 *and* the residual
    ||A w - lambda w||_inf is below 1e-11; the change criterion alone can
    stall an order of magnitude above the residual target.
    """
    if not 0 <= l <= m or m < 1:
        raise ValidationError(f"degree l={l} out of range for m={m}")
    if l == 0:
        return DickeWeights(m=m, l=0, w=(1.0,), lambda_max=0.0)
    a = np.sqrt(np.arange(1.0, l + 1) * (m - np.arange(1.0, l + 1) + 1.0))

    def matvec(vec):
        out = np.zeros_like(vec)
        out[:-1] += a * vec[1:]
        out[1:] += a * vec[:-1]
        return out

    shift = 2.0 * float(a.max()) + 1.0
    w = np.full(l + 1, 1.0 / sqrt(l + 1))
    converged = False
    for _ in range(POWER_ITERATION_CAP):
        w_next = matvec(w) + shift * w
        w_next /= np.linalg.norm(w_next)
        change = float(np.max(np.abs(w_next - w)))
        w = w_next
        if change <= _CHANGE_TOL:
            aw = matvec(w)
            lam = float(w @ aw)
            if float(np.max(np.abs(aw - lam * w))) <= _RESIDUAL_TOL:
                converged = True
                break
    if not converged:
        raise RuntimeError(f"power iteration failed to converge for (m={m}, l={l})")
    if w[0] < 0:
        w = -w
    aw = matvec(w)
    lam = float(w @ aw)
    residual = float(np.max(np.abs(aw - lam * w)))
    if residual > 1e-10 or not np.all(w > 0):
        raise RuntimeError(
            f"eigenvector quality check failed for (m={m}, l={l}): residual {residual:.2e}"
        )
    return DickeWeights(m=m, l=l, w=tuple(float(v) for v in w), lambda_max=lam)


def shell_sum_A(k: int, s: int, m: int) -> int:
    """Sum over all weight-k sign patterns with s of m factors positive.

    Closed form 2 * sum_{0 <= 2j <= min(k, m-s)} C(s, k-2j) C(m-s, 2j) - C(m, k):
    a weight-k subset hitting i unsatisfied rows contributes (-1)^i, and
    grouping by even i against the Vandermonde total gives the expression.
    Exact integer arithmetic throughout.
    """
    if not 0 <= k <= m:
        raise ValidationError(f"k={k} out of range 0..{m}")
    if not 0 <= s <= m:
        raise ValidationError(f"s={s} out of range 0..{m}")
    even = sum(
        comb(s, k - 2 * j) * comb(m - s, 2 * j)
        for j in range(0, min(k, m - s) // 2 + 1)
    )
    return 2 * even - comb(m, k)


@dataclass(frozen=True, eq=False)
class FailureProfile:
    """Per-Hamming-weight decoder failure rates for one instance.

    Exact mode retains the correctly decoded sets D_k (as arrays of 0-based
    row indices) so signed sums can be evaluated later; Monte Carlo mode
    keeps only the sampled failure fractions.  Shells small enough to
    enumerate are always exact, even in Monte Carlo mode.
    """

    mode: str  # "exact" | "monte_carlo"
    decoder: str
    m: int
    l: int
    eps: tuple[float, ...]
    shell_sizes: tuple[int, ...]
    decoded_sets: tuple[np.ndarray, ...] | None = None
    samples_per_shell: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if len(self.eps) != self.l + 1 or len(self.shell_sizes) != self.l + 1:
            raise ValidationError("eps and shell_sizes must have length l+1")
        if self.eps[0] != 0.0:
            raise ValidationError("weight-0 errors always decode: eps[0] must be 0")


class _SyndromeDecoder:
    """Runs a named decoder with a per-syndrome cache.

    Both decoders choose their edge set from the syndrome alone, so the
    decoded error is cached per distinct syndrome (as a bitmask) and
    repeated shells cost one dictionary lookup per error.
    """

    def __init__(self, decoder: str, x: XorsatInstance, paths: PathList | None = None):
        if decoder not in DECODERS:
            raise ValidationError(f"unknown decoder {decoder!r}")
        self.decoder = decoder
        self.x = x
        self.paths = paths if paths is not None else build_path_list(build_graph(x))
        self.row_masks = [
            (1 << (a - 1)) | (1 << (b - 1)) for a, b in x.rows
        ]
        self._cache: dict[int, int] = {}

    def decoded_error_mask(self, positions) -> int:
        syn = 0
        for j in positions:
            syn ^= self.row_masks[j]
        hit = self._cache.get(syn)
        if hit is None:
            y = [0] * self.x.m
            for j in positions:
                y[j] = 1
            outcome = DECODERS[self.decoder](self.paths, self.x, tuple(y))
            hit = 0
            for i, bit in enumerate(outcome.decoded_error):
                if bit:
                    hit |= 1 << i
            self._cache[syn] = hit
        return hit

    def succeeds(self, positions) -> bool:
        err = 0
        for j in positions:
            err |= 1 << j
        return self.decoded_error_mask(positions) == err


def failure_profile_exact(
    decoder: str,
    x: XorsatInstance,
    l: int,
    paths: PathList | None = None,
    budget: int = ENUMERATION_BUDGET,
) -> FailureProfile:
    """Enumerate every error of weight <= l and record exact failure rates.

    Also retains each correctly decoded set D_k, which the exact density
    needs.  Raises CapacityError when the shell enumeration would exceed
    ``budget`` errors; Monte Carlo mode is the fallback at that point.
    """
    if not 0 <= l <= x.m:
        raise ValidationError(f"degree l={l} out of range 0..{x.m}")
    total = sum(comb(x.m, k) for k in range(l + 1))
    if total > budget:
        raise CapacityError(
            f"exact profile needs {total} decodes (> budget {budget}); "
            "use the Monte Carlo profile instead"
        )
    runner = _SyndromeDecoder(decoder, x, paths)
    eps = []
    sizes = []
    decoded_sets = []
    for k in range(l + 1):
        size = comb(x.m, k)
        good = [pos for pos in combinations(range(x.m), k) if runner.succeeds(pos)]
        eps.append((size - len(good)) / size)
        sizes.append(size)
        decoded_sets.append(np.array(good, dtype=np.int64).reshape(len(good), k))
    return FailureProfile(
        mode="exact",
        decoder=decoder,
        m=x.m,
        l=l,
        eps=tuple(eps),
        shell_sizes=tuple(sizes),
        decoded_sets=tuple(decoded_sets),
    )


def sample_shell_error(m: int, k: int, seed: int, draw: int) -> tuple[int, ...]:
    """Deterministic uniform weight-k error: draw index -> sorted positions.

    Each draw owns a generator seeded by (seed, k, draw), so samples do not
    depend on evaluation order or worker count, and paired runs with the
    same seed see byte-identical error sets.
    """
    rng = np.random.default_rng((seed, k, draw))
    return tuple(sorted(int(j) for j in rng.choice(m, size=k, replace=False)))


def failure_profile_mc(
    decoder: str,
    x: XorsatInstance,
    l: int,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    paths: PathList | None = None,
) -> FailureProfile:
    """Monte Carlo failure rates: a fixed number of uniform errors per shell.

    Shells with at most ``samples`` errors are enumerated exactly instead;
    draws are independent, so an error can be sampled more than once.
    """
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    if not 0 <= l <= x.m:
        raise ValidationError(f"degree l={l} out of range 0..{x.m}")
    runner = _SyndromeDecoder(decoder, x, paths)
    eps = []
    sizes = []
    for k in range(l + 1):
        size = comb(x.m, k)
        sizes.append(size)
        if size <= samples:
            fails = sum(
                0 if runner.succeeds(pos) else 1
                for pos in combinations(range(x.m), k)
            )
            eps.append(fails / size)
        else:
            fails = sum(
                0 if runner.succeeds(sample_shell_error(x.m, k, seed, i)) else 1
                for i in range(samples)
            )
            eps.append(fails / samples)
    return FailureProfile(
        mode="monte_carlo",
        decoder=decoder,
        m=x.m,
        l=l,
        eps=tuple(eps),
        shell_sizes=tuple(sizes),
        samples_per_shell=samples,
        seed=seed,
    )


def _check_weights_profile(weights: DickeWeights, profile: FailureProfile, m: int):
    if weights.m != m or profile.m != m:
        raise ValidationError("weights/profile built for a different constraint count")
    if weights.l > profile.l:
        raise ValidationError(
            f"profile covers degrees up to {profile.l} < weights degree {weights.l}"
        )


def normalization(weights: DickeWeights, profile: FailureProfile) -> float:
    """Post-selection renormalization: sum of w_k^2 (1 - eps_k) up to the weights' degree."""
    return sum(
        wk * wk * (1.0 - profile.eps[k]) for k, wk in enumerate(weights.w)
    )


def p_exact(
    x: XorsatInstance, assign, weights: DickeWeights, profile: FailureProfile
) -> float:
    """Exact measurement density of one assignment.

    Per shell k the retained errors contribute the signed sum
    sum_{y in D_k} prod_{rows flipped by y} (+1 if the row is satisfied by
    the assignment else -1); the density is the weighted sum of squared
    shell sums over the renormalization and the 2^n uniform factor.
    """
    if profile.mode != "exact" or profile.decoded_sets is None:
        raise ValidationError("exact density needs an exact profile with decoded sets")
    _check_weights_profile(weights, profile, x.m)
    assign = tuple(int(b) for b in assign)
    if len(assign) != x.n_vars:
        raise ValidationError(f"assignment length {len(assign)} != n_vars = {x.n_vars}")
    signs = np.array(
        [
            1.0 if (assign[a - 1] ^ assign[b - 1]) == v else -1.0
            for (a, b), v in zip(x.rows, x.targets)
        ]
    )
    r_norm = normalization(weights, profile)
    total = 0.0
    for k, wk in enumerate(weights.w):
        d_k = profile.decoded_sets[k]
        # rows of d_k index the flipped constraints; an empty row (k = 0)
        # has an empty product, i.e. contributes +1
        inner = float(np.prod(signs[d_k], axis=1).sum())
        total += wk * wk * inner * inner / profile.shell_sizes[k]
    return total / (r_norm * 2.0**x.n_vars)


def p_approx(
    s: int, weights: DickeWeights, profile: FailureProfile, n: int
) -> float:
    """Approximate density of any assignment satisfying s constraints.

    Assumes correctly decoded errors are spread uniformly over each shell,
    which turns every shell sum into (1 - eps_k) times the closed-form
    shell sum at s.
    """
    m = profile.m
    if not 0 <= s <= m:
        raise ValidationError(f"s={s} out of range 0..{m}")
    _check_weights_profile(weights, profile, m)
    r_norm = normalization(weights, profile)
    total = 0.0
    for k, wk in enumerate(weights.w):
        a_ks = shell_sum_A(k, s, m)
        frac = 1.0 - profile.eps[k]
        total += wk * wk * frac * frac * ((a_ks * a_ks) / comb(m, k))
    return total / (r_norm * 2.0**n)


def amplitude_oracle(
    x: XorsatInstance, weights: DickeWeights, profile: FailureProfile
) -> np.ndarray:
    """Basis-state amplitude magnitudes, built directly from the state definition.

    For each shell the pre-transform syndrome state is accumulated (phase
    (-1)^{targets . y} at basis index syndrome(y)) and pushed through a
    fast Walsh-Hadamard transform; per-shell contributions combine in
    quadrature, matching the per-shell-squared density.  Independent of
    p_exact's satisfied-row bookkeeping, this is the oracle used to verify
    it: squared magnitudes must match the density pointwise.
    """
    if profile.mode != "exact" or profile.decoded_sets is None:
        raise ValidationError("amplitude oracle needs an exact profile with decoded sets")
    if x.n_vars > 20:
        raise CapacityError(f"amplitude oracle limited to 20 variables, got {x.n_vars}")
    _check_weights_profile(weights, profile, x.m)
    n = x.n_vars
    size = 1 << n
    row_masks = np.array(
        [(1 << (a - 1)) | (1 << (b - 1)) for a, b in x.rows], dtype=np.int64
    )
    targets = np.array(x.targets, dtype=np.int64)
    r_norm = normalization(weights, profile)
    squared = np.zeros(size)
    for k, wk in enumerate(weights.w):
        d_k = profile.decoded_sets[k]
        syn = np.bitwise_xor.reduce(row_masks[d_k], axis=1)
        parity = np.bitwise_xor.reduce(targets[d_k], axis=1)
        psi = np.zeros(size)
        np.add.at(psi, syn, 1.0 - 2.0 * parity)
        transformed = _walsh_hadamard(psi)
        scale = wk / sqrt(profile.shell_sizes[k] * size)
        squared += (scale * transformed) ** 2
    return np.sqrt(squared / r_norm)


def _walsh_hadamard(vec: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform of a length-2^n vector."""
    n = len(vec)
    h = 1
    while h < n:
        vec = vec.reshape(n // (2 * h), 2, h)
        top = vec[:, 0, :] + vec[:, 1, :]
        bottom = vec[:, 0, :] - vec[:, 1, :]
        vec = np.stack([top, bottom], axis=1)
        h *= 2
    return vec.reshape(n)


@dataclass(frozen=True)
class DqiEstimate:
    """Probability of measuring an optimum and the induced cost chain."""

    p_opt: float
    c_opt: float  # expected repetitions, 1/p_opt
    c_dqi: float  # gate cost of one preparation
    c_total: float  # c_opt * c_dqi
    l: int
    normalization: float

    def __post_init__(self):
        if not (self.p_opt == 0.0 or 0.0 < self.p_opt <= 1.0 + 1e-12):
            raise ValidationError(f"p_opt {self.p_opt} outside (0, 1]")


def _estimate(p_opt: float, c_dqi: float, l: int, r_norm: float) -> DqiEstimate:
    if c_dqi <= 0:
        raise ValidationError("c_dqi must be positive")
    if p_opt <= 0.0:
        # decoder never post-selects onto an optimum: flag infinite cost
        return DqiEstimate(
            p_opt=0.0, c_opt=inf, c_dqi=c_dqi, c_total=inf, l=l, normalization=r_norm
        )
    return DqiEstimate(
        p_opt=p_opt,
        c_opt=1.0 / p_opt,
        c_dqi=c_dqi,
        c_total=c_dqi / p_opt,
        l=l,
        normalization=r_norm,
    )


def p_opt_exact(
    x: XorsatInstance,
    s_opt_assignments,
    weights: DickeWeights,
    profile: FailureProfile,
    c_dqi: float,
) -> DqiEstimate:
    """Sum the exact density over the optimal assignments.

    The density is generally not constant across optima (failures break the
    symmetry), so the sum is evaluated per element.
    """
    s_opt_assignments = list(s_opt_assignments)
    if not s_opt_assignments:
        raise ValidationError("the set of optimal assignments must be nonempty")
    p_opt = sum(p_exact(x, assign, weights, profile) for assign in s_opt_assignments)
    return _estimate(p_opt, c_dqi, weights.l, normalization(weights, profile))


def p_opt_approx(
    count: int,
    s_opt: int,
    weights: DickeWeights,
    profile: FailureProfile,
    n: int,
    c_dqi: float,
) -> DqiEstimate:
    """Approximate optimum probability: |S_opt| times the density at s_opt."""
    if count < 1:
        raise ValidationError("the set of optimal assignments must be nonempty")
    p_opt = count * p_approx(s_opt, weights, profile, n)
    return _estimate(p_opt, c_dqi, weights.l, normalization(weights, profile))


def default_degree(n: int, m: int) -> int:
    """Default polynomial degree: floor(2n/5), at least 1, at most min(n, m)."""
    if m < 1:
        raise ValidationError("degree rule needs at least one constraint")
    return min(max(1, (2 * n) // 5), n, m)
