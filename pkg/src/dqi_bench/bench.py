"""End-to-end experiment pipelines and report generation.

Each pipeline takes a paint shop instance through encoding, reduction,
decoding statistics and probability estimates, and emits plain dict rows
that serialize to CSV.  Optima are found by exhaustive enumeration (the
instance sizes here are desk scale); an LP export hook is provided for
anyone who wants to cross-check with an external integer-programming
solver instead.
"""
from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from math import exp, log

import numpy as np

from .decoder import build_graph, build_path_list, gate_cost
from .dqi import (
    DEFAULT_SAMPLES,
    default_degree,
    dicke_weights,
    failure_profile_exact,
    failure_profile_mc,
    p_opt_approx,
    p_opt_exact,
)
from .encoding import (
    ICC,
    NON_ICC,
    XorsatInstance,
    code_distance,
    encode_icc,
    encode_non_icc,
    reduce_instance,
)
from .errors import CapacityError, ValidationError
from .instances import BpspInstance, generate_instance

ENUM_VAR_CAP = 26
REPORT_COLUMNS = [
    "n_cars", "n", "m", "code_distance", "l", "decoder", "mode",
    "p_opt", "c_opt", "c_dqi", "c_total", "eps_json", "seed",
]
AGGREGATE_COLUMNS = ["n_cars", "metric", "mean", "std"]


def instance_digest(inst: BpspInstance) -> str:
    """Stable short hash of the canonical instance JSON, for joining report rows."""
    canon = json.dumps(
        {"n_cars": inst.n_cars, "sequence": list(inst.sequence)},
        separators=(",", ":"),
        sort_keys=True,
    )
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def derive_seed(*parts) -> int:
    """Deterministic child seed from integer or string parts (order-sensitive)."""
    entropy = tuple(
        part
        if isinstance(part, int)
        else int.from_bytes(hashlib.sha256(str(part).encode()).digest()[:8], "big")
        for part in parts
    )
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def enumerate_optima(
    x: XorsatInstance, cap_vars: int = ENUM_VAR_CAP
) -> tuple[list[tuple[int, ...]], int]:
    """All assignments maximizing the satisfied-row count, plus that count.

    Exhaustive scan over 2^n assignments, vectorized in chunks; variable j
    maps to bit j-1 of the assignment index.  Refuses to run above
    ``cap_vars`` variables rather than silently sampling.
    """
    n = x.n_vars
    if n > cap_vars:
        raise CapacityError(f"optimum enumeration capped at {cap_vars} variables, got {n}")
    if x.m == 0:
        return [tuple((i >> j) & 1 for j in range(n)) for i in range(1 << n)], 0
    size = 1 << n
    chunk = 1 << 22
    best = -1
    picked: list[np.ndarray] = []
    for start in range(0, size, chunk):
        idx = np.arange(start, min(start + chunk, size), dtype=np.uint32)
        counts = np.zeros(len(idx), dtype=np.int32)
        for (a, b), v in zip(x.rows, x.targets):
            bits = ((idx >> np.uint32(a - 1)) ^ (idx >> np.uint32(b - 1))) & np.uint32(1)
            counts += bits == v
        top = int(counts.max())
        if top > best:
            best = top
            picked = [idx[counts == top]]
        elif top == best:
            picked.append(idx[counts == top])
    indices = np.concatenate(picked)
    assignments = [
        tuple(int((int(i) >> j) & 1) for j in range(n)) for i in indices
    ]
    return assignments, best


def _encode(inst: BpspInstance, encoding: str, reduce: bool):
    if encoding == ICC:
        x = encode_icc(inst)
    elif encoding == NON_ICC:
        x = encode_non_icc(inst)
    else:
        raise ValidationError(f"unknown encoding {encoding!r}")
    if reduce:
        x, record = reduce_instance(x, inst)
    else:
        record = None
    return x, record


def _trivial_row(inst: BpspInstance, decoder: str, mode: str, seed: int) -> dict:
    """Report row for a fully reduced, empty problem: every coloring is optimal."""
    return {
        "digest": instance_digest(inst),
        "n_cars": inst.n_cars,
        "n": 0,
        "m": 0,
        "code_distance": "",
        "l": 0,
        "decoder": decoder,
        "mode": mode,
        "p_opt": 1.0,
        "c_opt": 1.0,
        "c_dqi": 0.0,
        "c_total": 0.0,
        "eps": [0.0],
        "seed": seed,
        "s_opt": 0,
        "n_opt": 1,
        "forced_swaps": None,
        "wall_time_s": 0.0,
        "trivial": True,
    }


def run_pipeline(
    inst: BpspInstance,
    *,
    encoding: str = ICC,
    reduce: bool = True,
    decoder: str = "greedy",
    l: int | None = None,
    mode: str = "exact",
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    distance_cap: int = 12,
    enum_cap: int = ENUM_VAR_CAP,
) -> dict:
    """Full single-instance benchmark; returns one report row.

    ``mode="exact"`` enumerates every error up to the degree and sums the
    exact density over all optima; ``mode="approx"`` estimates failure
    rates by sampling and evaluates the closed-form density at the optimal
    satisfied-count.  The per-run gate cost is the leading-order circuit
    count for the greedy decoder and n^4 for the minimum-length decoder.
    """
    if decoder not in ("greedy", "min-length"):
        raise ValidationError(f"unknown decoder {decoder!r}")
    if mode not in ("exact", "approx"):
        raise ValidationError(f"unknown mode {mode!r}")
    start = time.perf_counter()
    x, record = _encode(inst, encoding, reduce)
    if x.m == 0:
        return _trivial_row(inst, decoder, mode, seed)

    dist = code_distance(x, cap=distance_cap)
    graph = build_graph(x)
    paths = build_path_list(graph)
    degree = default_degree(x.n_vars, x.m) if l is None else l
    if not 1 <= degree <= min(x.n_vars, x.m):
        raise ValidationError(
            f"degree {degree} outside 1..min(n={x.n_vars}, m={x.m})"
        )
    if mode == "exact":
        profile = failure_profile_exact(decoder, x, degree, paths=paths)
    else:
        profile = failure_profile_mc(decoder, x, degree, samples=samples, seed=seed, paths=paths)
    optima, s_opt = enumerate_optima(x, cap_vars=enum_cap)
    weights = dicke_weights(x.m, degree)
    if decoder == "greedy":
        c_dqi = float(gate_cost(paths).leading_order)
    else:
        c_dqi = float(x.n_vars) ** 4
    if mode == "exact":
        est = p_opt_exact(x, optima, weights, profile, c_dqi)
    else:
        est = p_opt_approx(len(optima), s_opt, weights, profile, x.n_vars, c_dqi)
    return {
        "digest": instance_digest(inst),
        "n_cars": inst.n_cars,
        "n": x.n_vars,
        "m": x.m,
        "code_distance": dist if dist is not None else f">{distance_cap}",
        "l": degree,
        "decoder": decoder,
        "mode": mode,
        "p_opt": est.p_opt,
        "c_opt": est.c_opt,
        "c_dqi": est.c_dqi,
        "c_total": est.c_total,
        "eps": list(profile.eps),
        "seed": seed,
        "s_opt": s_opt,
        "n_opt": len(optima),
        "forced_swaps": record.forced_swaps if record else 0,
        "wall_time_s": time.perf_counter() - start,
        "trivial": False,
    }


def sweep_degree(
    inst: BpspInstance,
    decoder: str = "greedy",
    profile_source: str = "mc",
    l_range=None,
    *,
    encoding: str = ICC,
    reduce: bool = True,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    enum_cap: int = ENUM_VAR_CAP,
) -> tuple[int, list[tuple[int, float]]]:
    """Approximate optimum probability across polynomial degrees.

    One failure profile is built up to the largest degree and reused for
    the whole series.  Returns the argmax degree (smallest on ties) and
    the per-degree series.  An instance that reduces to an empty problem
    returns (0, []).
    """
    x, _ = _encode(inst, encoding, reduce)
    if x.m == 0:
        return 0, []
    bound = min(x.n_vars, x.m)
    if l_range is None:
        l_range = range(1, bound + 1)
    l_values = sorted(set(int(v) for v in l_range))
    if not l_values or l_values[0] < 1 or l_values[-1] > bound:
        raise ValidationError(f"degree range must lie within 1..{bound}")
    paths = build_path_list(build_graph(x))
    if profile_source == "exact":
        profile = failure_profile_exact(decoder, x, l_values[-1], paths=paths)
    elif profile_source == "mc":
        profile = failure_profile_mc(
            decoder, x, l_values[-1], samples=samples, seed=seed, paths=paths
        )
    else:
        raise ValidationError(f"unknown profile source {profile_source!r}")
    optima, s_opt = enumerate_optima(x, cap_vars=enum_cap)
    series = []
    for degree in l_values:
        weights = dicke_weights(x.m, degree)
        est = p_opt_approx(len(optima), s_opt, weights, profile, x.n_vars, c_dqi=1.0)
        series.append((degree, est.p_opt))
    l_star = max(series, key=lambda pair: (pair[1], -pair[0]))[0]
    return l_star, series


def compare_decoders(
    inst: BpspInstance,
    l: int | None = None,
    samples: int | None = None,
    seed: int = 0,
    *,
    encoding: str = ICC,
    reduce: bool = True,
) -> list[dict]:
    """Run both decoders on identical inputs and return their paired rows.

    With ``samples=None`` the failure profiles are exact; otherwise both
    decoders score the same sampled error sets (sampling depends only on
    the seed, never on the decoder).
    """
    mode = "exact" if samples is None else "approx"
    rows = []
    for decoder in ("greedy", "min-length"):
        rows.append(
            run_pipeline(
                inst,
                encoding=encoding,
                reduce=reduce,
                decoder=decoder,
                l=l,
                mode=mode,
                samples=samples if samples is not None else DEFAULT_SAMPLES,
                seed=seed,
            )
        )
    return rows


def _validate_worker(args: tuple) -> tuple[dict, dict]:
    n_cars, inst_seed, samples, decoder = args
    inst = generate_instance(n_cars, inst_seed)
    exact = run_pipeline(inst, decoder=decoder, mode="exact", seed=inst_seed)
    approx = run_pipeline(
        inst, decoder=decoder, mode="approx", samples=samples, seed=inst_seed
    )
    return exact, approx


def validate_approximation(
    n_list,
    instances_per_n: int = 10,
    seed: int = 0,
    samples: int = DEFAULT_SAMPLES,
    decoder: str = "greedy",
    jobs: int = 1,
) -> tuple[list[dict], list[dict], list[dict]]:
    """Exact vs approximate optimum probability on random instances.

    For every car count in ``n_list``, ``instances_per_n`` seeded instances
    go through both pipelines at the default degree rule.  Returns the
    paired rows, per-N aggregates (including the geometric mean of the
    approx/exact ratio), and the rows whose ratio falls outside [0.05, 3].
    """
    tasks = [
        (int(n_cars), derive_seed(seed, int(n_cars), i), samples, decoder)
        for n_cars in n_list
        for i in range(instances_per_n)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_validate_worker, tasks))
    else:
        results = [_validate_worker(t) for t in tasks]

    rows: list[dict] = []
    flagged: list[dict] = []
    ratios: dict[int, list[float]] = {}
    for (exact_row, approx_row) in results:
        rows.extend((exact_row, approx_row))
        if exact_row["p_opt"] > 0 and approx_row["p_opt"] > 0:
            ratio = approx_row["p_opt"] / exact_row["p_opt"]
            ratios.setdefault(exact_row["n_cars"], []).append(ratio)
            if not 0.05 <= ratio <= 3.0:
                flagged.append(
                    {
                        "digest": exact_row["digest"],
                        "n_cars": exact_row["n_cars"],
                        "ratio": ratio,
                    }
                )
    aggregates = []
    for n_cars in sorted(ratios):
        logs = [log(r) for r in ratios[n_cars]]
        aggregates.append(
            {
                "n_cars": n_cars,
                "metric": "geomean_p_ratio",
                "mean": exp(sum(logs) / len(logs)),
                "std": float(np.std(logs)),
            }
        )
    aggregates.extend(aggregate_rows(rows, metrics=("p_opt",)))
    return rows, aggregates, flagged


def aggregate_rows(rows, metrics=("p_opt", "c_opt", "c_dqi", "c_total")) -> list[dict]:
    """Mean/std per car count for the chosen row metrics (grouped over finite values)."""
    out = []
    groups: dict[int, list[dict]] = {}
    for row in rows:
        groups.setdefault(row["n_cars"], []).append(row)
    for n_cars in sorted(groups):
        for metric in metrics:
            values = [
                float(r[metric])
                for r in groups[n_cars]
                if np.isfinite(float(r[metric]))
            ]
            if not values:
                continue
            out.append(
                {
                    "n_cars": n_cars,
                    "metric": metric,
                    "mean": float(np.mean(values)),
                    "std": float(np.std(values)),
                }
            )
    return out


def export_lp(x: XorsatInstance, path) -> None:
    """Write the system as a 0/1 integer program in LP text format.

    One binary z_j per row scores whether the row's parity matches its
    target, linearized without big-M constants; the objective maximizes
    the number of satisfied rows.
    """
    lines = ["Maximize"]
    if x.m:
        terms = " + ".join(f"z{j}" for j in range(1, x.m + 1))
        lines.append(f" obj: {terms}")
    else:
        lines.append(" obj: 0 x1" if x.n_vars else " obj:")
    lines.append("Subject To")
    for j, ((a, b), v) in enumerate(zip(x.rows, x.targets), start=1):
        if v == 1:
            lines.append(f" c{j}a: z{j} - x{a} - x{b} <= 0")
            lines.append(f" c{j}b: z{j} + x{a} + x{b} <= 2")
            lines.append(f" c{j}c: z{j} - x{a} + x{b} >= 0")
            lines.append(f" c{j}d: z{j} + x{a} - x{b} >= 0")
        else:
            lines.append(f" c{j}a: z{j} + x{a} - x{b} <= 1")
            lines.append(f" c{j}b: z{j} - x{a} + x{b} <= 1")
            lines.append(f" c{j}c: z{j} + x{a} + x{b} >= 1")
            lines.append(f" c{j}d: z{j} - x{a} - x{b} >= -1")
    lines.append("Binary")
    for i in range(1, x.n_vars + 1):
        lines.append(f" x{i}")
    for j in range(1, x.m + 1):
        lines.append(f" z{j}")
    lines.append("End")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_report_csv(rows, path) -> None:
    """Write report rows with the fixed column set; eps lists become JSON."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row["n_cars"], row["n"], row["m"], row["code_distance"],
                    row["l"], row["decoder"], row["mode"], row["p_opt"],
                    row["c_opt"], row["c_dqi"], row["c_total"],
                    json.dumps(row["eps"]), row["seed"],
                ]
            )


def write_aggregate_csv(aggregates, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_COLUMNS)
        for agg in aggregates:
            writer.writerow([agg["n_cars"], agg["metric"], agg["mean"], agg["std"]])
