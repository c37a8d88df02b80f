"""Memory/register trace generation, parsing, and lifetime analysis.

Trace files are line-oriented text (gzip accepted by suffix)::

    # comment
    <cycle> <kind> <hex-id> <size-or-kernel>

``kind`` is ``R``/``W`` for memory reads/writes (``hex-id`` is a byte
address, last field the access size in bytes) or ``RGW``/``RGR`` for
register writes/reads (``hex-id`` is the register id, last field the
kernel segment id).  Cycles must be non-decreasing.
"""

from __future__ import annotations

import gzip
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import InputDomainError, TraceError

KINDS = ("R", "W", "RGR", "RGW")


class TraceEvent(NamedTuple):
    cycle: int
    kind: str           # R | W | RGR | RGW
    address: int        # byte address, or register id for RG* events
    size: int = 32      # bytes, or kernel segment id for RG* events

    @property
    def is_register(self) -> bool:
        return self.kind in ("RGR", "RGW")


def validate_trace(events: Iterable[TraceEvent]) -> list[TraceEvent]:
    out = []
    last = -1
    for i, ev in enumerate(events):
        if ev.cycle < last:
            raise TraceError(f"event {i}: cycle {ev.cycle} decreases (prev {last})")
        if ev.kind not in KINDS:
            raise TraceError(f"event {i}: unknown kind {ev.kind!r}")
        if ev.size <= 0 and not ev.is_register:
            raise TraceError(f"event {i}: size must be positive")
        last = ev.cycle
        out.append(ev)
    return out


# ---------------------------------------------------------------------
# File I/O


def _open(path, mode: str):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, mode + "t")
    return open(path, mode)


def write_trace(events: Iterable[TraceEvent], path) -> None:
    with _open(path, "w") as fh:
        for ev in events:
            fh.write(f"{ev.cycle} {ev.kind} {ev.address:x} {ev.size}\n")


def read_trace(path) -> list[TraceEvent]:
    events = []
    with _open(path, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 4:
                raise TraceError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
            try:
                ev = TraceEvent(int(parts[0]), parts[1], int(parts[2], 16), int(parts[3]))
            except ValueError as exc:
                raise TraceError(f"{path}:{lineno}: {exc}") from exc
            if ev.kind not in KINDS:
                raise TraceError(f"{path}:{lineno}: unknown kind {ev.kind!r}")
            events.append(ev)
    return validate_trace(events)


# ---------------------------------------------------------------------
# Synthetic generators


def generate_trace(model: str, seed: int = 0, n: int = 1000, *,
                   line_size: int = 128, size: int = 32,
                   working_set: int = 1 << 22, stride: int | None = None,
                   zipf_s: float = 1.0, n_hot: int = 4096,
                   write_frac: float = 0.3, issue_per_cycle: int = 4,
                   cycle_stride: int = 1, base: int = 0) -> list[TraceEvent]:
    """Deterministic synthetic memory traces.

    Models: ``stream`` (sequential lines), ``strided`` (fixed stride),
    ``zipf`` (ranked hot lines, s = 0 degenerates to uniform),
    ``pointer_chase`` (permutation walk).  ``issue_per_cycle`` batches
    events onto one cycle; ``cycle_stride`` spaces the batches out for
    sparse traffic.  Identical arguments and seed yield byte-identical
    traces.
    """
    rng = random.Random(seed)
    stride = line_size if stride is None else stride
    n_lines = max(1, working_set // line_size)
    events = []

    def cycle_of(i):
        return (i // issue_per_cycle) * cycle_stride

    if model == "stream":
        for i in range(n):
            kind = "W" if rng.random() < write_frac else "R"
            events.append(TraceEvent(cycle_of(i), kind, base + i * stride, size))
    elif model == "strided":
        for i in range(n):
            kind = "W" if rng.random() < write_frac else "R"
            addr = base + (i * stride) % working_set
            events.append(TraceEvent(cycle_of(i), kind, addr, size))
    elif model == "zipf":
        weights = [1.0 / (k + 1) ** zipf_s for k in range(n_hot)]
        total = sum(weights)
        cum = []
        acc = 0.0
        for w in weights:
            acc += w / total
            cum.append(acc)
        import bisect

        hot_lines = [rng.randrange(n_lines) for _ in range(n_hot)]
        for i in range(n):
            r = rng.random()
            k = bisect.bisect_left(cum, r)
            addr = base + hot_lines[min(k, n_hot - 1)] * line_size
            kind = "W" if rng.random() < write_frac else "R"
            events.append(TraceEvent(cycle_of(i), kind, addr, size))
    elif model == "pointer_chase":
        n_nodes = max(2, working_set // line_size)
        perm = list(range(n_nodes))
        rng.shuffle(perm)
        node = 0
        for i in range(n):
            events.append(TraceEvent(cycle_of(i), "R", base + node * line_size, size))
            node = perm[node]
    else:
        raise InputDomainError(f"unknown trace model {model!r}")
    return events


def generate_register_trace(seed: int = 0, n: int = 500_000, n_regs: int = 16384,
                            reads_per_write: float = 1.6,
                            kernel_every: int = 200_000) -> list[TraceEvent]:
    """Register-file activity with geometric reuse.

    Each event cycle writes a uniformly random register, so the gap
    between consecutive writes to one register is geometric with
    p = 1/n_regs; reads are sprinkled against recently written registers.
    The closed-form lifetime CDF is F(w) = 1 - (1 - 1/n_regs)**w.
    """
    rng = random.Random(seed)
    events = []
    cycle = 0
    recent: list[int] = []
    for i in range(n):
        reg = rng.randrange(n_regs)
        kernel = i // kernel_every
        events.append(TraceEvent(cycle, "RGW", reg, kernel))
        recent.append(reg)
        if len(recent) > 64:
            recent.pop(0)
        n_reads = int(reads_per_write) + (1 if rng.random() < reads_per_write % 1 else 0)
        for _ in range(n_reads):
            events.append(TraceEvent(cycle, "RGR", recent[rng.randrange(len(recent))], kernel))
        cycle += 1
    return events


def shipped_workloads(seed: int = 0) -> dict[str, list[TraceEvent]]:
    """The synthetic workload set used by the L2 benchmarking studies.

    ``stream_resident``: repeated sparse walk of a cache-resident buffer
    (hit-dominated; exposes standby and refresh shares).
    ``stream_large``: one pass over a buffer larger than the cache
    (miss-dominated; exposes DRAM traffic).
    ``zipf_hot``: skewed reuse over a hot set.
    ``mshr_stress``: high-rate strided misses over a huge footprint
    (saturates the MSHRs and the miss queue).
    """
    return {
        "stream_resident": generate_trace(
            "strided", seed=seed + 1, n=150_000, stride=128,
            working_set=1 << 18, issue_per_cycle=1, cycle_stride=48),
        "stream_large": generate_trace(
            "stream", seed=seed + 2, n=40_000, issue_per_cycle=2),
        "zipf_hot": generate_trace(
            "zipf", seed=seed + 3, n=80_000, n_hot=8192, zipf_s=0.9,
            working_set=1 << 21, issue_per_cycle=1, cycle_stride=8),
        "mshr_stress": generate_trace(
            "strided", seed=seed + 4, n=24_000, stride=128 * 97,
            working_set=1 << 28, issue_per_cycle=16),
    }


# ---------------------------------------------------------------------
# Register lifetime analysis


@dataclass
class RegLifetimeReport:
    """Lifetimes from write to overwrite/eviction, and read:write ratios."""

    lifetimes: list[int]
    window: int
    fraction_within_window: float
    cdf_x: list[int]
    cdf_y: list[float]
    read_write_ratio_per_kernel: dict[int, float]

    @property
    def n_samples(self) -> int:
        return len(self.lifetimes)


def analyze_register_lifetimes(events: Iterable[TraceEvent],
                               window: int = 100_000,
                               cdf_points: int = 64) -> RegLifetimeReport:
    """Track per-register value lifetimes over a register trace.

    A value lives from its write until it is overwritten; values still
    live at the end of the trace are treated as evicted there.  The CDF
    is sampled geometrically out to the maximum observed lifetime.
    """
    birth: dict[int, int] = {}
    lifetimes: list[int] = []
    reads: dict[int, int] = {}
    writes: dict[int, int] = {}
    last_cycle = 0
    for ev in events:
        if not ev.is_register:
            continue
        last_cycle = max(last_cycle, ev.cycle)
        kernel = ev.size
        if ev.kind == "RGW":
            writes[kernel] = writes.get(kernel, 0) + 1
            prev = birth.get(ev.address)
            if prev is not None:
                lifetimes.append(ev.cycle - prev)
            birth[ev.address] = ev.cycle
        else:
            reads[kernel] = reads.get(kernel, 0) + 1
    for reg, b in birth.items():
        lifetimes.append(last_cycle - b)  # evicted at trace end

    n = len(lifetimes)
    if n == 0:
        return RegLifetimeReport([], window, 0.0, [], [], {})
    lifetimes.sort()
    within = sum(1 for x in lifetimes if x <= window) / n
    span = max(lifetimes[-1], 1)
    xs: list[int] = []
    x = 1
    while x < span:
        xs.append(x)
        x = max(x + 1, int(x * 1.35))
    xs.append(span)
    import bisect

    ys = [bisect.bisect_right(lifetimes, xv) / n for xv in xs]
    ratios = {k: reads.get(k, 0) / writes[k] for k in sorted(writes)}
    return RegLifetimeReport(lifetimes, window, within, xs, ys, ratios)
