"""Cycle-stepped, trace-driven simulator of the L2 slices of a GPU
memory partition: set-associative banks with MSHRs, a miss queue into a
fixed-latency bandwidth-capped DRAM channel, and distributed refresh.

Deterministic by construction: banks and queues advance in fixed index
order, every request carries a serial number, and each reaches exactly
one terminal disposition.  Addresses interleave line-first across
partitions, then banks, then sets (documented bit layout below).

    line = address // line_size
    partition = line % partitions
    bank      = (line // partitions) % banks_per_partition
    set       = (line // (partitions * banks_per_partition)) % n_sets
"""

from __future__ import annotations

import heapq
import json
import math
from collections import deque
from dataclasses import dataclass, field

from .bank import BankPPA
from .errors import ConfigError, InputDomainError
from .trace import TraceEvent

FAILURE_MODES = ("LINE_ALLOC", "MSHR_ENTRY", "MSHR_MERGE", "MISS_QUEUE",
                 "REFRESH_READ", "REFRESH_WRITE")


@dataclass(frozen=True)
class RefreshSpec:
    period_s: float
    duration_cycles: int
    rows_per_bank_tier: int
    tiers: int

    def __post_init__(self):
        if self.duration_cycles not in (1, 2):
            raise ConfigError("refresh duration must be 1 or 2 cycles")
        if self.period_s <= 0 or self.rows_per_bank_tier < 1 or self.tiers < 1:
            raise ConfigError("bad refresh spec")


@dataclass(frozen=True)
class L2Config:
    partitions: int = 8
    banks_per_partition: int = 2
    bank_capacity: int = 262144
    line_size: int = 128
    associativity: int = 8
    mshr_entries: int = 32
    mshr_merge_depth: int = 8
    miss_queue_depth: int = 16
    hit_latency: int = 30
    clock_mhz: float = 1132.0
    dram_latency: int = 220
    dram_bandwidth: int = 32          # bytes per cycle per partition
    refresh: RefreshSpec | None = None
    retry_queue_depth: int = 4096
    max_outstanding: int = 1024       # interconnect credit: live requests cap
    e_dram_per_byte: float = 20e-12   # J

    def __post_init__(self):
        if self.associativity < 1:
            raise ConfigError("associativity must be >= 1")
        if self.bank_capacity % (self.line_size * self.associativity):
            raise ConfigError("bank capacity must divide into line * ways")
        if self.refresh is not None:
            if self.refresh_period_cycles <= self.refresh.duration_cycles:
                raise ConfigError("refresh period must exceed its duration")

    @property
    def n_sets(self) -> int:
        return self.bank_capacity // (self.line_size * self.associativity)

    @property
    def n_banks(self) -> int:
        return self.partitions * self.banks_per_partition

    @property
    def refresh_period_cycles(self) -> int:
        assert self.refresh is not None
        return max(1, int(round(self.refresh.period_s * self.clock_mhz * 1e6)))


def l2_config_from_record(rec: dict, **overrides) -> tuple[L2Config, BankPPA]:
    """Build (L2Config, BankPPA) from one entry of l2configs.json."""
    ppa_d = rec["bank_ppa"]
    geom = rec["bank_geometry"]
    ppa = BankPPA(
        area=ppa_d["area_m2"], t_read=ppa_d["t_read_s"], t_write=ppa_d["t_write_s"],
        t_precharge=ppa_d["t_precharge_s"], t_access=ppa_d["t_access_s"],
        rct=ppa_d["rct_s"], rct_read_cycle=ppa_d.get("rct_read_cycle_s", ppa_d["rct_s"]),
        static_power=ppa_d["static_power_w"], e_read=ppa_d["e_read_j"],
        e_write=ppa_d["e_write_j"], e_refresh_line=ppa_d["e_refresh_line_j"],
        bandwidth=ppa_d["bandwidth_bps"], restore_in_rct=ppa_d.get("restore_in_rct", False),
    )
    refresh = None
    if rec.get("refresh_period_s"):
        refresh = RefreshSpec(
            period_s=rec["refresh_period_s"],
            duration_cycles=rec.get("refresh_duration_cycles", 1),
            rows_per_bank_tier=geom["rows"],
            tiers=geom["n_l"],
        )
    kw = dict(
        partitions=rec["partitions"],
        banks_per_partition=rec["banks_per_partition"],
        bank_capacity=rec["bank_capacity_bytes"],
        clock_mhz=rec["clock_mhz"],
        refresh=refresh,
    )
    kw.update(overrides)
    return L2Config(**kw), ppa


def load_l2_config(path: str, key: str, **overrides) -> tuple[L2Config, BankPPA]:
    with open(path) as fh:
        data = json.load(fh)
    if key not in data:
        raise ConfigError(f"no config {key!r} in {path}; have {sorted(data)}")
    return l2_config_from_record(data[key], **overrides)


@dataclass
class SimStats:
    accesses: int = 0
    hits: int = 0
    misses: int = 0
    reservation_failures: dict = field(
        default_factory=lambda: {m: 0 for m in FAILURE_MODES})
    refresh_events: int = 0
    energy: dict = field(default_factory=lambda: {
        "static": 0.0, "dyn_read": 0.0, "dyn_write": 0.0,
        "refresh": 0.0, "dram": 0.0})
    total_cycles: int = 0
    line_fills: int = 0
    writebacks: int = 0
    requests_issued: int = 0
    requests_disposed: int = 0

    @property
    def total_energy(self) -> float:
        return sum(self.energy.values())

    @property
    def miss_rate(self) -> float:
        return self.misses / self.accesses if self.accesses else 0.0

    def to_json_dict(self) -> dict:
        return {
            "accesses": self.accesses, "hits": self.hits, "misses": self.misses,
            "miss_rate": self.miss_rate,
            "reservation_failures": dict(self.reservation_failures),
            "refresh_events": self.refresh_events,
            "energy_j": dict(self.energy), "total_energy_j": self.total_energy,
            "total_cycles": self.total_cycles,
            "line_fills": self.line_fills, "writebacks": self.writebacks,
            "requests_issued": self.requests_issued,
            "requests_disposed": self.requests_disposed,
        }


def schedule_refresh(config: L2Config, until_cycle: int):
    """Per-bank distributed refresh events up to ``until_cycle``.

    Yields (bank, start_cycle, duration, row, tier); banks are staggered
    by an equal phase slice of the period, and the k-th event of a bank
    refreshes row k mod rows on tier (k // rows) mod tiers, so every
    (row, tier) line is visited exactly once per retention window.
    """
    if config.refresh is None:
        return
    period = config.refresh_period_cycles
    if period <= config.refresh.duration_cycles:
        raise ConfigError("refresh period must exceed its duration")
    rows, tiers = config.refresh.rows_per_bank_tier, config.refresh.tiers
    for bank in range(config.n_banks):
        phase = (bank * period) // config.n_banks
        k = 0
        start = phase
        while start < until_cycle:
            yield (bank, start, config.refresh.duration_cycles,
                   k % rows, (k // rows) % tiers)
            k += 1
            start = phase + k * period


class _Line:
    __slots__ = ("tag", "valid", "dirty", "lru", "reserved")

    def __init__(self):
        self.tag = -1
        self.valid = False
        self.dirty = False
        self.lru = 0
        self.reserved = False


class _Bank:
    def __init__(self, config: L2Config):
        self.sets = [[_Line() for _ in range(config.associativity)]
                     for _ in range(config.n_sets)]
        self.lru_clock = 0
        self.mshr: dict[int, list] = {}      # line -> list of merged requests
        self.miss_queue: deque = deque()

    def touch(self, line: _Line):
        self.lru_clock += 1
        line.lru = self.lru_clock


class _Request:
    __slots__ = ("serial", "kind", "line_addr", "issue_cycle")

    def __init__(self, serial, kind, line_addr, issue_cycle):
        self.serial = serial
        self.kind = kind
        self.line_addr = line_addr
        self.issue_cycle = issue_cycle


def run(trace, config: L2Config, ppa: BankPPA) -> SimStats:
    """Simulate the trace; returns deterministic SimStats.

    Each trace event is split into line-sized requests; a request retries
    on the next cycle after any reservation failure and reaches exactly
    one terminal disposition (hit or miss).  Writes allocate on miss and
    mark the line dirty at fill (write-back policy).
    """
    stats = SimStats()
    if config.refresh is not None:
        period = config.refresh_period_cycles
        duration = config.refresh.duration_cycles
    banks = [_Bank(config) for _ in range(config.n_banks)]
    pb = config.partitions * config.banks_per_partition

    # intake: split events into line requests
    requests: list[_Request] = []
    serial = 0
    for ev in trace:
        if ev.is_register:
            continue
        first = ev.address // config.line_size
        last = (ev.address + max(ev.size, 1) - 1) // config.line_size
        for line_addr in range(first, last + 1):
            requests.append(_Request(serial, ev.kind, line_addr, ev.cycle))
            serial += 1
    stats.requests_issued = serial
    if not requests:
        stats.total_cycles = 0
        return stats

    def bank_index(line_addr: int) -> int:
        p = line_addr % config.partitions
        b = (line_addr // config.partitions) % config.banks_per_partition
        return p * config.banks_per_partition + b

    def set_index(line_addr: int) -> int:
        return (line_addr // pb) % config.n_sets

    def refresh_blocked(bank: int, cycle: int) -> bool:
        if config.refresh is None:
            return False
        phase = (bank * period) // config.n_banks
        if cycle < phase:
            return False
        return (cycle - phase) % period < duration

    retry_q: deque = deque()            # (cycle, _Request), FIFO per cycle
    dram_heap: list = []                # (ready_cycle, seq, bank, line, dirty)
    channel_free = [0] * config.partitions
    heap_seq = 0
    e = stats.energy
    idx = 0
    now = requests[0].issue_cycle
    last_cycle = 0
    live_count = 0

    def dispose(req: _Request, cycle: int, hit: bool):
        stats.accesses += 1
        stats.requests_disposed += 1
        if hit:
            stats.hits += 1
        else:
            stats.misses += 1
        if req.kind == "R":
            e["dyn_read"] += ppa.e_read
        else:
            e["dyn_write"] += ppa.e_write

    def fail(req: _Request, cycle: int, mode: str):
        stats.reservation_failures[mode] += 1
        if len(retry_q) >= config.retry_queue_depth:
            raise ConfigError(
                f"retry queue overflow (> {config.retry_queue_depth}) at cycle {cycle}")
        retry_q.append((cycle + 1, req))

    def try_issue_dram(cycle: int):
        nonlocal heap_seq
        transfer = max(1, math.ceil(config.line_size / config.dram_bandwidth))
        for p in range(config.partitions):
            while channel_free[p] <= cycle:
                entry = None
                for b in range(config.banks_per_partition):
                    bank = banks[p * config.banks_per_partition + b]
                    if bank.miss_queue:
                        entry = (p * config.banks_per_partition + b, bank)
                        break
                if entry is None:
                    break
                bank_id, bank = entry
                line_addr, is_writeback = bank.miss_queue.popleft()
                channel_free[p] = cycle + transfer
                e["dram"] += config.line_size * config.e_dram_per_byte
                if is_writeback:
                    stats.writebacks += 1
                else:
                    ready = cycle + config.dram_latency + transfer
                    heapq.heappush(dram_heap, (ready, heap_seq, bank_id, line_addr))
                    heap_seq += 1

    def handle_fill(bank_id: int, line_addr: int, cycle: int):
        bank = banks[bank_id]
        nonlocal live_count
        merged = bank.mshr.pop(line_addr, [])
        live_count -= len(merged)
        sidx = set_index(line_addr)
        target = None
        for line in bank.sets[sidx]:
            if line.reserved and line.tag == line_addr:
                target = line
                break
        if target is None:
            return
        target.valid = True
        target.reserved = False
        target.dirty = any(r.kind == "W" for r in merged)
        bank.touch(target)
        stats.line_fills += 1
        e["dyn_write"] += ppa.e_write  # array fill

    def attempt(req: _Request, cycle: int):
        bank_id = bank_index(req.line_addr)
        if refresh_blocked(bank_id, cycle):
            fail(req, cycle, "REFRESH_READ" if req.kind == "R" else "REFRESH_WRITE")
            return
        bank = banks[bank_id]
        sidx = set_index(req.line_addr)
        lines = bank.sets[sidx]
        for line in lines:
            if line.valid and line.tag == req.line_addr:
                nonlocal live_count
                live_count -= 1
                bank.touch(line)
                if req.kind == "W":
                    line.dirty = True
                dispose(req, cycle, hit=True)
                return
        # miss path: merge into an outstanding fill if one exists
        if req.line_addr in bank.mshr:
            merged = bank.mshr[req.line_addr]
            if len(merged) >= config.mshr_merge_depth:
                fail(req, cycle, "MSHR_MERGE")
                return
            merged.append(req)
            dispose(req, cycle, hit=False)
            return
        if len(bank.mshr) >= config.mshr_entries:
            fail(req, cycle, "MSHR_ENTRY")
            return
        victim = None
        for line in lines:
            if line.reserved:
                continue
            if victim is None or line.lru < victim.lru:
                victim = line
        if victim is None:
            fail(req, cycle, "LINE_ALLOC")
            return
        if len(bank.miss_queue) >= config.miss_queue_depth:
            fail(req, cycle, "MISS_QUEUE")
            return
        if victim.valid and victim.dirty:
            bank.miss_queue.append((victim.tag, True))  # writeback
        victim.tag = req.line_addr
        victim.valid = False
        victim.dirty = False
        victim.reserved = True
        bank.mshr[req.line_addr] = [req]
        bank.miss_queue.append((req.line_addr, False))
        dispose(req, cycle, hit=False)

    while idx < len(requests) or retry_q or dram_heap or any(
            b.miss_queue for b in banks):
        admitting = idx < len(requests) and live_count < config.max_outstanding
        candidates = []
        if admitting:
            candidates.append(requests[idx].issue_cycle)
        if retry_q:
            candidates.append(retry_q[0][0])
        if dram_heap:
            candidates.append(dram_heap[0][0])
        for p in range(config.partitions):
            base = p * config.banks_per_partition
            if any(banks[base + b].miss_queue
                   for b in range(config.banks_per_partition)):
                candidates.append(max(channel_free[p], now))
        if candidates:
            now = max(now, min(candidates))
        last_cycle = max(last_cycle, now)

        while dram_heap and dram_heap[0][0] <= now:
            _, _, bank_id, line_addr = heapq.heappop(dram_heap)
            handle_fill(bank_id, line_addr, now)
        while retry_q and retry_q[0][0] <= now:
            _, req = retry_q.popleft()
            attempt(req, now)
        while (idx < len(requests) and requests[idx].issue_cycle <= now
               and live_count < config.max_outstanding):
            live_count += 1
            attempt(requests[idx], now)
            idx += 1
        try_issue_dram(now)
        now += 1

    stats.total_cycles = last_cycle + 1
    if config.refresh is not None:
        n_ref = sum(1 for _ in schedule_refresh(config, stats.total_cycles))
        stats.refresh_events = n_ref
        e["refresh"] = n_ref * ppa.e_refresh_line
    e["static"] = (ppa.static_power * config.n_banks
                   * stats.total_cycles / (config.clock_mhz * 1e6))
    assert stats.requests_disposed == stats.requests_issued
    assert stats.accesses == stats.hits + stats.misses
    return stats


# ---------------------------------------------------------------------
# Energy reporting


def energy_report(stats: SimStats, baseline: SimStats | None = None) -> list[dict]:
    """Itemized energy rows; components sum to the total exactly.

    Normalization against the baseline's total is included when a
    baseline run is supplied.
    """
    from .errors import ReportError

    total = stats.total_energy
    rows = []
    for name in ("static", "dyn_read", "dyn_write", "refresh", "dram"):
        val = stats.energy[name]
        row = {"component": name, "energy_j": val,
               "fraction": val / total if total else 0.0}
        if baseline is not None:
            if baseline.total_energy <= 0:
                raise ReportError("baseline run has no energy to normalize against")
            row["normalized_to_baseline"] = val / baseline.total_energy
        rows.append(row)
    rows.append({"component": "total", "energy_j": total,
                 "fraction": 1.0 if total else 0.0,
                 **({"normalized_to_baseline": total / baseline.total_energy}
                    if baseline is not None else {})})
    return rows


def write_stats(stats: SimStats, path) -> None:
    with open(path, "w") as fh:
        json.dump(stats.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
