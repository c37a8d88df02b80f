"""Exhaustive constrained search over bank organizations, Pareto
extraction, and the stacking / banking studies.

Every point of the cartesian space (topology x ports x subarrays_x x
subarrays_y x mats_per_subarray x n_l) is visited exactly once; rows per
mat are derived as the largest power of two within the topology's row
ceiling, and infeasible points carry reason codes instead of being
dropped.  Evaluation is pure, so output ordering is canonical and
byte-stable for a fixed configuration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .bank import BankDesign, BankPPA, ModelContext, bank_ppa, default_context, \
    density_mb_per_mm2, mat_for, refresh_period
from .cells import CellDesign, default_cell
from .array import max_rows
from .errors import ConstraintError, InfeasibleError, InputDomainError


@dataclass(frozen=True)
class SearchSpace:
    subarrays_x: tuple[int, ...] = (1, 2, 4, 8)
    subarrays_y: tuple[int, ...] = (1, 2, 4, 8)
    mats_per_subarray: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64)
    n_l: tuple[int, ...] = (1, 2)
    topologies: tuple[str, ...] = ("SRAM8T",)
    read_ports: tuple[int, ...] = (1,)

    def __post_init__(self):
        for name in ("subarrays_x", "subarrays_y", "mats_per_subarray",
                     "n_l", "topologies", "read_ports"):
            if not getattr(self, name):
                raise InputDomainError(f"empty axis {name}")

    @property
    def axes(self):
        return (self.topologies, self.read_ports, self.subarrays_x,
                self.subarrays_y, self.mats_per_subarray, self.n_l)

    def size(self) -> int:
        n = 1
        for ax in self.axes:
            n *= len(ax)
        return n


@dataclass(frozen=True)
class Constraint:
    capacity_bytes: int
    w_block: int = 128
    rct_max: float | None = None
    footprint_max: float | None = None

    def __post_init__(self):
        if self.capacity_bytes < 1 or self.w_block < 1:
            raise InputDomainError("capacity and block width must be positive")
        if self.rct_max is not None and self.rct_max <= 0:
            raise InputDomainError("rct_max must be positive when given")
        if self.footprint_max is not None and self.footprint_max <= 0:
            raise InputDomainError("footprint_max must be positive when given")


@dataclass(frozen=True)
class DesignPoint:
    design: BankDesign | None
    ppa: BankPPA | None
    feasible: bool
    reasons: tuple[str, ...]
    topology: str
    n_read: int
    subarrays_x: int
    subarrays_y: int
    mats_per_subarray: int
    n_l: int

    @property
    def key(self):
        return (self.topology, self.n_read, self.subarrays_x, self.subarrays_y,
                self.mats_per_subarray, self.n_l)


def _pow2_floor(n: int) -> int:
    return 1 << (n.bit_length() - 1)


def _mat_geometry_options(topology: str, cells_per_mat_tier: int) -> list[tuple[int, int]]:
    """Candidate (rows, cols) splits, tallest first.

    Tall mats keep the wordline ladder short (fewest columns); shorter
    mats trade bitline load for wordline load, which some topologies need
    to make timing.  The evaluator keeps the first feasible split, so a
    space point maps to exactly one emitted design.
    """
    if cells_per_mat_tier < 1 or cells_per_mat_tier & (cells_per_mat_tier - 1):
        return []
    cap = min(max_rows(topology), _pow2_floor(cells_per_mat_tier))
    opts: list[tuple[int, int]] = []
    rows = cap
    while rows >= 1:
        cols = cells_per_mat_tier // rows
        if cols <= 2048:
            opts.append((rows, cols))
        if rows <= 8 or len(opts) >= 4:
            break
        rows //= 2
    return opts


def evaluate_point(topology: str, n_read: int, sx: int, sy: int, mats: int,
                   n_l: int, constraint: Constraint, ctx: ModelContext,
                   restore_in_rct: bool = False) -> DesignPoint:
    meta = dict(topology=topology, n_read=n_read, subarrays_x=sx, subarrays_y=sy,
                mats_per_subarray=mats, n_l=n_l)
    reasons = []
    try:
        cell = default_cell(topology, n_read)
    except Exception:
        return DesignPoint(None, None, False, ("ports",), **meta)
    if not cell.is_stackable and n_l > 1:
        return DesignPoint(None, None, False, ("stacking",), **meta)

    bits = constraint.capacity_bytes * 8
    denom = sx * sy * mats * n_l
    if bits % denom:
        return DesignPoint(None, None, False, ("geometry",), **meta)
    options = _mat_geometry_options(topology, bits // denom)
    if not options:
        return DesignPoint(None, None, False, ("geometry",), **meta)

    # Sub-bank: one row of subarrays activates; the block must split
    # evenly over them and fit in their columns.
    n_asc, n_asr = sx, 1
    if constraint.w_block % (n_asc * n_asr):
        return DesignPoint(None, None, False, ("block_split",), **meta)

    last_reasons: tuple[str, ...] = ("geometry",)
    fallback: DesignPoint | None = None
    for rows, cols in options:
        try:
            design = BankDesign(mat=mat_for(cell, rows, cols, n_l),
                                mats_per_subarray=mats, subarrays_x=sx, subarrays_y=sy,
                                n_asc=n_asc, n_asr=n_asr, w_block=constraint.w_block)
            ppa = bank_ppa(design, ctx, restore_in_rct=restore_in_rct)
        except ConstraintError as exc:
            last_reasons = ("read_margin",) if "margin" in str(exc) else \
                ("rows",) if "rows" in str(exc) else ("block_split",)
            continue

        reasons = []
        # Destructive-read eDRAM is cycle-limited on reads; the slow
        # restore overlaps other banks, so the cycle bound binds the read.
        rct_binding = ppa.rct_read_cycle if topology.startswith("EDRAM") else ppa.rct
        if constraint.rct_max is not None and rct_binding > constraint.rct_max:
            reasons.append("rct")
        if constraint.footprint_max is not None and ppa.area > constraint.footprint_max:
            reasons.append("footprint")
        pt = DesignPoint(design, ppa, not reasons, tuple(reasons), **meta)
        if pt.feasible:
            return pt
        if fallback is None:
            fallback = pt
    if fallback is not None:
        return fallback
    return DesignPoint(None, None, False, last_reasons, **meta)


def enumerate_designs(space: SearchSpace, constraint: Constraint,
                      ctx: ModelContext | None = None,
                      restore_in_rct: bool = False):
    """Yield one DesignPoint per cartesian-space combination."""
    ctx = ctx or default_context()
    for topology in space.topologies:
        for n_read in space.read_ports:
            for sx in space.subarrays_x:
                for sy in space.subarrays_y:
                    for mats in space.mats_per_subarray:
                        for n_l in space.n_l:
                            yield evaluate_point(topology, n_read, sx, sy, mats,
                                                 n_l, constraint, ctx,
                                                 restore_in_rct=restore_in_rct)


def _point_sort_key(pt: DesignPoint):
    return (pt.ppa.area, pt.ppa.rct, pt.ppa.static_power, pt.key)


def min_area(space: SearchSpace, constraint: Constraint,
             ctx: ModelContext | None = None,
             restore_in_rct: bool = False) -> DesignPoint:
    """Feasible point of least area; deterministic tie-breaking by
    (rct, static power, geometry key)."""
    best = None
    binding: dict[str, int] = {}
    for pt in enumerate_designs(space, constraint, ctx, restore_in_rct):
        if not pt.feasible:
            for r in pt.reasons:
                binding[r] = binding.get(r, 0) + 1
            continue
        if best is None or _point_sort_key(pt) < _point_sort_key(best):
            best = pt
    if best is None:
        raise InfeasibleError(
            "no feasible design in the space; binding constraints: "
            + ", ".join(f"{k}={v}" for k, v in sorted(binding.items())),
            binding=binding,
        )
    return best


# ---------------------------------------------------------------------
# Pareto


PARETO_OBJECTIVES = ("area", "rct", "static_power", "e_access")


def objectives(ppa: BankPPA) -> tuple[float, float, float, float]:
    return (ppa.area, ppa.rct, ppa.static_power, 0.5 * (ppa.e_read + ppa.e_write))


def dominates(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def pareto_front(points: list[DesignPoint]) -> list[DesignPoint]:
    """Non-dominated feasible points under (area, rct, static, access energy)."""
    feas = [(objectives(p.ppa), p) for p in points if p.feasible]
    front = []
    for obj, p in feas:
        if not any(dominates(o2, obj) for o2, _ in feas if o2 != obj):
            front.append(p)
    front.sort(key=_point_sort_key)
    return front


# ---------------------------------------------------------------------
# Studies


@dataclass
class StudyRow:
    topology: str
    n_l: int
    capacity_bytes: int
    density_mb_mm2: float
    rct_ns: float
    area_um2: float
    static_uw: float
    point: DesignPoint = field(repr=False, default=None)


def density_study(capacity_base: int = 65536, n_l_sweep=(1, 2, 4, 8),
                  rct_max: float = 1e-9,
                  topologies=("SRAM6T", "GC_NR1W", "GC_3T0C", "EDRAM_1T1C_VGAA"),
                  ctx: ModelContext | None = None) -> list[StudyRow]:
    """Single-subarray stacking study: capacity grows with the tier count
    at a fixed cycle-time budget; emits the densest feasible design.

    The mat count runs past the bank-space ceiling because a multi-tier
    subarray at fixed cycle time subdivides further than any bank here.
    """
    ctx = ctx or default_context()
    mats_axis = tuple(1 << k for k in range(9))  # 1..256
    rows = []
    for topology in topologies:
        stackable = default_cell(topology).is_stackable
        for n_l in n_l_sweep:
            if n_l > 1 and not stackable:
                continue
            space = SearchSpace(subarrays_x=(1,), subarrays_y=(1,),
                                mats_per_subarray=mats_axis,
                                n_l=(n_l,), topologies=(topology,))
            constraint = Constraint(capacity_bytes=capacity_base * n_l,
                                    w_block=128, rct_max=rct_max)
            best = None
            for pt in enumerate_designs(space, constraint, ctx):
                if not pt.feasible:
                    continue
                d = density_mb_per_mm2(pt.design.capacity_bits, pt.ppa.area)
                if best is None or d > best[0]:
                    best = (d, pt)
            if best is None:
                continue
            d, pt = best
            rows.append(StudyRow(
                topology=topology, n_l=n_l, capacity_bytes=constraint.capacity_bytes,
                density_mb_mm2=d, rct_ns=pt.ppa.rct * 1e9, area_um2=pt.ppa.area * 1e12,
                static_uw=pt.ppa.static_power * 1e6, point=pt))
    return rows


@dataclass
class DistributionRow:
    topology: str
    n_l: int
    metric: str
    minimum: float
    median: float
    maximum: float
    count: int


def bank_distribution_study(capacity: int = 262144, footprint_max: float | None = None,
                            rct_max: float = 1e-9, n_l_sweep=(1, 2, 4, 8),
                            topologies=("SRAM6T", "GC_NR1W", "GC_3T0C", "EDRAM_1T1C_VGAA"),
                            ctx: ModelContext | None = None
                            ) -> tuple[list[DistributionRow], dict]:
    """Distributions of footprint / access time / standby power over the
    feasible bank space per (topology, tier count)."""
    ctx = ctx or default_context()
    out = []
    samples: dict[tuple[str, int], dict[str, list[float]]] = {}
    for topology in topologies:
        stackable = default_cell(topology).is_stackable
        for n_l in n_l_sweep:
            if n_l > 1 and not stackable:
                continue
            space = SearchSpace(n_l=(n_l,), topologies=(topology,))
            constraint = Constraint(capacity_bytes=capacity, w_block=128,
                                    rct_max=rct_max, footprint_max=footprint_max)
            vals = {"area_um2": [], "t_access_ns": [], "static_uw": []}
            for pt in enumerate_designs(space, constraint, ctx):
                if not pt.feasible:
                    continue
                vals["area_um2"].append(pt.ppa.area * 1e12)
                vals["t_access_ns"].append(pt.ppa.t_access * 1e9)
                vals["static_uw"].append(pt.ppa.static_power * 1e6)
            if not vals["area_um2"]:
                continue
            samples[(topology, n_l)] = vals
            for metric, xs in vals.items():
                xs = sorted(xs)
                out.append(DistributionRow(
                    topology=topology, n_l=n_l, metric=metric,
                    minimum=xs[0], median=xs[len(xs) // 2], maximum=xs[-1],
                    count=len(xs)))
    return out, samples


# ---------------------------------------------------------------------
# L2 configuration generation


# Retention windows consistent with the distributed-refresh periods of
# the benchmarked tier counts (64-row mats).
T_RET_L2 = {"GC_NR1W": 0.110, "EDRAM_1T1C_VGAA": 0.125, "EDRAM_1T1C_DG": 0.125}

BASELINE_ROP_LATENCY = 187  # cycles, validated baseline model


@dataclass
class L2ConfigRecord:
    name: str
    mode: str                    # "baseline" | "IB" | "IBC"
    topology: str
    partitions: int
    banks_per_partition: int
    bank_capacity_bytes: int
    n_l: int
    clock_mhz: int
    rop_latency_cycles: int
    refresh_period_s: float | None
    refresh_duration_cycles: int
    area_per_partition_um2: float
    bank: DesignPoint = field(repr=False, default=None)

    @property
    def total_capacity_bytes(self) -> int:
        return self.partitions * self.banks_per_partition * self.bank_capacity_bytes

    def to_json_dict(self) -> dict:
        return {
            "name": self.name, "mode": self.mode, "topology": self.topology,
            "partitions": self.partitions,
            "banks_per_partition": self.banks_per_partition,
            "bank_capacity_bytes": self.bank_capacity_bytes,
            "total_capacity_bytes": self.total_capacity_bytes,
            "n_l": self.n_l, "clock_mhz": self.clock_mhz,
            "rop_latency_cycles": self.rop_latency_cycles,
            "refresh_period_s": self.refresh_period_s,
            "refresh_duration_cycles": self.refresh_duration_cycles,
            "area_per_partition_um2": self.area_per_partition_um2,
            "bank_ppa": ppa_to_dict(self.ppa_of_bank()),
            "bank_geometry": geometry_to_dict(self.bank),
        }

    def ppa_of_bank(self) -> BankPPA:
        return self.bank.ppa


def ppa_to_dict(ppa: BankPPA) -> dict:
    return {
        "area_m2": ppa.area, "t_read_s": ppa.t_read, "t_write_s": ppa.t_write,
        "t_precharge_s": ppa.t_precharge, "t_access_s": ppa.t_access,
        "rct_s": ppa.rct, "static_power_w": ppa.static_power,
        "e_read_j": ppa.e_read, "e_write_j": ppa.e_write,
        "e_refresh_line_j": ppa.e_refresh_line, "bandwidth_bps": ppa.bandwidth,
        "restore_in_rct": ppa.restore_in_rct,
    }


def geometry_to_dict(pt: DesignPoint) -> dict:
    d = pt.design
    return {
        "topology": pt.topology, "n_read": pt.n_read,
        "rows": d.mat.rows, "cols": d.mat.cols, "n_l": d.mat.n_l,
        "mats_per_subarray": d.mats_per_subarray,
        "subarrays_x": d.subarrays_x, "subarrays_y": d.subarrays_y,
        "n_asc": d.n_asc, "n_asr": d.n_asr,
        "w_block": d.w_block, "capacity_bytes": d.capacity_bytes,
    }


def _clock_mhz(rct: float) -> int:
    return int(math.floor(1.0 / rct / 1e6))

def _refresh_duration_cycles(topology: str) -> int:
    # Split read/write wordlines take a two-cycle refresh; a shared
    # 1T1C wordline refreshes in one.
    return 2 if topology.startswith("GC") else 1


def _best_bank(topology: str, capacity: int, rct_max: float, n_l: int,
               ctx: ModelContext) -> DesignPoint:
    space = SearchSpace(n_l=(n_l,), topologies=(topology,))
    constraint = Constraint(capacity_bytes=capacity, w_block=256, rct_max=rct_max)
    return min_area(space, constraint, ctx)


def generate_l2_configs(mode: str, topology: str,
                        footprint_per_partition: float = 200_000e-12,
                        baseline_banks: int = 2, partitions: int = 8,
                        baseline_bank_capacity: int = 262144,
                        rct_max: float = 1e-9, max_n_l: int = 8,
                        ctx: ModelContext | None = None) -> L2ConfigRecord:
    """One L2 configuration per the stacking strategy.

    ``IB`` keeps the bank count and grows per-bank capacity with tiers
    until nothing fits the partition footprint; ``IBC`` keeps the bank
    capacity and raises the bank count (power-of-two interleaving) within
    the footprint.  ``baseline`` is the single-tier SRAM reference.
    """
    ctx = ctx or default_context()
    if mode == "baseline":
        pt = _best_bank("SRAM6T", baseline_bank_capacity, rct_max, 1, ctx)
        return _record("sram_baseline", "baseline", "SRAM6T", partitions,
                       baseline_banks, pt, ctx)

    if mode == "IB":
        best = None
        for n_l in range(2, max_n_l + 1):
            capacity = baseline_bank_capacity * n_l
            try:
                pt = _best_bank(topology, capacity, rct_max, n_l, ctx)
            except InfeasibleError:
                break
            if baseline_banks * pt.ppa.area > footprint_per_partition:
                break
            best = pt
        if best is None:
            raise InfeasibleError(f"no IB configuration fits for {topology}")
        name = f"{_short(topology)}_ib"
        return _record(name, "IB", topology, partitions, baseline_banks, best, ctx)

    if mode == "IBC":
        n_l = max_n_l
        pt = None
        while n_l >= 2:
            try:
                pt = _best_bank(topology, baseline_bank_capacity, rct_max, n_l, ctx)
                break
            except InfeasibleError:
                n_l //= 2
        if pt is None:
            raise InfeasibleError(f"no IBC configuration fits for {topology}")
        n_banks = int(footprint_per_partition / pt.ppa.area)
        n_banks = max(1, _pow2_floor(n_banks))
        name = f"{_short(topology)}_ibc"
        return _record(name, "IBC", topology, partitions, n_banks, pt, ctx)

    raise InputDomainError(f"unknown mode {mode!r}; expected baseline/IB/IBC")


def _short(topology: str) -> str:
    return {"GC_NR1W": "2t0c", "GC_3T0C": "3t0c",
            "EDRAM_1T1C_VGAA": "1t1c", "EDRAM_1T1C_DG": "1t1c_dg",
            "SRAM6T": "sram", "SRAM8T": "sram8t"}.get(topology, topology.lower())


def _record(name: str, mode: str, topology: str, partitions: int, banks: int,
            pt: DesignPoint, ctx: ModelContext) -> L2ConfigRecord:
    clock = _clock_mhz(pt.ppa.rct)
    t_ret = T_RET_L2.get(topology)
    period = refresh_period(t_ret, pt.design.mat.rows, pt.design.mat.n_l) \
        if t_ret is not None else None
    baseline_access = None
    # ROP latency: local access-time delta in cycles against the SRAM baseline
    sram_pt = _best_bank("SRAM6T", pt.design.capacity_bytes if mode == "baseline"
                         else 262144, 1e-9, 1, ctx)
    baseline_access = sram_pt.ppa.t_access
    delta = int(round((pt.ppa.t_access - baseline_access) * clock * 1e6))
    return L2ConfigRecord(
        name=name, mode=mode, topology=topology, partitions=partitions,
        banks_per_partition=banks, bank_capacity_bytes=pt.design.capacity_bytes,
        n_l=pt.design.mat.n_l, clock_mhz=clock,
        rop_latency_cycles=BASELINE_ROP_LATENCY + delta,
        refresh_period_s=period,
        refresh_duration_cycles=_refresh_duration_cycles(topology),
        area_per_partition_um2=banks * pt.ppa.area * 1e12,
        bank=pt,
    )


def write_l2_configs(records: list[L2ConfigRecord], path) -> None:
    data = {rec.name: rec.to_json_dict() for rec in records}
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
