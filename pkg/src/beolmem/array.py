"""Array-level feasibility: gain-cell read transients under IR drop and
sneak paths, 1T1C read-margin budgets, and the 3T0C speed/leakage sweep.

The gain-cell read is modeled on the worst-case column: the selected
read wordline is an n_col-segment resistive ladder to its sink driver
(every column injects the same cell current under a column-uniform data
pattern, so the far cell sees the full divider), and every unselected
row storing '1' contributes a reverse-biased read device from the read
bitline to its wordline held at V_dd.  The bitline is integrated with a
fixed explicit step; the ladder is quasi-static and solved per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cells import CellDesign, CellModelParams
from .config import Config, load_config
from .device import LN10, DeviceParams, drain_current
from .errors import CapabilityError, InfeasibleError, InputDomainError, StepSizeError

DEFAULT_ROW_CAP = 128


@dataclass(frozen=True)
class ArrayModelParams:
    """Wire and loading defaults. Calibration knobs, not ground truth."""

    wire_r_per_cell: float = 20.0        # ohm per wordline segment
    wire_c_per_cell: float = 0.05e-15    # F per bitline segment
    drain_load_per_w_gc: float = 0.6e-9      # F/m of read-device width
    drain_load_per_w_edram: float = 1.35e-9  # F/m of access-device width
    drain_load_per_w_sram: float = 0.25e-9   # F/m
    v_sn_one: float = 0.5                # stored-'1' level on the storage node
    v_sn_zero: float = 0.0


def array_model_from_config(cfg: Config | None = None) -> ArrayModelParams:
    cfg = cfg or load_config()
    sec = "array"
    d = ArrayModelParams()
    if sec not in cfg.sections:
        return d
    return ArrayModelParams(
        wire_r_per_cell=cfg.get(sec, "wire_r_per_cell", "ohm", d.wire_r_per_cell),
        wire_c_per_cell=cfg.get(sec, "wire_c_per_cell", "F", d.wire_c_per_cell),
        drain_load_per_w_gc=cfg.get(sec, "drain_load_per_w_gc", "F/m", d.drain_load_per_w_gc),
        drain_load_per_w_edram=cfg.get(sec, "drain_load_per_w_edram", "F/m", d.drain_load_per_w_edram),
        drain_load_per_w_sram=cfg.get(sec, "drain_load_per_w_sram", "F/m", d.drain_load_per_w_sram),
        v_sn_one=cfg.get(sec, "v_sn_one", "V", d.v_sn_one),
        v_sn_zero=cfg.get(sec, "v_sn_zero", "V", d.v_sn_zero),
    )


def drain_load_per_w(topology: str, params: ArrayModelParams | None = None) -> float:
    p = params or ArrayModelParams()
    if topology.startswith("GC"):
        return p.drain_load_per_w_gc
    if topology.startswith("EDRAM"):
        return p.drain_load_per_w_edram
    return p.drain_load_per_w_sram


@dataclass(frozen=True)
class ArrayConfig:
    topology: str
    n_row: int
    n_col: int
    folded_bitline: bool = False
    v_precharge: float = 0.75
    wire_r_per_cell: float = 20.0
    wire_c_per_cell: float = 0.05e-15
    cell_drain_c: float = 0.09e-15   # read-port drain parasitic per cell on the RBL

    def __post_init__(self):
        if self.n_row < 1 or self.n_col < 1:
            raise InputDomainError("need n_row, n_col >= 1")

    @property
    def c_rbl(self) -> float:
        return self.n_row * (self.wire_c_per_cell + self.cell_drain_c)


def array_for_cell(cell: CellDesign, n_row: int, n_col: int,
                   params: ArrayModelParams | None = None,
                   folded: bool = False) -> ArrayConfig:
    """ArrayConfig with per-cell loads derived from the cell's read width."""
    p = params or ArrayModelParams()
    w = cell.w_wa if cell.topology.startswith("EDRAM") else cell.w_ra
    return ArrayConfig(
        topology=cell.topology,
        n_row=n_row,
        n_col=n_col,
        folded_bitline=folded,
        v_precharge=cell.v_dd,
        wire_r_per_cell=p.wire_r_per_cell,
        wire_c_per_cell=p.wire_c_per_cell,
        cell_drain_c=drain_load_per_w(cell.topology, p) * w,
    )


@dataclass
class ReadTransient:
    """Read-margin trajectory RM(t) = V_RBL|SN=0 - V_RBL|SN=1."""

    time_grid: np.ndarray
    rm_curve: np.ndarray
    rm_peak: float
    t_rm_saturate: float
    t_cross_200mv: float | None
    v_rbl_one: np.ndarray = field(repr=False, default=None)
    v_rbl_zero: np.ndarray = field(repr=False, default=None)


def max_rows(topology: str, folded: bool = False, default_cap: int = DEFAULT_ROW_CAP) -> int:
    """Hard row ceiling per topology (sneak-path / margin bound)."""
    if topology == "GC_NR1W":
        return 128 if folded else 64
    if topology.startswith("EDRAM"):
        return 64
    return default_cap


def _scalar_current_fn(dev: DeviceParams):
    """Closure evaluating the device I-V with plain math (fast scalar path)."""
    v_slope = dev.ss / LN10
    v_t = dev.v_t
    a = 4.0 * dev.k_drive * dev.w * v_slope * v_slope

    def cur(v_gs: float, v_ds: float) -> float:
        sign = 1.0
        if v_ds < 0.0:
            v_gs = v_gs - v_ds
            v_ds = -v_ds
            sign = -1.0
        x = (v_gs - v_t) / (2.0 * v_slope)
        s = x if x > 34.0 else math.log1p(math.exp(x)) if x > -34.0 else math.exp(x)
        v_dsat = v_slope * (2.0 * s + 1.0)
        return sign * a * s * s * (-math.expm1(-v_ds / v_dsat))

    return cur


def _resolve_pattern(pattern, n_row: int) -> np.ndarray:
    if isinstance(pattern, str):
        if pattern == "all_ones":
            return np.ones(n_row, dtype=bool)
        if pattern == "all_zeros":
            return np.zeros(n_row, dtype=bool)
        raise InputDomainError(f"unknown pattern {pattern!r}")
    bits = np.asarray(pattern, dtype=bool)
    if bits.shape != (n_row,):
        raise InputDomainError(f"bitmap must have length n_row={n_row}")
    return bits


def simulate_read_transient(arr: ArrayConfig, cell: CellDesign, dev: DeviceParams,
                            pattern="all_ones", dt: float = 1e-12,
                            t_end: float = 50e-9, rm_threshold: float = 0.2,
                            params: ArrayModelParams | None = None,
                            sneak_enabled: bool = True) -> ReadTransient:
    """Integrate the worst-column RBL for selected SN=1 and SN=0.

    ``pattern`` gives the stored bits per row (row 0 is the selected row;
    its bit is overridden by the two cases).  Fixed explicit stepping with
    a 5 %-of-V_dd per-step guard; the selected-wordline IR ladder is
    solved quasi-statically each step by bisection.
    """
    if arr.topology != "GC_NR1W":
        raise CapabilityError("read transient models the NR1W gain cell")
    if dt <= 0:
        raise InputDomainError("dt must be positive")
    p = params or ArrayModelParams()
    bits = _resolve_pattern(pattern, arr.n_row)
    n_ones_unsel = int(np.count_nonzero(bits[1:]))
    n_zeros_unsel = arr.n_row - 1 - n_ones_unsel

    cur = _scalar_current_fn(dev.with_width(cell.w_ra))
    v_dd = cell.v_dd
    c_rbl = arr.c_rbl
    # Far-end divider constant: every column injects the same current, so
    # the worst cell sees r * n (n + 1) / 2 of accumulated drop.
    k_ir = arr.wire_r_per_cell * arr.n_col * (arr.n_col + 1) / 2.0
    guard = 0.05 * v_dd

    def ladder_voltage(v_sn: float, v_rbl: float) -> float:
        """Solve V_w = K * I_sel(V_w); I_sel decreasing in V_w -> unique root."""
        if v_rbl <= 0.0:
            return 0.0
        lo, hi = 0.0, v_rbl
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if k_ir * cur(v_sn - mid, v_rbl - mid) > mid:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def step_current(v_sn: float, v_rbl: float) -> float:
        """Net current out of the RBL (positive discharges it)."""
        v_w = ladder_voltage(v_sn, v_rbl)
        i_sel = cur(v_sn - v_w, v_rbl - v_w)
        i_up = 0.0
        if sneak_enabled:
            if n_ones_unsel:
                i_up += n_ones_unsel * cur(p.v_sn_one - v_rbl, v_dd - v_rbl)
            if n_zeros_unsel:
                i_up += n_zeros_unsel * cur(p.v_sn_zero - v_rbl, v_dd - v_rbl)
        return i_sel - i_up

    n_steps = int(round(t_end / dt))
    time_grid = np.arange(n_steps + 1) * dt
    v1 = np.empty(n_steps + 1)
    v0 = np.empty(n_steps + 1)
    v1[0] = v0[0] = arr.v_precharge
    for k in range(n_steps):
        d1 = dt * step_current(p.v_sn_one, v1[k]) / c_rbl
        d0 = dt * step_current(p.v_sn_zero, v0[k]) / c_rbl
        if abs(d1) > guard or abs(d0) > guard:
            raise StepSizeError(
                f"state change {max(abs(d1), abs(d0)):.3g} V exceeds 5% of "
                f"V_dd in one step at t={k * dt:.3g} s; reduce dt"
            )
        v1[k + 1] = v1[k] - d1
        v0[k + 1] = v0[k] - d0

    rm = v0 - v1
    rm_peak = float(rm.max())
    i_sat = int(np.argmax(rm >= 0.99 * rm_peak))
    crossed = np.nonzero(rm >= rm_threshold)[0]
    t_cross = float(time_grid[crossed[0]]) if crossed.size else None
    return ReadTransient(
        time_grid=time_grid,
        rm_curve=rm,
        rm_peak=rm_peak,
        t_rm_saturate=float(time_grid[i_sat]),
        t_cross_200mv=t_cross,
        v_rbl_one=v1,
        v_rbl_zero=v0,
    )


# ---------------------------------------------------------------------
# 1T1C budgets


@dataclass(frozen=True)
class BitlineBudget1T1C:
    c_bl: float
    c_sn: float
    v_dd: float
    i_leak: float = 0.0
    t_ret: float = 0.0

    def __post_init__(self):
        if self.c_sn <= 0:
            raise InputDomainError("c_sn must be positive")
        if min(self.c_bl, self.v_dd, self.i_leak, self.t_ret) < 0:
            raise InputDomainError("budget fields must be non-negative")


def read_margin_1t1c(b: BitlineBudget1T1C) -> float:
    """Charge-share read margin; negative means retention failure.

    dV_BL = (1 / (1 + C_BL/C_SN)) * (V_dd/2 - I_leak * t_ret / C_SN)
    """
    return (1.0 / (1.0 + b.c_bl / b.c_sn)) * (0.5 * b.v_dd - b.i_leak * b.t_ret / b.c_sn)


def min_csn_1t1c(n_row: int, w_access: float, v_dd: float, t_ret: float,
                 dev: DeviceParams, rm_target: float = 0.1,
                 v_hold: float = -0.3,
                 params: ArrayModelParams | None = None,
                 c_sn_cap: float = 1e-12) -> float:
    """Smallest storage capacitance meeting the read-margin target.

    The bitline load is n_row * (wire + access-device loading), so the
    result grows with both the row count and the access width.  Monotone
    bisection to 2 % (the returned value passes, 0.95x of it fails).
    """
    p = params or ArrayModelParams()
    c_bl = n_row * (p.wire_c_per_cell + p.drain_load_per_w_edram * w_access)
    i_leak = abs(drain_current(dev.with_width(w_access), v_hold, 0.5 * v_dd))

    def margin(c_sn: float) -> float:
        return read_margin_1t1c(BitlineBudget1T1C(c_bl, c_sn, v_dd, i_leak, t_ret))

    if margin(c_sn_cap) < rm_target:
        raise InfeasibleError(
            f"no C_SN <= {c_sn_cap:.3g} F reaches {rm_target:.3g} V margin "
            f"(C_BL = {c_bl:.3g} F, leak loss = {i_leak * t_ret:.3g} C)",
            binding={"read_margin": 1},
        )
    lo, hi = 1e-18, c_sn_cap
    while hi / lo > 1.02:
        mid = math.sqrt(lo * hi)
        if margin(mid) >= rm_target:
            hi = mid
        else:
            lo = mid
    return hi


def access_time_1t1c(c_sn: float, dev: DeviceParams, v_cc: float = 0.75,
                     wl_boost: float | None = None,
                     v_margin: float | None = None,
                     cell_params: CellModelParams | None = None) -> float:
    """Charge time through the access device to within the settle band.

    The wordline is boosted above V_cc (standard practice for a pass-
    device write); integration runs from 0 to V_cc minus the band.
    """
    from .cells import charge_time

    p = cell_params or CellModelParams()
    boost = p.wl_boost_1t1c if wl_boost is None else wl_boost
    margin = p.v_write_margin if v_margin is None else v_margin
    v_wl = v_cc + boost

    def current(v):
        return drain_current(dev, v_wl - v, v_cc - v)

    return charge_time(c_sn, current, 0.0, v_cc - margin)


# ---------------------------------------------------------------------
# 3T0C read stack: speed vs leakage


def _stack_current(cur_gate, cur_inner, v_drive: float, v_sn: float, v_rbl: float) -> float:
    """Series 2T stack current: gating device (RBL side) + inner device."""
    lo, hi = 0.0, v_rbl
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        i_gate = cur_gate(v_drive - mid, v_rbl - mid)
        i_inner = cur_inner(v_sn, mid)
        if i_inner > i_gate:
            hi = mid
        else:
            lo = mid
    mid = 0.5 * (lo + hi)
    return cur_inner(v_sn, mid)


def tradeoff_3t0c(dev_pair: tuple[DeviceParams, DeviceParams], arr: ArrayConfig,
                  v_t_sweep, v_dd: float = 0.75, v_sn_one: float = 0.5,
                  sense_swing: float = 0.2, n_points: int = 64) -> list[tuple[float, float]]:
    """(read_time, off_state_port_current) per gating-device threshold.

    Lowering the gating threshold speeds the RBL discharge and raises the
    off-state leakage roughly tenfold per swing-decade.  ``dev_pair`` is
    (inner storage-gated device, RBL-side gating device).
    """
    dev_inner, dev_gate = dev_pair
    c_rbl = arr.c_rbl
    out = []
    for v_t in v_t_sweep:
        gate = dev_gate.with_vt(float(v_t))
        cur_gate = _scalar_current_fn(gate)
        cur_inner = _scalar_current_fn(dev_inner)
        # Quasi-static discharge integral over the sensed swing.
        vs = np.linspace(arr.v_precharge, arr.v_precharge - sense_swing, n_points + 1)
        times = 0.0
        for a, b in zip(vs[:-1], vs[1:]):
            vm = 0.5 * (a + b)
            i = _stack_current(cur_gate, cur_inner, v_dd, v_sn_one, vm)
            if i <= 0:
                times = math.inf
                break
            times += c_rbl * (a - b) / i
        leak = drain_current(gate, 0.0, v_dd)
        out.append((times, leak))
    return out
