"""Mat / subarray / bank composition: area, timing, energy, standby power.

A mat is an array of cells plus local periphery (decoders, wordline
drivers and level shifters, sense amps, write drivers, per-tier
transmission gates for the stacked-tier decode, bitline tier muxes).
For BEOL cell arrays the FEOL periphery tucks under the array, so the
mat footprint is max(array tier footprint, periphery area); SRAM arrays
are FEOL and add the two.  Banks tile subarrays of mats and route them
over an H-tree.

Peripheral sizes are expressed on the CPP x fin-pitch placement grid
with shipped constants calibrated once against macro-level reference
points (a 256 kB SRAM bank near 80,000 um2, multi-tier subarray
densities of the BEOL candidates).  Absolute outputs are calibrated
reproduction, not first-principles prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .array import ArrayModelParams, BitlineBudget1T1C, access_time_1t1c, array_for_cell, \
    drain_load_per_w, max_rows, read_margin_1t1c, _scalar_current_fn
from .cells import CellDesign, CellModelParams, cell_footprint, cell_static_power, \
    storage_node_capacitance, write_time
from .config import Config, load_config
from .device import DeviceParams, DeviceSet, TechnologyRules, default_devices, drain_current, \
    gate_capacitance, technology_from_config
from .errors import ConstraintError, InputDomainError


@dataclass(frozen=True)
class BankModelParams:
    """Peripheral area/timing/energy constants (calibration knobs)."""

    # areas, in CPP x fin-pitch grid units
    a_sense: float = 320.0
    se_sense_factor: float = 1.6       # single-ended SA penalty (GC/eDRAM)
    a_write_driver: float = 100.0
    a_precharge: float = 30.0
    a_col_mux: float = 8.0             # per column per port, ahead of the SA
    col_mux_degree: int = 4            # bitlines shared per sense amp
    a_bl_mux_per_tier: float = 64.0
    c_tier_stub: float = 0.6e-15       # F per tier: off-state tier-gate load
                                       # on the bitline shared by the FEOL SA
    c_tier_stub_vgaa: float = 0.15e-15  # F per tier: pillar-shared bitline
    c_wl_vgaa: float = 0.10e-15        # F per cell: vertical-channel WL load
    a_drv_base: float = 40.0
    a_drv_per_ff: float = 4.5          # driver grids per fF of wordline load
    a_ls_base: float = 60.0            # level shifter per boosted wordline
    ls_driver_frac: float = 0.5
    tg_driver_frac: float = 0.35       # per-tier transmission gate vs driver
    a_ctrl: float = 600.0
    a_dec_per_bit: float = 80.0
    a_subarray_dec: float = 1200.0
    htree_frac_per_level: float = 0.03
    periph_mult_sram: float = 3.7
    periph_mult_gc: float = 1.0
    periph_mult_3t0c: float = 1.0
    periph_mult_edram: float = 1.08
    leak_per_area: float = 235.0       # W per m^2 of periphery
    # timing
    tau_fo4: float = 12e-12
    tau_dec: float = 25e-12
    tau_sense: float = 50e-12
    tau_buf: float = 25e-12
    tau_3d_per_step: float = 15e-12
    tau_pre_base: float = 30e-12
    i_precharge: float = 3e-4
    boosted_delay_factor: float = 1.5
    c_gate_ref: float = 2e-15
    r_wire_per_m: float = 1.5e6
    c_wire_per_m: float = 2.0e-10
    # energy
    e_dec_base: float = 5e-15
    e_sense_per_col: float = 2e-15
    disturb_swing: float = 0.05
    # cell read currents / swings
    w_sram_pass: float = 54e-9
    w_sram_read: float = 107e-9
    sram_stack_factor: float = 0.5
    restore_swing: float = 0.3


_F = ("a_sense", "se_sense_factor", "a_write_driver", "a_precharge", "a_col_mux",
      "a_bl_mux_per_tier",
      "a_drv_base", "a_drv_per_ff", "a_ls_base", "ls_driver_frac", "tg_driver_frac",
      "a_ctrl", "a_dec_per_bit", "a_subarray_dec", "htree_frac_per_level",
      "periph_mult_sram", "periph_mult_gc", "periph_mult_3t0c", "periph_mult_edram",
      "leak_per_area", "boosted_delay_factor", "sram_stack_factor", "restore_swing",
      "disturb_swing")
_F_TIMES = ("tau_fo4", "tau_dec", "tau_sense", "tau_buf", "tau_3d_per_step", "tau_pre_base")


def bank_model_from_config(cfg: Config | None = None) -> BankModelParams:
    cfg = cfg or load_config()
    sec = "bank.model"
    d = BankModelParams()
    if sec not in cfg.sections:
        return d
    kw = {}
    for name in _F:
        kw[name] = cfg.get(sec, name, "1", getattr(d, name))
    for name in _F_TIMES:
        kw[name] = cfg.get(sec, name, "s", getattr(d, name))
    kw["col_mux_degree"] = cfg.get_int(sec, "col_mux_degree", d.col_mux_degree)
    kw["c_tier_stub"] = cfg.get(sec, "c_tier_stub", "F", d.c_tier_stub)
    kw["c_tier_stub_vgaa"] = cfg.get(sec, "c_tier_stub_vgaa", "F", d.c_tier_stub_vgaa)
    kw["c_wl_vgaa"] = cfg.get(sec, "c_wl_vgaa", "F", d.c_wl_vgaa)
    kw["i_precharge"] = cfg.get(sec, "i_precharge", "A", d.i_precharge)
    kw["c_gate_ref"] = cfg.get(sec, "c_gate_ref", "F", d.c_gate_ref)
    kw["r_wire_per_m"] = cfg.get(sec, "r_wire_per_m", "1", d.r_wire_per_m)
    kw["c_wire_per_m"] = cfg.get(sec, "c_wire_per_m", "1", d.c_wire_per_m)
    kw["e_dec_base"] = cfg.get(sec, "e_dec_base", "1", d.e_dec_base)
    kw["e_sense_per_col"] = cfg.get(sec, "e_sense_per_col", "1", d.e_sense_per_col)
    kw["w_sram_pass"] = cfg.get(sec, "w_sram_pass", "m", d.w_sram_pass)
    kw["w_sram_read"] = cfg.get(sec, "w_sram_read", "m", d.w_sram_read)
    return BankModelParams(**kw)


@dataclass(frozen=True)
class ModelContext:
    """Everything the PPA evaluation needs, bundled."""

    devs: DeviceSet
    rules: TechnologyRules
    cell_params: CellModelParams
    array_params: ArrayModelParams
    bank_params: BankModelParams


def default_context(cfg: Config | None = None) -> ModelContext:
    from .cells import cell_model_from_config
    from .array import array_model_from_config

    cfg = cfg or load_config()
    return ModelContext(
        devs=default_devices(cfg),
        rules=technology_from_config(cfg),
        cell_params=cell_model_from_config(cfg),
        array_params=array_model_from_config(cfg),
        bank_params=bank_model_from_config(cfg),
    )


@dataclass(frozen=True)
class MatDesign:
    rows: int
    cols: int
    n_l: int
    cell: CellDesign
    has_level_shifters: bool = True
    sense_threshold: float = 0.1

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.n_l < 1:
            raise InputDomainError("rows, cols, n_l must be >= 1")
        if not self.cell.is_stackable and self.n_l > 1:
            raise ConstraintError(f"{self.cell.topology} arrays do not stack")

    @property
    def bits(self) -> int:
        return self.rows * self.cols * self.n_l


def mat_for(cell: CellDesign, rows: int, cols: int, n_l: int = 1,
            sense_threshold: float = 0.1) -> MatDesign:
    needs_ls = abs(cell.v_hold) > 0 or cell.v_boost > cell.v_dd
    return MatDesign(rows=rows, cols=cols, n_l=n_l, cell=cell,
                     has_level_shifters=needs_ls, sense_threshold=sense_threshold)


@dataclass(frozen=True)
class MatPPA:
    area: float
    area_array: float
    area_periph: float
    t_dec: float
    t_wl: float
    t_cell_read: float
    t_sense: float
    t_3d: float
    t_read: float
    t_restore: float
    t_write: float
    t_precharge: float
    e_read_items: dict
    e_write_items: dict
    e_refresh_line: float
    static_power: float

    @property
    def e_read(self) -> float:
        return sum(self.e_read_items.values())

    @property
    def e_write(self) -> float:
        return sum(self.e_write_items.values())


def _periph_mult(topology: str, p: BankModelParams) -> float:
    if topology in ("SRAM6T", "SRAM8T", "SRAM_MP"):
        return p.periph_mult_sram
    if topology == "GC_NR1W":
        return p.periph_mult_gc
    if topology == "GC_3T0C":
        return p.periph_mult_3t0c
    return p.periph_mult_edram


def _wordline_systems(mat: MatDesign, ctx: ModelContext) -> list[dict]:
    """Per-row wordline systems: load per cell, swing, role."""
    cell = mat.cell
    devs = ctx.devs
    p = ctx.bank_params
    topo = cell.topology
    v_dd = cell.v_dd
    out = []
    if topo in ("SRAM6T", "SRAM8T", "SRAM_MP"):
        c_pass = gate_capacitance(devs.si_nfet.with_width(p.w_sram_pass))
        n_r, n_w = cell.ports.n_read, cell.ports.n_write
        # write wordlines drive two pass gates per cell, read wordlines one
        for _ in range(max(n_w, 1)):
            out.append(dict(load=2 * c_pass, swing=v_dd, role="write"))
        for _ in range(n_r):
            out.append(dict(load=c_pass, swing=v_dd, role="read"))
        return out
    if topo == "GC_NR1W":
        c_wwl = gate_capacitance(devs.aos_write.with_width(cell.w_wa))
        out.append(dict(load=c_wwl, swing=cell.v_boost - cell.v_hold, role="write"))
        c_rwl = drain_load_per_w(topo, ctx.array_params) * cell.w_ra
        for _ in range(cell.ports.n_read):
            out.append(dict(load=c_rwl, swing=v_dd, role="read"))
        return out
    if topo == "GC_3T0C":
        c_wwl = gate_capacitance(devs.aos_write.with_width(cell.w_wa))
        out.append(dict(load=c_wwl, swing=cell.v_boost - cell.v_hold, role="write"))
        # read wordline lands on the gating-device gate: capacitive load
        c_rwl = gate_capacitance(devs.aos_read.with_width(cell.w_rg))
        out.append(dict(load=c_rwl, swing=v_dd, role="read"))
        return out
    # 1T1C: a single boosted wordline serves read, restore and write.
    # The vertical-channel variant presents a small fixed per-cell load;
    # the planar double-gated access couples its full gate.
    if topo == "EDRAM_1T1C_VGAA":
        c_wl = p.c_wl_vgaa
    else:
        c_wl = gate_capacitance(devs.aos_write.with_width(cell.w_wa))
    swing = (cell.v_dd + ctx.cell_params.wl_boost_1t1c) - cell.v_hold
    out.append(dict(load=c_wl, swing=swing, role="rw"))
    return out


def _driver_grids(c_load: float, swing: float, v_dd: float, p: BankModelParams) -> float:
    return p.a_drv_base + p.a_drv_per_ff * (c_load * 1e15) * (swing / v_dd)


def _wl_delay(c_load: float, swing: float, v_dd: float, rows_rc: float,
              p: BankModelParams) -> float:
    stages = max(1.0, math.log(max(c_load / p.c_gate_ref, 1.001), 4))
    factor = p.boosted_delay_factor if swing > v_dd * 1.05 else 1.0
    return p.tau_fo4 * stages * factor + rows_rc


def _col_ports(cell: CellDesign) -> tuple[int, int]:
    """(read bitline systems, write bitline systems) per column."""
    topo = cell.topology
    if topo == "SRAM6T":
        return 1, 1  # shared differential pair
    if topo in ("SRAM8T", "SRAM_MP"):
        return max(cell.ports.n_read, 1), max(cell.ports.n_write, 1)
    if topo in ("GC_NR1W", "GC_3T0C"):
        return cell.ports.n_read, 1
    return 1, 0  # 1T1C shares one bitline; restore uses the sense path


def _gc_read_time(mat: MatDesign, ctx: ModelContext) -> float:
    """Worst-case (all-'1's column pattern) margin development time.

    Quasi-static voltage-stepped integral with the same ladder/sneak
    current model the transient integrator uses.  Returns inf when the
    sneak floor prevents the margin from developing.
    """
    cell = mat.cell
    arr = array_for_cell(cell, mat.rows, mat.cols, ctx.array_params)
    ap = ctx.array_params
    cur = _scalar_current_fn(ctx.devs.aos_read.with_width(cell.w_ra))
    v_dd = cell.v_dd
    k_ir = arr.wire_r_per_cell * arr.n_col * (arr.n_col + 1) / 2.0
    n_ones = arr.n_row - 1
    c_rbl = arr.c_rbl + mat.n_l * ctx.bank_params.c_tier_stub
    swing = 2.0 * mat.sense_threshold

    def net(v_rbl: float) -> float:
        lo, hi = 0.0, v_rbl
        for _ in range(36):
            mid = 0.5 * (lo + hi)
            if k_ir * cur(ap.v_sn_one - mid, v_rbl - mid) > mid:
                lo = mid
            else:
                hi = mid
        v_w = 0.5 * (lo + hi)
        i_sel = cur(ap.v_sn_one - v_w, v_rbl - v_w)
        i_up = n_ones * cur(ap.v_sn_one - v_rbl, v_dd - v_rbl)
        return i_sel - i_up

    n = 48
    t = 0.0
    for k in range(n):
        v = arr.v_precharge - swing * (k + 0.5) / n
        i = net(v)
        if i <= 0.0:
            return math.inf
        t += c_rbl * (swing / n) / i
    return t


def _3t0c_read_time(mat: MatDesign, ctx: ModelContext) -> float:
    from .array import _stack_current

    cell = mat.cell
    arr = array_for_cell(cell, mat.rows, mat.cols, ctx.array_params)
    gate_dev = ctx.devs.aos_read.with_vt(ctx.cell_params.v_t_read_3t0c)
    cur_gate = _scalar_current_fn(gate_dev.with_width(cell.w_rg))
    cur_inner = _scalar_current_fn(ctx.devs.aos_read.with_width(cell.w_ra))
    swing = 2.0 * mat.sense_threshold
    c_rbl = arr.c_rbl + mat.n_l * ctx.bank_params.c_tier_stub
    n = 32
    t = 0.0
    for k in range(n):
        v = arr.v_precharge - swing * (k + 0.5) / n
        i = _stack_current(cur_gate, cur_inner, cell.v_dd, ctx.array_params.v_sn_one, v)
        if i <= 0.0:
            return math.inf
        t += c_rbl * (swing / n) / i
    return t


def _sram_read_time(mat: MatDesign, ctx: ModelContext) -> float:
    cell = mat.cell
    p = ctx.bank_params
    arr = array_for_cell(cell, mat.rows, mat.cols, ctx.array_params)
    i_cell = p.sram_stack_factor * drain_current(
        ctx.devs.si_nfet.with_width(p.w_sram_read), cell.v_dd, 0.5 * cell.v_dd)
    return arr.c_rbl * mat.sense_threshold / i_cell


def _tier_stub(topology: str, p: BankModelParams) -> float:
    return p.c_tier_stub_vgaa if topology == "EDRAM_1T1C_VGAA" else p.c_tier_stub


def _1t1c_access_device(cell: CellDesign, ctx: ModelContext) -> DeviceParams:
    return ctx.devs.aos_write.with_vt(ctx.cell_params.v_t_access_1t1c).with_width(cell.w_wa)


def _1t1c_read(mat: MatDesign, ctx: ModelContext) -> tuple[float, float]:
    """(charge-share settle time, read margin). Margin < threshold -> infeasible."""
    cell = mat.cell
    ap = ctx.array_params
    access = _1t1c_access_device(cell, ctx)
    c_bl = mat.rows * (ap.wire_c_per_cell + ap.drain_load_per_w_edram * cell.w_wa) \
        + mat.n_l * _tier_stub(cell.topology, ctx.bank_params)
    c_sn = storage_node_capacitance(cell, ctx.devs.aos_read, ctx.cell_params)
    i_leak = abs(drain_current(access, cell.v_hold, 0.5 * cell.v_dd))
    rm = read_margin_1t1c(BitlineBudget1T1C(c_bl, c_sn, cell.v_dd, i_leak,
                                            cell.t_ret_target))
    v_wl = cell.v_dd + ctx.cell_params.wl_boost_1t1c
    i_on = drain_current(access, v_wl - 0.5 * cell.v_dd, 0.25 * cell.v_dd)
    c_ser = c_bl * c_sn / (c_bl + c_sn)
    t_cs = c_ser * 0.5 * cell.v_dd / i_on
    return t_cs, rm


@lru_cache(maxsize=65536)
def _mat_ppa_cached(mat: MatDesign, ctx: ModelContext) -> MatPPA:
    cell = mat.cell
    p = ctx.bank_params
    topo = cell.topology
    v_dd = cell.v_dd
    grid = ctx.rules.grid_area
    cap = max_rows(topo, folded=False)
    if mat.rows > cap:
        raise ConstraintError(f"rows={mat.rows} exceeds max_rows({topo})={cap}")

    a_cell = cell_footprint(cell, ctx.rules, ctx.cell_params)
    area_array = mat.rows * mat.cols * a_cell  # one tier's cells

    # ---- periphery area --------------------------------------------
    systems = _wordline_systems(mat, ctx)
    arr = array_for_cell(cell, mat.rows, mat.cols, ctx.array_params)
    row_grids = 0.0
    for sysd in systems:
        c_wl = sysd["load"] * mat.cols + ctx.array_params.wire_c_per_cell * mat.cols
        drv = _driver_grids(c_wl, sysd["swing"], v_dd, p)
        g = drv
        if mat.has_level_shifters and sysd["swing"] > v_dd * 1.05:
            g += p.a_ls_base + p.ls_driver_frac * drv
        if cell.is_stackable:
            g += mat.n_l * p.tg_driver_frac * drv  # per-tier decode gates
        row_grids += g
    n_rbl, n_wbl = _col_ports(cell)
    sense = p.a_sense * (1.0 if topo.startswith("SRAM") else p.se_sense_factor)
    mux = min(p.col_mux_degree, mat.cols)
    # SAs and write drivers sit behind the column mux; mux gates,
    # prechargers, and per-tier bitline gates are per bitline.
    col_grids = (max(n_rbl, 1) * (p.a_col_mux + sense / mux)
                 + n_wbl * (p.a_col_mux + p.a_write_driver / mux)
                 + p.a_precharge)
    if cell.is_stackable:
        col_grids += mat.n_l * p.a_bl_mux_per_tier * max(n_rbl + n_wbl, 1)
    ctrl_grids = p.a_ctrl + p.a_dec_per_bit * math.log2(max(mat.rows * mat.n_l, 2))

    periph_grids = mat.rows * row_grids + mat.cols * col_grids + ctrl_grids
    area_periph = periph_grids * grid * _periph_mult(topo, p)

    if cell.is_stackable:
        # FEOL periphery tucks under the BEOL array
        area = max(area_array, area_periph)
    else:
        area = area_array + area_periph

    # ---- timing -----------------------------------------------------
    t_dec = p.tau_dec + 0.3 * p.tau_fo4 * math.log2(max(mat.rows * mat.n_l, 2))
    wl_rc = 0.38 * (arr.wire_r_per_cell * mat.cols) * \
        (systems[0]["load"] * mat.cols + ctx.array_params.wire_c_per_cell * mat.cols)
    read_sys = next((s for s in systems if s["role"] in ("read", "rw")), systems[0])
    write_sys = next((s for s in systems if s["role"] in ("write", "rw")), systems[0])
    t_wl_read = _wl_delay(read_sys["load"] * mat.cols, read_sys["swing"], v_dd, wl_rc, p)
    t_wl_write = _wl_delay(write_sys["load"] * mat.cols, write_sys["swing"], v_dd, wl_rc, p)
    t_3d = p.tau_3d_per_step * (1.0 + math.log2(mat.n_l)) if cell.is_stackable else 0.0

    t_restore = 0.0
    if topo == "GC_NR1W":
        t_cell_read = _gc_read_time(mat, ctx)
        t_cell_write = write_time(cell, ctx.devs.aos_write, ctx.devs.aos_read,
                                  params=ctx.cell_params)
    elif topo == "GC_3T0C":
        t_cell_read = _3t0c_read_time(mat, ctx)
        t_cell_write = write_time(cell, ctx.devs.aos_write, ctx.devs.aos_read,
                                  params=ctx.cell_params)
    elif topo.startswith("EDRAM"):
        t_cell_read, rm = _1t1c_read(mat, ctx)
        if rm < mat.sense_threshold:
            raise ConstraintError(
                f"1T1C read margin {rm * 1e3:.1f} mV below "
                f"{mat.sense_threshold * 1e3:.0f} mV at rows={mat.rows}")
        c_sn = storage_node_capacitance(cell, ctx.devs.aos_read, ctx.cell_params)
        t_cell_write = access_time_1t1c(c_sn, _1t1c_access_device(cell, ctx),
                                        v_cc=v_dd, cell_params=ctx.cell_params)
        t_restore = t_cell_write
    else:
        t_cell_read = _sram_read_time(mat, ctx)
        t_cell_write = 4.0 * p.tau_fo4
    if math.isinf(t_cell_read):
        raise ConstraintError(
            f"{topo} read margin cannot develop at rows={mat.rows}, cols={mat.cols}")

    t_read = t_dec + t_wl_read + t_3d + t_cell_read + p.tau_sense
    t_write = t_dec + t_wl_write + t_3d + t_cell_write
    swing_pre = p.restore_swing if topo != "SRAM6T" else 2 * mat.sense_threshold
    c_pre = arr.c_rbl + (mat.n_l * _tier_stub(topo, p) if cell.is_stackable else 0.0)
    t_pre = p.tau_pre_base + c_pre * swing_pre / p.i_precharge

    # ---- energy ------------------------------------------------------
    c_bl = arr.c_rbl
    e_dec = p.e_dec_base * (1.0 + 0.2 * math.log2(max(mat.rows * mat.n_l, 2)))
    e_read_items = {
        "decode": e_dec,
        "wordline": (read_sys["load"] * mat.cols) * read_sys["swing"] ** 2,
        "bitline": mat.cols * c_bl * v_dd * (2 * mat.sense_threshold),
        "sense": (mat.cols / mux) * p.e_sense_per_col,
    }
    e_write_items = {
        "decode": e_dec,
        "wordline": (write_sys["load"] * mat.cols) * write_sys["swing"] ** 2,
        "bitline": mat.cols * c_bl * v_dd * v_dd,
        "sense": 0.0,
    }
    if topo.startswith("EDRAM"):
        # destructive read: restore the row after sensing
        e_read_items["restore"] = mat.cols * c_bl * v_dd * p.restore_swing
    e_refresh_line = (sum(e_read_items.values()) + sum(e_write_items.values()))

    # ---- static ------------------------------------------------------
    cells_total = mat.rows * mat.cols * mat.n_l
    static = cells_total * cell_static_power(cell, ctx.devs, ctx.cell_params)
    static += area_periph * p.leak_per_area

    return MatPPA(
        area=area, area_array=area_array, area_periph=area_periph,
        t_dec=t_dec, t_wl=t_wl_read, t_cell_read=t_cell_read, t_sense=p.tau_sense,
        t_3d=t_3d, t_read=t_read, t_restore=t_restore, t_write=t_write,
        t_precharge=t_pre, e_read_items=e_read_items, e_write_items=e_write_items,
        e_refresh_line=e_refresh_line, static_power=static,
    )


def mat_ppa(mat: MatDesign, ctx: ModelContext) -> MatPPA:
    """Evaluate one mat. Raises ConstraintError for infeasible geometry."""
    return _mat_ppa_cached(mat, ctx)


# ---------------------------------------------------------------------
# Bank


@dataclass(frozen=True)
class BankDesign:
    mat: MatDesign
    mats_per_subarray: int
    subarrays_x: int
    subarrays_y: int
    n_asc: int
    n_asr: int
    n_ports: int = 1
    w_block: int = 128

    def __post_init__(self):
        if min(self.mats_per_subarray, self.subarrays_x, self.subarrays_y,
               self.n_asc, self.n_asr, self.n_ports, self.w_block) < 1:
            raise InputDomainError("bank geometry fields must be >= 1")
        if self.n_asc > self.subarrays_x or self.n_asr > self.subarrays_y:
            raise InputDomainError("active subarrays exceed the grid")

    @property
    def n_subarrays(self) -> int:
        return self.subarrays_x * self.subarrays_y

    @property
    def capacity_bits(self) -> int:
        return self.mat.bits * self.mats_per_subarray * self.n_subarrays

    @property
    def capacity_bytes(self) -> int:
        return self.capacity_bits // 8

    @property
    def active_mats(self) -> int:
        return self.n_asc * self.n_asr * self.mats_per_subarray


@dataclass(frozen=True)
class BankPPA:
    area: float
    t_read: float       # mat-granularity read (incl. tier decode and sense)
    t_write: float
    t_precharge: float
    t_access: float     # bank access latency incl. H-tree
    rct: float          # max(read cycle, write): honest bank cycle
    rct_read_cycle: float  # read + precharge (+ restore when flagged)
    static_power: float
    e_read: float
    e_write: float
    e_refresh_line: float
    bandwidth: float
    restore_in_rct: bool = False
    e_read_items: dict = field(default_factory=dict)
    e_write_items: dict = field(default_factory=dict)


def eq1_bandwidth(n_ports: int, w_block: int, t_precharge: float,
                  t_read: float, t_write: float) -> float:
    """Peak bank bandwidth in bits/s under split read/write paths."""
    return n_ports * max(w_block / (t_precharge + t_read), w_block / t_write)


def bank_ppa(bank: BankDesign, ctx: ModelContext,
             restore_in_rct: bool = False) -> BankPPA:
    """Compose mats into a bank: H-tree routing, UCA bandwidth, PPA."""
    p = ctx.bank_params
    m = mat_ppa(bank.mat, ctx)
    cell = bank.mat.cell

    bits_active = bank.active_mats * bank.mat.cols
    if bits_active < bank.w_block:
        raise ConstraintError(
            f"active mats deliver {bits_active} columns < block {bank.w_block}")
    if bank.w_block % (bank.n_asc * bank.n_asr) != 0:
        raise ConstraintError("block does not divide evenly over active subarrays")

    sub_area = bank.mats_per_subarray * m.area + p.a_subarray_dec * ctx.rules.grid_area
    core_area = bank.n_subarrays * sub_area
    levels = math.ceil(math.log2(bank.n_subarrays)) if bank.n_subarrays > 1 else 0
    area = core_area * (1.0 + p.htree_frac_per_level * levels)

    # H-tree: per-level distributed RC over halving spans, plus buffers
    t_htree = 0.0
    e_gdl = 0.0
    span = math.sqrt(core_area) / 2.0
    for _ in range(levels):
        t_htree += p.tau_buf + 0.38 * (p.r_wire_per_m * span) * (p.c_wire_per_m * span)
        e_gdl += bank.w_block * p.c_wire_per_m * span * cell.v_dd ** 2
        span /= 2.0

    t_read_cycle = m.t_read + m.t_precharge + (m.t_restore if restore_in_rct else 0.0)
    rct = max(t_read_cycle, m.t_write)
    t_access = m.t_read + t_htree

    e_read_items = {k: v * bank.active_mats for k, v in m.e_read_items.items()}
    e_read_items["htree"] = e_gdl
    e_write_items = {k: v * bank.active_mats for k, v in m.e_write_items.items()}
    e_write_items["htree"] = e_gdl

    static = bank.n_subarrays * (bank.mats_per_subarray * m.static_power
                                 + p.a_subarray_dec * ctx.rules.grid_area * p.leak_per_area)
    static += (area - core_area) * p.leak_per_area  # H-tree repeaters

    bw = eq1_bandwidth(bank.n_ports, bank.w_block, m.t_precharge, m.t_read, m.t_write)
    return BankPPA(
        area=area,
        t_read=m.t_read,
        t_write=m.t_write,
        t_precharge=m.t_precharge,
        t_access=t_access,
        rct=rct,
        rct_read_cycle=t_read_cycle,
        static_power=static,
        e_read=sum(e_read_items.values()),
        e_write=sum(e_write_items.values()),
        e_refresh_line=m.e_refresh_line,
        bandwidth=bw,
        restore_in_rct=restore_in_rct,
        e_read_items=e_read_items,
        e_write_items=e_write_items,
    )


def refresh_period(t_ret: float, n_row: int, n_l: int) -> float:
    """Distributed per-line refresh period: t_ret / n_row / n_l (exact).

    Each tier refreshes as an independent, peripherally shared matrix, so
    every line of every tier is visited once per retention window.
    """
    if t_ret <= 0 or n_row < 1 or n_l < 1:
        raise InputDomainError("need t_ret > 0, n_row >= 1, n_l >= 1")
    return float(Fraction(t_ret) / (n_row * n_l))


def density(capacity_bits: int, area_m2: float) -> float:
    """Storage density in bits per m^2."""
    if area_m2 <= 0:
        raise InputDomainError("area must be positive")
    return capacity_bits / area_m2


def density_mb_per_mm2(capacity_bits: int, area_m2: float) -> float:
    return density(capacity_bits, area_m2) / 1e6 * 1e-6
