"""Cell-level models: footprint, storage capacitance, standby power,
wordline coupling, and write time for every supported bit-cell topology.

Topologies:

* ``SRAM6T`` / ``SRAM8T`` / ``SRAM_MP`` -- FEOL silicon cells; 8T is the
  split-read 1R1W variant, SRAM_MP generalizes to R read + W write ports.
* ``GC_NR1W`` -- BEOL oxide-semiconductor gain cell with N stacked read
  devices and one write device; storage is the read-device gate node.
* ``GC_3T0C`` -- gain cell with a read-gating device (read wordline on a
  gate instead of the read-device source).
* ``EDRAM_1T1C_DG`` / ``EDRAM_1T1C_VGAA`` -- one access device plus a
  dedicated stacked capacitor; destructive read.

All geometry is SI (meters, m^2); powers in watts; times in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .config import Config, load_config
from .device import DeviceParams, DeviceSet, TechnologyRules, drain_current, gate_capacitance
from .errors import CapabilityError, InputDomainError

SRAM_TOPOLOGIES = ("SRAM6T", "SRAM8T", "SRAM_MP")
GC_TOPOLOGIES = ("GC_NR1W", "GC_3T0C")
EDRAM_TOPOLOGIES = ("EDRAM_1T1C_DG", "EDRAM_1T1C_VGAA")
ALL_TOPOLOGIES = SRAM_TOPOLOGIES + GC_TOPOLOGIES + EDRAM_TOPOLOGIES

MAX_READ_PORTS = 5


@dataclass(frozen=True)
class PortConfig:
    n_read: int
    n_write: int = 1

    def __post_init__(self):
        if self.n_read < 0 or self.n_write < 1:
            raise InputDomainError("need n_read >= 0 and n_write >= 1")

    @property
    def total(self) -> int:
        return self.n_read + self.n_write


@dataclass(frozen=True)
class CellDesign:
    """A bit-cell instance: topology, ports, device widths and bias points."""

    topology: str
    ports: PortConfig
    w_ra: float = 150e-9          # read device width, m
    w_wa: float = 30e-9           # write/access device width, m
    w_rg: float = 150e-9          # read-gating width (3T0C only), m
    c_sn_dedicated: float = 0.0   # dedicated storage cap (1T1C only), F
    v_hold: float = -0.4          # wordline hold level, V
    v_boost: float = 1.2          # boosted write wordline level, V
    v_dd: float = 0.75            # platform supply, V
    t_ret_target: float = 10e-3   # retention target, s
    delta_v_sn: float = 0.2       # allowed storage droop before refresh, V

    def __post_init__(self):
        if self.topology not in ALL_TOPOLOGIES:
            raise InputDomainError(f"unknown topology {self.topology!r}")
        if self.topology in GC_TOPOLOGIES and self.ports.n_write != 1:
            raise CapabilityError("gain cells support exactly one write port")
        if self.ports.n_read > MAX_READ_PORTS:
            raise CapabilityError(f"more than {MAX_READ_PORTS} read ports unsupported")

    @property
    def is_capacitive(self) -> bool:
        return self.topology in GC_TOPOLOGIES + EDRAM_TOPOLOGIES

    @property
    def is_stackable(self) -> bool:
        """Whether whole array tiers of this cell can be stacked."""
        return self.is_capacitive


@dataclass(frozen=True)
class CellModelParams:
    """Calibrated constants behind the cell models.

    The SRAM port-growth increments reproduce the 8T/6T area ratio; the
    gain-cell y-overhead reproduces the 1R1W cell size on the platform
    metal pitches.  Leakage widths are effective widths that land the 6T
    standby power and the per-read-port RBL leakage at the calibrated
    corner.
    """

    a_sram6t: float = 2.62e-14          # m^2
    sram8t_area_ratio: float = 1.332
    sram_congestion: float = 0.15
    gc_y_overhead: float = 93.75e-9     # m
    a_3t0c: float = 2.51e-14
    a_1t1c_dg: float = 2.70e-14
    a_1t1c_vgaa: float = 1.82e-14
    c_sn_fixed: float = 0.02e-15        # F, write-device junction on SN
    c_sn_junction_per_w: float = 3.8e-9  # F/m, 1T1C SN-side junction
    v_write_target: float = 0.5         # stored "1" level written by the GC port
    v_write_margin: float = 0.05        # 1T1C settle band below the target level
    wl_boost_1t1c: float = 0.60         # V above V_cc on the 1T1C wordline
    w_leak_6t: float = 60.68e-9         # m, effective 6T leak width
    w_leak_read_port: float = 74e-9     # m, effective per-read-port leak width
    stack_leak_factor: float = 0.2224   # 2T read-stack off-current reduction
    v_t_read_3t0c: float = 0.25         # gating-device operating threshold, V
    v_t_access_1t1c: float = 0.40       # access-device operating threshold, V

    @property
    def sram_read_increment(self) -> float:
        return (self.sram8t_area_ratio - 1.0) / (1.0 + self.sram_congestion)

    @property
    def sram_write_increment(self) -> float:
        return 2.0 * self.sram_read_increment


def cell_model_from_config(cfg: Config | None = None) -> CellModelParams:
    cfg = cfg or load_config()
    sec = "cells.model"
    d = CellModelParams()
    if sec not in cfg.sections:
        return d
    return CellModelParams(
        a_sram6t=cfg.get(sec, "a_sram6t", "m2", d.a_sram6t),
        sram8t_area_ratio=cfg.get(sec, "sram8t_area_ratio", "1", d.sram8t_area_ratio),
        sram_congestion=cfg.get(sec, "sram_congestion", "1", d.sram_congestion),
        gc_y_overhead=cfg.get(sec, "gc_y_overhead", "m", d.gc_y_overhead),
        a_3t0c=cfg.get(sec, "a_3t0c", "m2", d.a_3t0c),
        a_1t1c_dg=cfg.get(sec, "a_1t1c_dg", "m2", d.a_1t1c_dg),
        a_1t1c_vgaa=cfg.get(sec, "a_1t1c_vgaa", "m2", d.a_1t1c_vgaa),
        c_sn_fixed=cfg.get(sec, "c_sn_fixed", "F", d.c_sn_fixed),
        c_sn_junction_per_w=cfg.get(sec, "c_sn_junction_per_w", "F/m", d.c_sn_junction_per_w),
        v_write_target=cfg.get(sec, "v_write_target", "V", d.v_write_target),
        v_write_margin=cfg.get(sec, "v_write_margin", "V", d.v_write_margin),
        wl_boost_1t1c=cfg.get(sec, "wl_boost_1t1c", "V", d.wl_boost_1t1c),
        w_leak_6t=cfg.get(sec, "w_leak_6t", "m", d.w_leak_6t),
        w_leak_read_port=cfg.get(sec, "w_leak_read_port", "m", d.w_leak_read_port),
        stack_leak_factor=cfg.get(sec, "stack_leak_factor", "1", d.stack_leak_factor),
        v_t_read_3t0c=cfg.get(sec, "v_t_read_3t0c", "V", d.v_t_read_3t0c),
        v_t_access_1t1c=cfg.get(sec, "v_t_access_1t1c", "V", d.v_t_access_1t1c),
    )


# ---------------------------------------------------------------------
# Factories for the calibrated default cells


def gc_cell(n_read: int = 1, **overrides) -> CellDesign:
    """NR1W gain cell; the write device widens in proportion to the port count."""
    kw = dict(
        topology="GC_NR1W",
        ports=PortConfig(n_read=n_read, n_write=1),
        w_ra=150e-9,
        w_wa=30e-9 * n_read,
    )
    kw.update(overrides)
    return CellDesign(**kw)


def gc_3t0c_cell(**overrides) -> CellDesign:
    kw = dict(topology="GC_3T0C", ports=PortConfig(1, 1), w_ra=150e-9,
              w_wa=30e-9, w_rg=150e-9)
    kw.update(overrides)
    return CellDesign(**kw)


def edram_1t1c_cell(vgaa: bool = True, **overrides) -> CellDesign:
    kw = dict(
        topology="EDRAM_1T1C_VGAA" if vgaa else "EDRAM_1T1C_DG",
        ports=PortConfig(0, 1),
        w_wa=300e-9,
        c_sn_dedicated=10e-15,
        v_hold=-0.3,
        t_ret_target=125e-3,
        delta_v_sn=0.2,
    )
    kw.update(overrides)
    return CellDesign(**kw)


def sram6t_cell(**overrides) -> CellDesign:
    kw = dict(topology="SRAM6T", ports=PortConfig(0, 1), v_hold=0.0, v_boost=0.75)
    kw.update(overrides)
    return CellDesign(**kw)


def sram8t_cell(**overrides) -> CellDesign:
    kw = dict(topology="SRAM8T", ports=PortConfig(1, 1), v_hold=0.0, v_boost=0.75)
    kw.update(overrides)
    return CellDesign(**kw)


def sram_mp_cell(n_read: int, n_write: int = 1, **overrides) -> CellDesign:
    kw = dict(topology="SRAM_MP", ports=PortConfig(n_read, n_write),
              v_hold=0.0, v_boost=0.75)
    kw.update(overrides)
    return CellDesign(**kw)


def default_cell(topology: str, n_read: int = 1) -> CellDesign:
    if topology == "SRAM6T":
        return sram6t_cell()
    if topology == "SRAM8T":
        return sram8t_cell()
    if topology == "SRAM_MP":
        return sram_mp_cell(n_read)
    if topology == "GC_NR1W":
        return gc_cell(n_read)
    if topology == "GC_3T0C":
        return gc_3t0c_cell()
    if topology == "EDRAM_1T1C_DG":
        return edram_1t1c_cell(vgaa=False)
    if topology == "EDRAM_1T1C_VGAA":
        return edram_1t1c_cell(vgaa=True)
    raise InputDomainError(f"unknown topology {topology!r}")


# ---------------------------------------------------------------------
# Footprint


def gc_read_tiers(n_read: int, rules: TechnologyRules) -> int:
    """Device tiers used by the stacked read ports."""
    if n_read <= rules.max_gc_read_tiers:
        return n_read
    return rules.max_gc_read_tiers


def cell_footprint(cell: CellDesign, rules: TechnologyRules,
                   params: CellModelParams | None = None) -> float:
    """Planar footprint of one cell in m^2."""
    p = params or CellModelParams()
    topo = cell.topology
    r, w = cell.ports.n_read, cell.ports.n_write

    if topo == "SRAM6T":
        return p.a_sram6t

    if topo in ("SRAM8T", "SRAM_MP"):
        if topo == "SRAM8T" and (r, w) != (1, 1):
            raise CapabilityError("SRAM8T is the 1R1W variant")
        congestion = 1.0 + p.sram_congestion * (r + w - 1)
        growth = p.sram_read_increment * r + p.sram_write_increment * (w - 1)
        return p.a_sram6t * (1.0 + congestion * growth)

    if topo == "GC_NR1W":
        if r < 1:
            raise CapabilityError("gain cell needs at least one read port")
        if r > MAX_READ_PORTS:
            raise CapabilityError(f"more than {MAX_READ_PORTS} read ports unsupported")
        # Write device widens with ports along x; read devices stack in
        # tiers until the ceiling, then sit two per tier along y.
        x_pitch = max(2.0 * rules.pitch_mx, cell.w_wa + rules.pitch_mx)
        reads_per_tier = 1 if r <= rules.max_gc_read_tiers else 2
        y_pitch = reads_per_tier * cell.w_ra + p.gc_y_overhead
        return x_pitch * y_pitch

    if topo == "GC_3T0C":
        if (r, w) != (1, 1):
            raise CapabilityError("3T0C is modeled as 1R1W only")
        return p.a_3t0c

    if topo == "EDRAM_1T1C_DG":
        return p.a_1t1c_dg
    if topo == "EDRAM_1T1C_VGAA":
        return p.a_1t1c_vgaa
    raise InputDomainError(f"unknown topology {topo!r}")


# ---------------------------------------------------------------------
# Storage node capacitance


def storage_node_capacitance(cell: CellDesign, dev_read: DeviceParams,
                             params: CellModelParams | None = None) -> float:
    """Capacitance of the storage node in farads.

    Gain cells store on the read-device gates: the sum of the read-port
    C_gg dominates, plus a small fixed write-junction parasitic.  1T1C
    adds the access-device junction to the dedicated capacitor.
    """
    p = params or CellModelParams()
    if cell.topology == "GC_NR1W":
        c_read = gate_capacitance(dev_read.with_width(cell.w_ra))
        return cell.ports.n_read * c_read + p.c_sn_fixed
    if cell.topology == "GC_3T0C":
        # Only the inner read device's gate sits on the storage node.
        return gate_capacitance(dev_read.with_width(cell.w_ra)) + p.c_sn_fixed
    if cell.topology in EDRAM_TOPOLOGIES:
        return cell.c_sn_dedicated + p.c_sn_junction_per_w * cell.w_wa
    raise CapabilityError(f"{cell.topology} has no floating storage node")


# ---------------------------------------------------------------------
# Static power


def cell_static_power(cell: CellDesign, devs: DeviceSet,
                      params: CellModelParams | None = None) -> float:
    """Standby power of one cell in watts.

    Capacitive cells burn only the refresh-replenished droop charge,
    C_SN * dV^2 / t_ret, independent of the stored data.  SRAM burns
    subthreshold leakage, plus one precharged-RBL path per read port.
    The 3T0C read stack leaks from the precharged RBL as well.
    """
    p = params or CellModelParams()
    topo = cell.topology

    if topo in SRAM_TOPOLOGIES:
        i6t = drain_current(devs.si_nfet.with_width(p.w_leak_6t), 0.0, cell.v_dd)
        power = cell.v_dd * i6t
        i_port = drain_current(devs.si_nfet.with_width(p.w_leak_read_port), 0.0, cell.v_dd)
        power += cell.ports.n_read * cell.v_dd * i_port
        return power

    if cell.t_ret_target <= 0:
        raise InputDomainError("capacitive cell needs t_ret > 0")
    c_sn = storage_node_capacitance(cell, devs.aos_read, p)
    power = c_sn * cell.delta_v_sn**2 / cell.t_ret_target

    if topo == "GC_3T0C":
        # Worst-case stored '1': inner device on, gating device off with
        # the precharged RBL across the stack.
        gate_dev = devs.aos_read.with_vt(p.v_t_read_3t0c).with_width(cell.w_rg)
        i_stack = p.stack_leak_factor * drain_current(gate_dev, 0.0, cell.v_dd)
        power += cell.v_dd * i_stack
    return power


# ---------------------------------------------------------------------
# Read-wordline / write-wordline coupling into the storage node


def _coupling_fractions_exact(w_wa, w_ra, n_read: int) -> tuple[Fraction, Fraction]:
    wwa = Fraction(w_wa)
    wra = Fraction(w_ra)
    denom = wwa + 2 * wra * n_read
    return wwa / denom, wra / denom


def coupling_fractions(cell: CellDesign) -> tuple[float, float]:
    """Capacitive-divider fractions (f_WWL, f_RWL) of wordline swing
    reaching the storage node.

    Charge neutrality partitions the coupled swing over the write gate
    and the 2N read-port terminals: f_WWL + 2*N*f_RWL = 1 exactly.
    """
    if cell.topology != "GC_NR1W":
        raise CapabilityError("coupling fractions apply to the NR1W gain cell")
    f_wwl, f_rwl = _coupling_fractions_exact(cell.w_wa, cell.w_ra, cell.ports.n_read)
    return float(f_wwl), float(f_rwl)


# ---------------------------------------------------------------------
# Write time


def charge_time(c_sn: float, current_of_v, v_start: float, v_target: float,
                n: int = 2048) -> float:
    """Integrate t = C * dV / I(V) from v_start to v_target (Simpson)."""
    if v_target <= v_start:
        return 0.0
    import numpy as np

    v = np.linspace(v_start, v_target, 2 * n + 1)
    i = np.asarray(current_of_v(v), dtype=float)
    if np.any(i <= 0):
        raise InputDomainError("write path does not conduct over the full swing")
    integrand = c_sn / i
    h = (v_target - v_start) / (2 * n)
    weights = np.ones_like(v)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float(h / 3.0 * np.sum(weights * integrand))


def write_time(cell: CellDesign, dev_write: DeviceParams,
               dev_read: DeviceParams | None = None,
               c_sn: float | None = None,
               params: CellModelParams | None = None) -> float:
    """Time to charge the storage node to the stored-'1' level, seconds.

    The write device (at the cell's write width) conducts from the bitline
    at V_dd under a boosted wordline; integration runs from the held-'0'
    level up to the write target.  ``c_sn`` overrides the derived storage
    capacitance when the caller wants to decouple the two.
    """
    p = params or CellModelParams()
    dev = dev_write.with_width(cell.w_wa)

    if cell.topology in GC_TOPOLOGIES:
        if c_sn is None:
            if dev_read is None:
                raise InputDomainError("need dev_read or c_sn for a gain cell")
            c_sn = storage_node_capacitance(cell, dev_read, p)
        v_wbl = cell.v_dd

        def current(v):
            return drain_current(dev, cell.v_boost - v, v_wbl - v)

        return charge_time(c_sn, current, 0.0, p.v_write_target)

    if cell.topology in EDRAM_TOPOLOGIES:
        if c_sn is None:
            c_sn = storage_node_capacitance(cell, dev_read or dev_write, p)
        v_wl = cell.v_dd + p.wl_boost_1t1c

        def current(v):
            return drain_current(dev, v_wl - v, cell.v_dd - v)

        return charge_time(c_sn, current, 0.0, cell.v_dd - p.v_write_margin)

    raise CapabilityError(f"write_time models capacitive cells, not {cell.topology}")


def retention_time(cell: CellDesign, dev_write: DeviceParams,
                   dev_read: DeviceParams | None = None,
                   params: CellModelParams | None = None) -> float:
    """Worst-case hold time before the storage droop budget is spent.

    Worst case is a stored '0' pulled up through the held-off write device
    toward a bitline at V_dd.
    """
    p = params or CellModelParams()
    dev = dev_write.with_width(cell.w_wa)
    c_sn = (cell.c_sn_dedicated if cell.topology in EDRAM_TOPOLOGIES
            else storage_node_capacitance(cell, dev_read or dev_write, p))
    i_leak = abs(drain_current(dev, cell.v_hold, cell.v_dd))
    if i_leak == 0.0:
        return math.inf
    return c_sn * cell.delta_v_sn / i_leak
