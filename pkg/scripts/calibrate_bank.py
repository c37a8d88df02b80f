"""One-time tuning of the bank periphery constants against the macro
anchor set.  Prints anchor readouts for a parameter candidate; used to
pick the shipped values in baseline.cfg.

Anchors:
  * 64 kB SRAM subarray at 1 ns   -> ~30.5 Mb/mm2
  * 512 kB 2T0C subarray, 8 tiers -> ~82.9 Mb/mm2 (>= 2.2x SRAM)
  * 512 kB 1T1C subarray, 8 tiers -> ~191.8 Mb/mm2 (>= 5x SRAM)
  * 512 kB 3T0C subarray, 8 tiers -> ~65.7 Mb/mm2 (< 2T0C)
  * 256 kB SRAM bank              -> ~80,000 um2
  * 8 kB GC 3R1W (2 tiers) vs 8 kB SRAM8T at 750 ps:
        area ratio ~0.76, standby reduction 72-79 %
"""

from __future__ import annotations

import sys
from dataclasses import replace

sys.path.insert(0, "src")

from beolmem.bank import BankModelParams, ModelContext, default_context
from beolmem.dse import Constraint, SearchSpace, density_study, min_area


def readout(ctx: ModelContext, verbose: bool = True) -> dict:
    out = {}
    rows = density_study(ctx=ctx)
    for r in rows:
        if r.n_l == 8 or (r.topology == "SRAM6T" and r.n_l == 1):
            out[f"density_{r.topology}"] = r.density_mb_mm2
    c_rf = Constraint(capacity_bytes=8192, w_block=128, rct_max=750e-12)
    base = min_area(SearchSpace(topologies=("SRAM8T",), n_l=(1,)), c_rf, ctx)
    gc = min_area(SearchSpace(topologies=("GC_NR1W",), read_ports=(3,), n_l=(1, 2)), c_rf, ctx)
    out["rf_area_ratio"] = gc.ppa.area / base.ppa.area
    out["rf_static_reduction"] = 1 - gc.ppa.static_power / base.ppa.static_power
    c256 = Constraint(capacity_bytes=262144, w_block=256, rct_max=1e-9)
    s256 = min_area(SearchSpace(topologies=("SRAM6T",), n_l=(1,)), c256, ctx)
    out["sram_256k_area_um2"] = s256.ppa.area * 1e12
    if verbose:
        for k, v in out.items():
            print(f"  {k:28s} {v:10.3f}")
    return out


def with_bank_params(ctx: ModelContext, **kw) -> ModelContext:
    return replace(ctx, bank_params=replace(ctx.bank_params, **kw))


if __name__ == "__main__":
    ctx = default_context()
    print("=== shipped params ===")
    readout(ctx)
