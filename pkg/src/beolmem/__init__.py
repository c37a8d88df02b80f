"""beolmem: PPA modeling and trace-driven simulation for stacked
BEOL oxide-semiconductor memories (gain cells, 1T1C eDRAM) against SRAM.
"""

__version__ = "0.1.0"

from .device import (  # noqa: F401
    DeviceParams,
    DeviceSet,
    TechnologyRules,
    default_devices,
    drain_current,
    gate_capacitance,
    off_leakage,
)
from .cells import (  # noqa: F401
    CellDesign,
    CellModelParams,
    PortConfig,
    cell_footprint,
    cell_static_power,
    coupling_fractions,
    default_cell,
    edram_1t1c_cell,
    gc_3t0c_cell,
    gc_cell,
    sram6t_cell,
    sram8t_cell,
    sram_mp_cell,
    storage_node_capacitance,
    write_time,
)
from .config import Config, load_config  # noqa: F401
