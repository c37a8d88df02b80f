"""Parametric transistor models for BEOL oxide-semiconductor and Si devices.

A single smooth I-V expression covers subthreshold (exponential, with the
slope set by ``ss``) and strong inversion (square law with drive factor
``k_drive``), with a soft clamp at drain saturation.  All quantities are
SI: volts, amps, farads, meters, seconds.  Width-normalized parameters
are per meter of channel width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import Config, load_config
from .errors import InputDomainError

LN10 = math.log(10.0)

# Rated off-current ceiling for oxide-semiconductor devices: 1 fA/um.
AOS_IOFF_LIMIT = 1e-15 / 1e-6  # A/m


@dataclass(frozen=True)
class DeviceParams:
    """One transistor corner.

    ``i_off_per_w`` is the rated off-state current of the platform device
    at its nominal threshold.  The operating off-state current at an
    arbitrary threshold comes from :func:`off_leakage`; when a study sweeps
    ``v_t`` below the nominal corner the operating leakage exceeds the
    rating (that tradeoff is the point of the sweeps).
    """

    kind: str                # "AOS" | "SiNFET" | "SiPFET"
    v_t: float               # V
    ss: float                # V/decade of subthreshold swing
    k_drive: float           # A/(V^2 * m of width), saturation drive factor
    c_g_per_w: float         # F/m, gate-to-channel
    c_ov_per_w: float        # F/m, per overlap region
    i_off_per_w: float       # A/m, rated off current at V_gs = 0
    w: float                 # m, channel width
    l_g: float = 15e-9       # m, gate length
    l_ov: float = 30e-9      # m, overlap length

    def __post_init__(self):
        if self.kind not in ("AOS", "SiNFET", "SiPFET"):
            raise InputDomainError(f"unknown device kind {self.kind!r}")
        if self.ss < 0.060:
            raise InputDomainError("subthreshold swing below 60 mV/decade")
        if self.w <= 0 or self.k_drive <= 0:
            raise InputDomainError("W and k_drive must be positive")
        if self.kind == "AOS" and self.i_off_per_w > AOS_IOFF_LIMIT:
            raise InputDomainError(
                f"AOS rated off current {self.i_off_per_w:.3g} A/m exceeds "
                f"{AOS_IOFF_LIMIT:.3g} A/m"
            )

    def with_vt(self, v_t: float) -> "DeviceParams":
        """Same device, shifted threshold (rated off current unchanged)."""
        return replace(self, v_t=v_t)

    def with_width(self, w: float) -> "DeviceParams":
        return replace(self, w=w)


@dataclass(frozen=True)
class TechnologyRules:
    """Metallization and FEOL pitches of the 7 nm-class platform (meters)."""

    pitch_mx: float = 40e-9
    pitch_my: float = 76e-9
    pitch_miv: float = 60e-9
    cpp: float = 54e-9
    fin_pitch: float = 27e-9
    max_mx_layers: int = 5
    max_my_layers: int = 5
    upper_metal_pitch_factor: float = 18.0
    # Read-device stacking saturates at three tiers; past that, two read
    # devices share each tier (set by the relaxed upper-metal pitch).
    max_gc_read_tiers: int = 3

    def __post_init__(self):
        for name in ("pitch_mx", "pitch_my", "pitch_miv", "cpp", "fin_pitch"):
            if getattr(self, name) <= 0:
                raise InputDomainError(f"{name} must be positive")

    @property
    def grid_area(self) -> float:
        """One CPP x fin-pitch placement grid cell, m^2."""
        return self.cpp * self.fin_pitch


def _saturation_current(dev: DeviceParams, v_gs):
    """Drain current at full drain bias (smooth subthreshold/square-law)."""
    v_slope = dev.ss / LN10
    x = (np.asarray(v_gs, dtype=float) - dev.v_t) / (2.0 * v_slope)
    s = np.logaddexp(0.0, x)  # softplus, overflow-safe
    return 4.0 * dev.k_drive * dev.w * v_slope**2 * s * s, s, v_slope


def drain_current(dev: DeviceParams, v_gs, v_ds):
    """Drain current in amps; sign follows V_ds (terminal-swap symmetric).

    Continuous and non-decreasing in V_gs for fixed V_ds >= 0, and zero at
    V_ds = 0.  Negative V_ds is handled by swapping source and drain:
    I(V_gs, -V_ds) = -I(V_gs + V_ds_magnitude, V_ds_magnitude).
    """
    v_gs = np.asarray(v_gs, dtype=float)
    v_ds = np.asarray(v_ds, dtype=float)
    if not (np.all(np.isfinite(v_gs)) and np.all(np.isfinite(v_ds))):
        raise InputDomainError("non-finite bias input")
    swapped = v_ds < 0
    v_gs_eff = np.where(swapped, v_gs - v_ds, v_gs)
    v_ds_mag = np.abs(v_ds)
    i_sat, s, v_slope = _saturation_current(dev, v_gs_eff)
    v_dsat = v_slope * (2.0 * s + 1.0)
    i = i_sat * (-np.expm1(-v_ds_mag / v_dsat))
    out = np.where(swapped, -i, i)
    return float(out) if out.ndim == 0 else out


def gate_capacitance(dev: DeviceParams) -> float:
    """Total gate capacitance C_gg = (C_g + 2 C_ov per width) * W, farads."""
    return (dev.c_g_per_w + 2.0 * dev.c_ov_per_w) * dev.w


def off_leakage(dev: DeviceParams, v_ds: float = 0.75) -> float:
    """Operating off-state current at V_gs = 0 and the given drain bias."""
    return drain_current(dev, 0.0, v_ds)


def rated_off_current_per_w(kind: str, k_drive: float, ss: float, v_t: float) -> float:
    """Off current per width the I-V model yields at V_gs = 0, saturated.

    Used by the shipped corners so the rated ``i_off_per_w`` field is
    consistent with the model at the nominal threshold.
    """
    v_slope = ss / LN10
    s = math.log1p(math.exp(-v_t / (2.0 * v_slope)))
    return 4.0 * k_drive * v_slope**2 * s * s


# ---------------------------------------------------------------------
# Shipped corners


@dataclass(frozen=True)
class DeviceSet:
    """The calibrated device corners used by the cell and bank models."""

    aos_write: DeviceParams
    aos_read: DeviceParams
    si_nfet: DeviceParams
    si_pfet: DeviceParams


def device_from_config(cfg: Config, section: str) -> DeviceParams:
    kind = cfg.get_str(section, "kind")
    k_drive = cfg.get(section, "k_drive", "A/V2m")
    ss = cfg.get(section, "ss", "V/dec")
    v_t = cfg.get(section, "v_t", "V")
    if cfg.has(section, "i_off_per_w"):
        i_off = cfg.get(section, "i_off_per_w", "A/m")
    else:
        i_off = rated_off_current_per_w(kind, k_drive, ss, v_t)
    return DeviceParams(
        kind=kind,
        v_t=v_t,
        ss=ss,
        k_drive=k_drive,
        c_g_per_w=cfg.get(section, "c_g_per_w", "F/m"),
        c_ov_per_w=cfg.get(section, "c_ov_per_w", "F/m"),
        i_off_per_w=i_off,
        w=cfg.get(section, "w", "m"),
        l_g=cfg.get(section, "l_g", "m", 15e-9),
        l_ov=cfg.get(section, "l_ov", "m", 30e-9),
    )


def technology_from_config(cfg: Config) -> TechnologyRules:
    sec = "technology"
    return TechnologyRules(
        pitch_mx=cfg.get(sec, "pitch_mx", "m", 40e-9),
        pitch_my=cfg.get(sec, "pitch_my", "m", 76e-9),
        pitch_miv=cfg.get(sec, "pitch_miv", "m", 60e-9),
        cpp=cfg.get(sec, "cpp", "m", 54e-9),
        fin_pitch=cfg.get(sec, "fin_pitch", "m", 27e-9),
        max_mx_layers=cfg.get_int(sec, "max_mx_layers", 5),
        max_my_layers=cfg.get_int(sec, "max_my_layers", 5),
        upper_metal_pitch_factor=cfg.get(sec, "upper_metal_pitch_factor", "1", 18.0),
        max_gc_read_tiers=cfg.get_int(sec, "max_gc_read_tiers", 3),
    )


def default_devices(cfg: Config | None = None) -> DeviceSet:
    cfg = cfg or load_config()
    return DeviceSet(
        aos_write=device_from_config(cfg, "device.aos_write"),
        aos_read=device_from_config(cfg, "device.aos_read"),
        si_nfet=device_from_config(cfg, "device.si_nfet"),
        si_pfet=device_from_config(cfg, "device.si_pfet"),
    )
