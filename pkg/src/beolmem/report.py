"""Tidy CSV emission for the study results and figure-shaped exports.

Every writer uses a fixed column order and ``repr``-stable float
formatting, so identical inputs produce byte-identical files.  Readers
re-parse into the same row dicts (round-trip safe).
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .errors import ReportError

FIGURE_SCHEMAS = {
    "fig8a": ("topology", "n_read", "area_um2"),
    "fig8b": ("topology", "n_read", "standby_w"),
    "fig8c": ("n_read", "f_wwl", "f_rwl", "coupling_reduction_vs_1r"),
    "fig9b": ("v_t", "n_row", "rm_peak", "t_sat", "t_cross"),
    "fig10": ("topology", "n_read", "n_l", "area_um2", "static_uw", "e_write_fj"),
    "fig13": ("channel", "v_t", "read_time_s", "leak_a"),
    "fig14a": ("n_row", "w_access_nm", "min_csn_ff"),
    "fig14b": ("c_sn_ff", "v_t", "access_s"),
    "fig15a": ("topology", "n_l", "density_mb_mm2", "rct_ns"),
    "fig15b": ("topology", "n_l", "metric", "minimum", "median", "maximum"),
    "fig18": ("config", "failure_mode", "fraction_of_accesses"),
}


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    if v is None:
        return ""
    return str(v)


def write_rows(path, header: tuple[str, ...], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(row.get(col)) for col in header])


def rows_to_csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(row.get(col)) for col in header])
    return buf.getvalue()


def read_rows(path) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = []
        for rec in r:
            row = {}
            for col, val in zip(header, rec):
                if val == "":
                    row[col] = None
                    continue
                try:
                    row[col] = int(val)
                except ValueError:
                    try:
                        row[col] = float(val)
                    except ValueError:
                        row[col] = val
            rows.append(row)
    return header, rows


def emit_figure_data(figure: str, source_dir, out_path=None) -> Path:
    """Re-emit one figure's tidy CSV from raw study outputs in source_dir.

    Raises ReportError when the backing study output is missing.
    """
    source_dir = Path(source_dir)
    if figure not in FIGURE_SCHEMAS:
        raise ReportError(f"unknown figure {figure!r}; have {sorted(FIGURE_SCHEMAS)}")
    out_path = Path(out_path) if out_path else source_dir / f"{figure}.csv"
    header = FIGURE_SCHEMAS[figure]

    direct = {
        "fig8a": "cells.csv", "fig8b": "cells.csv", "fig8c": "cells.csv",
        "fig9b": "read_transient.csv", "fig13": "tradeoff_3t0c.csv",
        "fig14a": "min_csn.csv", "fig14b": "access_time.csv",
        "fig15a": "density_study.csv", "fig15b": "distribution_study.csv",
        "fig10": "designs.csv", "fig18": "failures.csv",
    }
    src = source_dir / direct[figure]
    if not src.exists():
        raise ReportError(f"missing study output {src}; run the producing study first")
    _, rows = read_rows(src)

    if figure == "fig8a":
        rows = [{"topology": r["topology"], "n_read": r["n_read"],
                 "area_um2": r["area_um2"]} for r in rows]
    elif figure == "fig8b":
        rows = [{"topology": r["topology"], "n_read": r["n_read"],
                 "standby_w": r["standby_w"]} for r in rows]
    elif figure == "fig8c":
        gc = [r for r in rows if r["topology"] == "GC_NR1W" and r.get("f_rwl")]
        base = next((r["f_rwl"] for r in gc if r["n_read"] == 1), None)
        rows = [{"n_read": r["n_read"], "f_wwl": r["f_wwl"], "f_rwl": r["f_rwl"],
                 "coupling_reduction_vs_1r": base / r["f_rwl"] if base else None}
                for r in gc]
    elif figure == "fig10":
        best: dict[tuple, dict] = {}
        for r in rows:
            if not r.get("feasible"):
                continue
            key = (r["topology"], r["n_read"], r["n_l"])
            if key not in best or r["area_m2"] < best[key]["area_m2"]:
                best[key] = r
        rows = [{"topology": k[0], "n_read": k[1], "n_l": k[2],
                 "area_um2": r["area_m2"] * 1e12, "static_uw": r["static_w"] * 1e6,
                 "e_write_fj": r["e_write_j"] * 1e15}
                for k, r in sorted(best.items())]
    elif figure == "fig14a":
        rows = [{"n_row": r["n_row"], "w_access_nm": r["w_access_nm"],
                 "min_csn_ff": r["min_csn_ff"]} for r in rows]
    elif figure == "fig15b":
        rows = [{c: r[c] for c in header} for r in rows]
    elif figure == "fig18":
        rows = [{c: r[c] for c in header} for r in rows]
    # fig9b / fig13 / fig14b / fig15a are already in figure shape

    write_rows(out_path, header, rows)
    return out_path


def write_json(path, data) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
