#!/usr/bin/env python3
"""Regenerate the bundled scenario files under scenarios/.

Scenarios are plain data; this script exists so their floating-point
connection coefficients (multiples of 2*pi) stay exactly reproducible
instead of being hand-typed.  Run from the repository root:

    python3 scripts/build_scenarios.py
"""

import json
import math
import pathlib

import numpy as np

from etacalc.geometry import Connection

TWO_PI_I = 2j * math.pi
ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "scenarios"


def diag_connection(dim: int, mu_rows) -> dict:
    """Connection JSON for A_j = diag(2*pi*i*mu) per direction."""
    mats = [np.diag([TWO_PI_I * m for m in row]) for row in mu_rows]
    return Connection.from_constant(dim, mats).to_json_obj()


def write(name: str, obj: dict) -> None:
    OUT.mkdir(exist_ok=True)
    path = OUT / name
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")
    print(f"wrote {path}")


def s1_unitary() -> dict:
    return {
        "manifold": {"dim": 1},
        "bundle": {"rank": 1},
        "connections": {
            "base": diag_connection(1, [[0.25]]),
            "other": diag_connection(1, [[0.45]]),
        },
        "experiments": [
            {
                "check": "cs_odd_chern_pairing",
                "connection": "base",
                "r_values": [0.5, 1.0, 2.0],
                "label": "pairing",
            },
            {"check": "gilkey_variation", "from": "base", "to": "other"},
            {"check": "re_im_split", "connection": "base"},
            {"check": "eta_tilde_imaginary", "connection": "base"},
            {"check": "bk_phase", "rank": 1},
            {
                "check": "variation_complex",
                "path": {"kind": "linear", "from": "base", "to": "other"},
            },
            {"check": "spectrum", "connection": "base", "cutoff": 4},
        ],
        "output": {
            "report": "out/s1_unitary_report.json",
            "csv_dir": "out",
        },
    }


def s1_nonunitary() -> dict:
    return {
        "manifold": {"dim": 1},
        "bundle": {"rank": 1},
        "connections": {
            "main": diag_connection(1, [[0.3 + 0.07j]]),
            "target": diag_connection(1, [[0.62 - 0.14j]]),
        },
        "experiments": [
            {
                "check": "cs_odd_chern_pairing",
                "connection": "main",
                "r_values": [0.5, 1.0, 2.0],
                "label": "pairing",
            },
            {"check": "gilkey_variation", "from": "main", "to": "target"},
            {"check": "re_im_split", "connection": "main"},
            {"check": "eta_tilde_imaginary", "connection": "main"},
            {
                "check": "variation_complex",
                "path": {"kind": "linear", "from": "main", "to": "target"},
                "label": "variation_linear",
            },
            {
                "check": "variation_complex",
                "path": {"kind": "gauge", "connection": "main", "winding": 2},
                "label": "variation_gauge_w2",
            },
            {"check": "gauge_pumping", "connection": "main", "winding": 2},
        ],
        "output": {"report": "out/s1_nonunitary_report.json"},
    }


def t3_flat_commuting() -> dict:
    mu0 = [
        [0.3 + 0.1j, 0.7 - 0.2j],
        [0.55 - 0.05j, 0.2 + 0.15j],
        [0.4 + 0.2j, 0.85 + 0.05j],
    ]
    mu1 = [
        [0.45 - 0.1j, 0.6 + 0.25j],
        [0.35 + 0.2j, 0.75 - 0.1j],
        [0.25 - 0.15j, 0.5 + 0.1j],
    ]
    return {
        "manifold": {"dim": 3},
        "bundle": {"rank": 2},
        "connections": {
            "main": diag_connection(3, mu0),
            "other": diag_connection(3, mu1),
        },
        "experiments": [
            {
                "check": "cs_odd_chern_pairing",
                "connection": "main",
                "r_values": [0.5, 1.0, 2.0],
                "label": "pairing",
            },
            {
                "check": "psi_constancy",
                "path": {"kind": "linear", "from": "main", "to": "other"},
                "samples": 9,
            },
            {"check": "bk_phase", "rank": 2, "cutoff": 2},
        ],
        "output": {"report": "out/t3_flat_commuting_report.json"},
    }


def t3_spectrum() -> dict:
    return {
        "manifold": {"dim": 3},
        "bundle": {"rank": 1},
        "connections": {
            "main": diag_connection(3, [[0.25], [0.4], [0.1]]),
        },
        "experiments": [
            {"check": "spectrum", "connection": "main", "cutoff": 2},
            {
                "check": "cs_odd_chern_pairing",
                "connection": "main",
                "r_values": [1.0],
                "label": "pairing",
            },
            {"check": "bk_phase", "rank": 1, "cutoff": 2},
        ],
        "output": {
            "report": "out/t3_spectrum_report.json",
            "csv_dir": "out",
        },
    }


def main() -> None:
    write("s1_unitary.json", s1_unitary())
    write("s1_nonunitary.json", s1_nonunitary())
    write("t3_flat_commuting.json", t3_flat_commuting())
    write("t3_spectrum.json", t3_spectrum())


if __name__ == "__main__":
    main()
