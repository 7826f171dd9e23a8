"""Coefficient/scheme file formats and a deterministic JSON writer.

Floats are written with 17 significant digits so that files round-trip
bit-exactly in double precision.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import CoefficientError, FormatError
from .model import CavityCoefficients, RadiativePort
from .network import ScatteringNetwork
from .schemes import BeamSplitterParams, SchemeSpec


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise FormatError(f"cannot serialize non-finite number {x!r}")
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "inf" not in s and "nan" not in s:
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with fixed 17-significant-digit floats and sorted keys."""

    def emit(o, level):
        pad = " " * (indent * (level + 1))
        close = " " * (indent * level)
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _fmt_float(float(o))
        if isinstance(o, (complex, np.complexfloating)):
            return emit(complex_to_json(o), level)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {emit(v, level + 1)}" for k, v in sorted(o.items())]
            return "{\n" + ",\n".join(items) + "\n" + close + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            if len(o) == 0:
                return "[]"
            items = [pad + emit(v, level + 1) for v in o]
            return "[\n" + ",\n".join(items) + "\n" + close + "]"
        raise FormatError(f"cannot serialize {type(o).__name__}")

    return emit(obj, 0) + "\n"


def complex_to_json(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _check_keys(d, required, optional=(), where="object") -> None:
    if not isinstance(d, dict):
        raise FormatError(f"{where} must be a JSON object")
    missing = [k for k in required if k not in d]
    if missing:
        raise FormatError(f"{where} is missing key(s) {missing}")
    unknown = [k for k in d if k not in required and k not in optional]
    if unknown:
        raise FormatError(f"{where} has unknown key(s) {sorted(unknown)}")


def _number(v, where) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise FormatError(f"{where} must be a number")
    return float(v)


def complex_from_json(d, where="complex number") -> complex:
    _check_keys(d, ("re", "im"), where=where)
    return complex(_number(d["re"], where + ".re"), _number(d["im"], where + ".im"))


def _complex_list(v, where) -> list[complex]:
    if not isinstance(v, list):
        raise FormatError(f"{where} must be an array")
    return [complex_from_json(x, f"{where}[{i}]") for i, x in enumerate(v)]


# -- coefficient files ---------------------------------------------------------

def coefficients_to_dict(c: CavityCoefficients) -> dict:
    return {
        "gamma": c.gamma,
        "omega": c.omega,
        "noise_dim": c.noise_dim,
        "noise_cav": [complex_to_json(z) for z in c.noise_cav],
        "ports": [
            {
                "t_c": complex_to_json(p.t_c),
                "t_o": complex_to_json(p.t_o),
                "r_o": complex_to_json(p.r_o),
                "noise_out": [complex_to_json(z) for z in p.noise_out],
            }
            for p in c.ports
        ],
    }


def coefficients_from_dict(d) -> CavityCoefficients:
    _check_keys(d, ("gamma", "omega", "noise_dim", "noise_cav", "ports"), where="coefficient file")
    noise_dim = d["noise_dim"]
    if isinstance(noise_dim, bool) or not isinstance(noise_dim, int) or noise_dim < 0:
        raise FormatError("noise_dim must be a non-negative integer")
    noise_cav = _complex_list(d["noise_cav"], "noise_cav")
    if len(noise_cav) != noise_dim:
        raise FormatError(f"noise_cav has {len(noise_cav)} entries, noise_dim is {noise_dim}")
    if not isinstance(d["ports"], list):
        raise FormatError("ports must be an array")
    ports = []
    for i, pd in enumerate(d["ports"]):
        where = f"ports[{i}]"
        _check_keys(pd, ("t_c", "t_o", "r_o", "noise_out"), where=where)
        ports.append(
            RadiativePort(
                complex_from_json(pd["t_c"], where + ".t_c"),
                complex_from_json(pd["t_o"], where + ".t_o"),
                complex_from_json(pd["r_o"], where + ".r_o"),
                _complex_list(pd["noise_out"], where + ".noise_out"),
            )
        )
    try:
        return CavityCoefficients(
            _number(d["gamma"], "gamma"), _number(d["omega"], "omega"), tuple(ports), noise_cav
        )
    except CoefficientError as exc:
        raise FormatError(str(exc)) from exc


# -- scheme files --------------------------------------------------------------

def _splitter_from_dict(d, where) -> BeamSplitterParams:
    _check_keys(d, ("theta",), ("mu", "nu", "phi"), where=where)
    return BeamSplitterParams(
        _number(d["theta"], where + ".theta"),
        _number(d.get("mu", 0.0), where + ".mu"),
        _number(d.get("nu", 0.0), where + ".nu"),
        _number(d.get("phi", 0.0), where + ".phi"),
    )


def network_from_dict(d, omega0: float, absorb_rate: float) -> ScatteringNetwork:
    _check_keys(d, ("s_matrix", "partition", "cavity_couplings"), where="network")
    rows = d["s_matrix"]
    if not isinstance(rows, list):
        raise FormatError("s_matrix must be an array of rows")
    mat = [_complex_list(r, f"s_matrix[{i}]") for i, r in enumerate(rows)]
    if any(len(r) != len(mat) for r in mat):
        raise FormatError("s_matrix must be square")
    part = d["partition"]
    if not isinstance(part, list) or not all(isinstance(x, str) for x in part):
        raise FormatError("partition must be an array of channel kinds")
    g = d["cavity_couplings"]
    if not isinstance(g, list):
        raise FormatError("cavity_couplings must be an array")
    return ScatteringNetwork(
        np.array(mat, dtype=complex).reshape(len(mat), len(mat)),
        tuple(part),
        tuple(_number(x, "cavity_couplings") for x in g),
        omega0,
        absorb_rate,
    )


def scheme_from_dict(d) -> SchemeSpec:
    _check_keys(
        d, ("kind",),
        ("gamma", "omega0", "absorb_rate", "splitters", "gamma_right", "gamma_left", "network"),
        where="scheme file",
    )
    kind = d["kind"]
    omega0 = _number(d.get("omega0", 0.0), "omega0")
    absorb = _number(d.get("absorb_rate", 0.0), "absorb_rate")
    splitters_raw = d.get("splitters", {})
    if not isinstance(splitters_raw, dict):
        raise FormatError("splitters must be an object")
    splitters = {k: _splitter_from_dict(v, f"splitters.{k}") for k, v in splitters_raw.items()}
    network = None
    if kind == "network":
        if "network" not in d:
            raise FormatError("network scheme needs a 'network' object")
        network = network_from_dict(d["network"], omega0, absorb)
    elif "network" in d:
        raise FormatError("'network' is only allowed for kind=network")
    gr = d.get("gamma_right")
    gl = d.get("gamma_left")
    return SchemeSpec(
        kind=kind,
        gamma=_number(d.get("gamma", 1.0), "gamma"),
        omega0=omega0,
        absorb_rate=absorb,
        splitters=splitters,
        gamma_right=None if gr is None else _number(gr, "gamma_right"),
        gamma_left=None if gl is None else _number(gl, "gamma_left"),
        network=network,
    )


def scheme_to_dict(s: SchemeSpec) -> dict:
    d: dict[str, Any] = {"kind": s.kind, "omega0": s.omega0, "absorb_rate": s.absorb_rate}
    if s.kind == "two_sided":
        d["gamma_right"] = s.gamma_right
        d["gamma_left"] = s.gamma_left
    elif s.kind != "network":
        d["gamma"] = s.gamma
    if s.splitters:
        d["splitters"] = {
            k: {"theta": b.theta, "mu": b.mu, "nu": b.nu, "phi": b.phi} for k, b in s.splitters.items()
        }
    if s.network is not None:
        n = s.network
        d["network"] = {
            "s_matrix": [[complex_to_json(z) for z in row] for row in n.s_matrix],
            "partition": list(n.partition),
            "cavity_couplings": list(n.cavity_couplings),
        }
    return d


def _load_json(path: str | Path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def load_coefficients(path) -> CavityCoefficients:
    return coefficients_from_dict(_load_json(path))


def load_scheme(path) -> SchemeSpec:
    return scheme_from_dict(_load_json(path))


def save_coefficients(c: CavityCoefficients, path) -> None:
    Path(path).write_text(dumps(coefficients_to_dict(c)), encoding="utf-8")
