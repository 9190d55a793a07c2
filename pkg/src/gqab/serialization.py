"""JSON formats for operators, channels, mixture families and bottleneck problems.

Floats are written with ``repr`` (shortest round-trip form), so reading back a
written file reproduces every entry bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bottleneck import IBProblem
from .channels import KrausChannel
from .errors import ParseError
from .linop import check_dims
from .mixture import MixtureFamily


def operator_to_json(mat: np.ndarray, dims) -> dict:
    mat = np.asarray(mat, dtype=complex)
    return {
        "dims": [int(d) for d in dims],
        "re": mat.real.tolist(),
        "im": mat.imag.tolist(),
    }


def operator_from_json(obj: dict, shape=None):
    """Return ``(matrix, dims)``; rectangular Kraus operators pass an explicit ``shape``."""
    try:
        dims = tuple(int(d) for d in obj["dims"])
        mat = np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed operator: {exc}") from exc
    if shape is None:
        try:
            check_dims(mat, dims)
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
    elif mat.shape != tuple(shape):
        raise ParseError(f"operator of shape {mat.shape}, expected {tuple(shape)}")
    return mat, dims


def channel_to_json(ch: KrausChannel) -> dict:
    return {
        "in_dims": list(ch.in_dims),
        "out_dims": list(ch.out_dims),
        # Kraus operators are rectangular; their dims record the output side.
        "kraus": [operator_to_json(k, ch.out_dims) for k in ch.kraus],
    }


def channel_from_json(obj: dict) -> KrausChannel:
    try:
        in_dims = tuple(int(d) for d in obj["in_dims"])
        out_dims = tuple(int(d) for d in obj["out_dims"])
        shape = (int(np.prod(out_dims)), int(np.prod(in_dims)))
        ops = [operator_from_json(k, shape)[0] for k in obj["kraus"]]
        return KrausChannel(ops, in_dims, out_dims)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed channel: {exc}") from exc


def family_to_json(fam: MixtureFamily) -> dict:
    return {
        "dims": list(fam.dims),
        "constraints": [
            {"H": operator_to_json(h, fam.dims), "a": float(a)} for h, a in zip(fam.operators, fam.values)
        ],
    }


def family_from_json(obj: dict) -> MixtureFamily:
    try:
        dims = tuple(int(d) for d in obj["dims"])
        ops, vals = [], []
        for c in obj["constraints"]:
            ops.append(operator_from_json(c["H"])[0])
            vals.append(float(c["a"]))
        return MixtureFamily(ops, vals, dims)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed mixture family: {exc}") from exc


def problem_to_json(p: IBProblem) -> dict:
    return {
        "rho_X": operator_to_json(p.rho_x, p.x_dims),
        "channel": channel_to_json(p.channel),
        "alpha": float(p.alpha),
        "beta": float(p.beta),
        "dim_T": int(p.dim_t),
    }


def problem_from_json(obj: dict) -> IBProblem:
    try:
        rho_x, x_dims = operator_from_json(obj["rho_X"])
        return IBProblem(
            rho_x,
            channel_from_json(obj["channel"]),
            float(obj["alpha"]),
            float(obj["beta"]),
            int(obj["dim_T"]),
            x_dims,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed bottleneck problem: {exc}") from exc


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def write_json(path, obj: dict) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")
