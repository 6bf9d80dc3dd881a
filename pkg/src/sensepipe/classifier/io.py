"""Plain-text parameter dumps.

Layout::

    # sensepipe classifier parameters
    config <key>=<value>          (one line per config field)
    tensor <name> <dim> [<dim> ...]
    <row of 9-significant-digit values>   (tensor reshaped to (dim0, -1))
"""
from __future__ import annotations

import os

import numpy as np

from .config import ClassifierConfig
from .model import PARAM_NAMES, Params

HEADER = "# sensepipe classifier parameters"


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def dump_params(params: Params, config: ClassifierConfig, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(HEADER + "\n")
        for k, v in config.to_dict().items():
            fh.write(f"config {k}={v}\n")
        for name in PARAM_NAMES:
            arr = params[name]
            fh.write(f"tensor {name} {' '.join(str(s) for s in arr.shape)}\n")
            rows = arr.reshape(1, -1) if arr.ndim == 1 else arr.reshape(arr.shape[0], -1)
            for row in rows:
                fh.write(" ".join(_fmt(x) for x in row) + "\n")


def load_params(path: str | os.PathLike) -> tuple[Params, ClassifierConfig]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != HEADER:
        raise ValueError(f"{path}: not a parameter dump")
    cfg: dict[str, str] = {}
    params: Params = {}
    i = 1
    while i < len(lines):
        line = lines[i]
        if line.startswith("config "):
            key, _, value = line[len("config "):].partition("=")
            cfg[key] = value
            i += 1
        elif line.startswith("tensor "):
            parts = line.split()
            name, shape = parts[1], tuple(int(s) for s in parts[2:])
            n_rows = 1 if len(shape) == 1 else shape[0]
            data = [float(x) for row in lines[i + 1:i + 1 + n_rows] for x in row.split()]
            params[name] = np.array(data, dtype=np.float64).reshape(shape)
            i += 1 + n_rows
        else:
            raise ValueError(f"{path}:{i + 1}: unexpected line")
    missing = set(PARAM_NAMES) - set(params)
    if missing:
        raise ValueError(f"{path}: missing tensors {sorted(missing)}")
    return params, ClassifierConfig.from_strings(cfg)
