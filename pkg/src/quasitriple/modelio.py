"""
Versioned JSON serialization of :class:`~quasitriple.triple.TripleModel`.

Layout::

    {"version": 1, "kind": ..., "dims": {"n", "m", "dD", "dDt"},
     "gram_H", "gram_G", "embed", "embed_t", "T", "Tt", "G0", "G1", "G0t", "G1t",
     "metadata": {"green_defect", "lambda0", "symmetric"}}

Matrices are nested row lists of ``[re, im]`` pairs and ``lambda0`` is a
single ``[re, im]`` pair.  Loading checks shapes and Gram matrices only; the
Green identity is left to the verification suite so that a corrupted model
can still be loaded and reported on.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .numcore import WeightedSpace
from .triple import TripleModel

FORMAT_VERSION = 1

_FIELDS = {"embed": "embed", "embed_t": "embed_t", "T": "op_T", "Tt": "op_Tt",
           "G0": "g0", "G1": "g1", "G0t": "g0t", "G1t": "g1t"}


class ModelFormatError(ValueError):
    """A model document is malformed."""


def encode_matrix(a) -> list:
    a = np.asarray(a, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def decode_matrix(data, rows: int, cols: int, name: str) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if rows * cols == 0:
        return np.zeros((rows, cols), dtype=np.complex128)
    if arr.shape != (rows, cols, 2):
        raise ModelFormatError(f"{name}: expected shape ({rows}, {cols}, 2), got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def model_to_dict(model: TripleModel) -> dict:
    lam0 = model.lambda0
    meta = {
        "green_defect": float(model.metadata.get("green_defect", np.nan)),
        "lambda0": None if lam0 is None else [lam0.real, lam0.imag],
        "symmetric": model.symmetric,
    }
    doc = {
        "version": FORMAT_VERSION,
        "kind": str(model.metadata.get("kind", "model")),
        "dims": {"n": model.n, "m": model.m, "dD": model.dim_D, "dDt": model.dim_Dt},
        "gram_H": encode_matrix(model.space_H.gram),
        "gram_G": encode_matrix(model.space_G.gram),
    }
    for key, attr in _FIELDS.items():
        doc[key] = encode_matrix(getattr(model, attr))
    doc["metadata"] = meta
    return doc


def model_from_dict(doc: dict) -> TripleModel:
    try:
        if doc["version"] != FORMAT_VERSION:
            raise ModelFormatError(f"unsupported version {doc['version']!r}")
        dims = doc["dims"]
        n, m, dd, ddt = (int(dims[k]) for k in ("n", "m", "dD", "dDt"))
        shapes = {"embed": (n, dd), "embed_t": (n, ddt), "T": (n, dd), "Tt": (n, ddt),
                  "G0": (m, dd), "G1": (m, dd), "G0t": (m, ddt), "G1t": (m, ddt)}
        mats = {attr: decode_matrix(doc[key], *shapes[key], key) for key, attr in _FIELDS.items()}
        space_H = WeightedSpace(n, decode_matrix(doc["gram_H"], n, n, "gram_H"))
        space_G = WeightedSpace(m, decode_matrix(doc["gram_G"], m, m, "gram_G"))
        meta_in = doc.get("metadata", {})
    except KeyError as exc:
        raise ModelFormatError(f"missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(str(exc)) from exc
    meta = {"kind": doc.get("kind", "model"), "symmetric": bool(meta_in.get("symmetric", False))}
    if meta_in.get("lambda0") is not None:
        re, im = meta_in["lambda0"]
        meta["lambda0"] = complex(re, im)
    if meta_in.get("green_defect") is not None:
        meta["green_defect"] = float(meta_in["green_defect"])
    return TripleModel(space_H, space_G, metadata=meta, **mats)


def save_model(model: TripleModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), sort_keys=True) + "\n")


def load_model(path) -> TripleModel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON ({exc})") from exc
    return model_from_dict(doc)
