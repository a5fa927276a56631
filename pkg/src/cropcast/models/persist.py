"""Model file format: plain-text manifest plus a float64 parameter blob.

``manifest.txt`` holds ``key=value`` lines (scalar floats as ``float.hex``
so they reload exactly); ``params.bin`` holds every parameter array
concatenated as little-endian 64-bit floats in the order the manifest
documents.  Saving a loaded model reproduces both files byte for byte.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import ParseError, ValidationError
from .baseline import ArBaseline
from .lstm import LstmModel
from .mlp import MlpModel

MANIFEST_NAME = "manifest.txt"
BLOB_NAME = "params.bin"


def _fmt_shape(shape) -> str:
    return "x".join(str(int(s)) for s in shape)


def _parse_shape(text: str) -> tuple:
    return tuple(int(s) for s in text.split("x")) if text else ()


def _write_manifest(path: Path, pairs: list) -> None:
    lines = [f"{key}={value}" for key, value in pairs]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_manifest(path: Path) -> dict:
    out = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError(f"{path.name} line {lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key] = value
    return out


def _model_arrays(model) -> list:
    if isinstance(model, MlpModel):
        return [model.w1, model.b1, model.w2, model.b2]
    if isinstance(model, LstmModel):
        arrays = []
        for layer in model.layers:
            arrays += [layer["wx"], layer["wh"], layer["b"]]
        return arrays + [model.wd, model.bd]
    if isinstance(model, ArBaseline):
        return [model.coeffs, model.tail]
    raise ValidationError(f"cannot persist model of type {type(model).__name__}")


def save_model(model, directory, extras: dict | None = None) -> None:
    """Write ``manifest.txt`` and ``params.bin`` for one trained model."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    arrays = _model_arrays(model)
    pairs = []
    if isinstance(model, MlpModel):
        pairs.append(("type", "mlp"))
        pairs.append(("arrays", "w1,b1,w2,b2"))
    elif isinstance(model, LstmModel):
        names = []
        for i in range(len(model.layers)):
            names += [f"wx{i}", f"wh{i}", f"b{i}"]
        pairs.append(("type", "lstm"))
        pairs.append(("arrays", ",".join(names + ["wd", "bd"])))
        pairs.append(("n_layers", str(len(model.layers))))
        pairs.append(("k", str(model.k)))
        pairs.append(("input_width", str(model.input_width)))
    else:
        pairs.append(("type", "ar"))
        pairs.append(("arrays", "coeffs,tail"))
        pairs.append(("d", str(model.d)))
        pairs.append(("p", str(model.p)))
        pairs.append(("intercept", float(model.intercept).hex()))
    pairs.append(("shapes", ";".join(_fmt_shape(a.shape) for a in arrays)))
    pairs.append(("trained_through", str(model.trained_through)))
    if not isinstance(model, ArBaseline):
        pairs.append(("seed", str(model.seed)))
        pairs.append(("target_mean", float(model.target_mean).hex()))
        pairs.append(("target_scale", float(model.target_scale).hex()))
    for key, value in sorted((extras or {}).items()):
        pairs.append((f"x_{key}", str(value)))
    _write_manifest(directory / MANIFEST_NAME, pairs)
    blob = np.concatenate([np.asarray(a, dtype="<f8").ravel() for a in arrays]) \
        if arrays and sum(a.size for a in arrays) else np.empty(0, dtype="<f8")
    (directory / BLOB_NAME).write_bytes(blob.astype("<f8").tobytes())


def load_model(directory):
    """Reload a model saved by :func:`save_model` (parameters bit-exact)."""
    directory = Path(directory)
    manifest = _read_manifest(directory / MANIFEST_NAME)
    shapes = [_parse_shape(s) for s in manifest["shapes"].split(";")] \
        if manifest.get("shapes") else []
    blob = np.frombuffer((directory / BLOB_NAME).read_bytes(), dtype="<f8")
    arrays = []
    pos = 0
    for shape in shapes:
        size = int(np.prod(shape)) if shape else 0
        arrays.append(blob[pos:pos + size].reshape(shape))
        pos += size
    if pos != blob.size:
        raise ParseError("parameter blob length does not match manifest shapes")
    kind = manifest["type"]
    trained_through = int(manifest["trained_through"])
    if kind == "mlp":
        w1, b1, w2, b2 = arrays
        return MlpModel(
            w1=w1, b1=b1, w2=w2, b2=b2,
            target_mean=float.fromhex(manifest["target_mean"]),
            target_scale=float.fromhex(manifest["target_scale"]),
            seed=int(manifest["seed"]), trained_through=trained_through)
    if kind == "lstm":
        n_layers = int(manifest["n_layers"])
        layers = tuple({"wx": arrays[3 * i], "wh": arrays[3 * i + 1],
                        "b": arrays[3 * i + 2]} for i in range(n_layers))
        return LstmModel(
            layers=layers, wd=arrays[-2], bd=arrays[-1],
            k=int(manifest["k"]), input_width=int(manifest["input_width"]),
            target_mean=float.fromhex(manifest["target_mean"]),
            target_scale=float.fromhex(manifest["target_scale"]),
            seed=int(manifest["seed"]), trained_through=trained_through)
    if kind == "ar":
        coeffs, tail = arrays
        return ArBaseline(
            d=int(manifest["d"]), p=int(manifest["p"]),
            intercept=float.fromhex(manifest["intercept"]),
            coeffs=coeffs, tail=tail, trained_through=trained_through)
    raise ParseError(f"unknown model type {kind!r}")


def load_extras(directory) -> dict:
    """Extra key-value pairs stored alongside a model (prefix stripped)."""
    manifest = _read_manifest(Path(directory) / MANIFEST_NAME)
    return {k[2:]: v for k, v in manifest.items() if k.startswith("x_")}
