"""JSON file formats: MPS-X tensors with boundary, and Γ tensors."""

from __future__ import annotations

import json
import math
from importlib import resources

import numpy as np

from .canonical_basis import GammaTensor
from .errors import InvalidInput
from .matrix_sets import MatrixSet
from .mpsx_states import MpsX


def schema(name):
    """Shipped JSON schema: ``mpsx_file``, ``gamma`` or ``report``."""
    text = resources.files("mpsx").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def _pair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _complex_list(values, n, what):
    if not isinstance(values, list) or len(values) != n:
        raise InvalidInput(f"{what} must be a list of {n} [re, im] pairs")
    out = np.empty(n, dtype=complex)
    for i, v in enumerate(values):
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            v = [v, 0.0]
        if not (isinstance(v, list) and len(v) == 2
                and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)):
            raise InvalidInput(f"{what}[{i}] is not a [re, im] pair")
        if not all(math.isfinite(c) for c in v):
            raise InvalidInput(f"{what}[{i}] is not finite")
        out[i] = complex(v[0], v[1])
    return out


def mpsx_from_dict(doc):
    if not isinstance(doc, dict):
        raise InvalidInput("MPS-X document must be a JSON object")
    for key in ("d", "D", "matrices", "boundary"):
        if key not in doc:
            raise InvalidInput(f"missing field {key!r}")
    d, D = doc["d"], doc["D"]
    if not (isinstance(d, int) and isinstance(D, int) and d >= 1 and D >= 1):
        raise InvalidInput("d and D must be positive integers")
    mats = doc["matrices"]
    if not isinstance(mats, list) or len(mats) != d:
        raise InvalidInput(f"expected {d} matrices")
    A = np.array([_complex_list(m, D * D, f"matrices[{i}]").reshape(D, D)
                  for i, m in enumerate(mats)])
    if doc["boundary"] == "identity":
        X = np.eye(D, dtype=complex)
    else:
        X = _complex_list(doc["boundary"], D * D, "boundary").reshape(D, D)
    return MpsX(MatrixSet(A), X)


def mpsx_to_dict(m):
    return {"d": m.d, "D": m.D,
            "matrices": [[_pair(z) for z in a.reshape(-1)] for a in m.tensor.mats],
            "boundary": [_pair(z) for z in m.X.reshape(-1)]}


def _parse_json(text, what):
    try:
        return json.loads(text, parse_constant=lambda c: (_ for _ in ()).throw(
            InvalidInput(f"{what}: {c} is not allowed")))
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{what}: invalid JSON ({exc})") from None


def load_mpsx(path):
    with open(path, encoding="utf-8") as fh:
        return mpsx_from_dict(_parse_json(fh.read(), str(path)))


def save_mpsx(m, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(mpsx_to_dict(m), fh, indent=1)
        fh.write("\n")


def gamma_from_dict(doc):
    try:
        return GammaTensor.from_json(doc)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InvalidInput(f"bad Γ document: {exc}") from None


def load_gamma(path):
    with open(path, encoding="utf-8") as fh:
        return gamma_from_dict(_parse_json(fh.read(), str(path)))
