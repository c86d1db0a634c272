"""Plain-text model files.

Layout::

    #segtr-model v1 kind=<tag> E=<n> L=<n> v=<n> filters=3,8 F=10 dense=50 pe=0.5 pp=0.8
    =embedding 100 20
    <row-major values, one leading-dimension slice per line>
    =out_w 20
    ...

Values are written with 17 significant digits, so loading restores every
float64 bit for bit.
"""

from __future__ import annotations

import numpy as np

from ..errors import ParseError
from .arch import ArchKind, ArchitectureDescriptor
from .model import Classifier

_MAGIC = "#segtr-model v1"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_model(model: Classifier, path):
    a = model.arch
    header = [
        _MAGIC,
        f"kind={a.kind.value}",
        f"E={a.embedding_dim}",
        f"L={model.max_length}",
        f"v={model.vocab_size}",
        f"filters={','.join(map(str, a.filter_sizes))}",
        f"F={a.filters_per_size}",
        f"dense={a.dense_dim}",
        f"pe={_fmt(a.dropout_embed)}",
        f"pp={_fmt(a.dropout_penultimate)}",
        f"pad={model.pad_id}",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(" ".join(header) + "\n")
        for name, arr in model.params.items():
            fh.write(f"={name} {' '.join(map(str, arr.shape))}\n")
            rows = arr.reshape(arr.shape[0], -1) if arr.ndim > 1 else arr.reshape(1, -1)
            for row in rows:
                fh.write(" ".join(_fmt(x) for x in row) + "\n")


def load_model(path) -> Classifier:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if not lines[0].startswith(_MAGIC):
        raise ParseError(f"not a segtr model file (expected '{_MAGIC}')", path, 1)
    try:
        fields = dict(item.split("=", 1) for item in lines[0][len(_MAGIC):].split())
        arch = ArchitectureDescriptor(
            kind=ArchKind(fields["kind"]),
            embedding_dim=int(fields["E"]),
            filter_sizes=tuple(int(x) for x in fields["filters"].split(",") if x),
            filters_per_size=int(fields["F"]),
            dropout_embed=float(fields["pe"]),
            dropout_penultimate=float(fields["pp"]),
            dense_dim=int(fields["dense"]),
        )
        max_length, vocab_size = int(fields["L"]), int(fields["v"])
        pad_id = int(fields.get("pad", 0))
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad header: {exc}", path, 1) from None

    params = {}
    i = 1
    while i < len(lines) and lines[i]:
        line = lines[i]
        if not line.startswith("="):
            raise ParseError("expected '=name dims...' tensor header", path, i + 1)
        name, *dims = line[1:].split(" ")
        shape = tuple(int(d) for d in dims)
        n_rows = shape[0] if len(shape) > 1 else 1
        try:
            values = [float(x) for row in lines[i + 1: i + 1 + n_rows] for x in row.split(" ") if x]
            params[name] = np.array(values, dtype=np.float64).reshape(shape)
        except ValueError as exc:
            raise ParseError(f"tensor {name!r}: {exc}", path, i + 1) from None
        i += 1 + n_rows
    return Classifier(arch, max_length, vocab_size, params=params, pad_id=pad_id)
