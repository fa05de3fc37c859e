"""CSV and manifest serialisation.

Floats are written with ``repr`` so every value round-trips bit-exactly and
reruns produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import io
from pathlib import Path

import numpy as np

from .pulse import Axis, FieldSlice, SlicePlan

SCALAR_COLUMNS = ("re", "im")
EM_COLUMNS = ("Etheta_re", "Etheta_im", "Brho_re", "Brho_im", "Bz_re", "Bz_im")


def fmt(x) -> str:
    """Round-trip decimal text for ints, floats and numpy scalars."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


# -- field slices -----------------------------------------------------------------


def _meta_lines(sl: FieldSlice) -> list[str]:
    p = sl.plan
    out = []
    for tag, ax in (("axis1", p.axis1), ("axis2", p.axis2)):
        out += [
            f"# {tag}_name={ax.name}",
            f"# {tag}_min={fmt(ax.min)}",
            f"# {tag}_step={fmt(ax.step)}",
            f"# {tag}_count={ax.count}",
        ]
    out += [f"# fixed_name={p.fixed_name}", f"# fixed_value={fmt(p.fixed_value)}"]
    for key in sorted(sl.meta):
        out.append(f"# {key}={fmt(sl.meta[key])}")
    return out


def slice_to_text(sl: FieldSlice) -> str:
    vals = np.asarray(sl.values)
    em = vals.ndim == 3
    cols = EM_COLUMNS if em else SCALAR_COLUMNS
    buf = io.StringIO()
    for line in _meta_lines(sl):
        buf.write(line + "\n")
    buf.write(",".join(("axis1", "axis2") + cols) + "\n")
    v1, v2 = sl.plan.axis1.values(), sl.plan.axis2.values()
    for i, x1 in enumerate(v1):
        for j, x2 in enumerate(v2):
            comps = vals[:, i, j] if em else [vals[i, j]]
            parts = [fmt(x1), fmt(x2)]
            for c in comps:
                parts += [fmt(c.real), fmt(c.imag)]
            buf.write(",".join(parts) + "\n")
    return buf.getvalue()


def write_slice(sl: FieldSlice, path) -> Path:
    path = Path(path)
    path.write_text(slice_to_text(sl))
    return path


def _parse_value(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def read_slice(path) -> FieldSlice:
    meta, rows, header = {}, [], None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append([float(x) for x in line.split(",")])
    if header is None:
        raise ValueError(f"{path}: missing header row")

    def axis(tag):
        return Axis(
            meta.pop(f"{tag}_name"),
            float(meta.pop(f"{tag}_min")),
            float(meta.pop(f"{tag}_step")),
            int(meta.pop(f"{tag}_count")),
        )

    a1, a2 = axis("axis1"), axis("axis2")
    meta.pop("fixed_name")
    plan = SlicePlan(a1, a2, float(meta.pop("fixed_value")))
    data = np.array(rows, dtype=float).reshape(a1.count * a2.count, len(header))
    z = data[:, 2::2] + 1j * data[:, 3::2]
    if tuple(header[2:]) == EM_COLUMNS:
        values = z.T.reshape(3, a1.count, a2.count)
    elif tuple(header[2:]) == SCALAR_COLUMNS:
        values = z[:, 0].reshape(a1.count, a2.count)
    else:
        raise ValueError(f"{path}: unknown columns {header}")
    return FieldSlice(plan, values, {k: _parse_value(v) for k, v in meta.items()})


# -- flat tables ------------------------------------------------------------------


def table_text(columns, rows) -> str:
    """Header plus one line per row; dict rows are read by column name."""
    lines = [",".join(columns)]
    for r in rows:
        vals = [r[c] for c in columns] if isinstance(r, dict) else list(r)
        if len(vals) != len(columns):
            raise ValueError("row length does not match the header")
        lines.append(",".join(fmt(v) for v in vals))
    return "\n".join(lines) + "\n"


def write_table(path, columns, rows) -> Path:
    path = Path(path)
    path.write_text(table_text(columns, rows))
    return path


def read_table(path) -> tuple[list[str], list[list[str]]]:
    lines = [l for l in Path(path).read_text().splitlines() if l and not l.startswith("#")]
    return lines[0].split(","), [l.split(",") for l in lines[1:]]


# -- manifests ----------------------------------------------------------------------


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def params_text(params: dict) -> str:
    """Canonical key=value text of a parameter set (sorted keys)."""
    return "".join(f"{k}={fmt(params[k])}\n" for k in sorted(params))


def write_manifest(path, subcommand: str, params: dict, version: str, outputs) -> Path:
    body = params_text(params)
    lines = [
        f"subcommand={subcommand}",
        f"version={version}",
        f"digest={digest(subcommand + chr(10) + body)}",
        f"outputs={';'.join(sorted(str(Path(o).name) for o in outputs))}",
    ]
    lines += [f"param.{line}" for line in body.splitlines()]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_manifest(path) -> dict:
    """Returns ``{"subcommand", "version", "digest", "outputs", "params"}``;
    parameter values stay as text."""
    out = {"params": {}}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"bad manifest line {line!r}")
        if key.startswith("param."):
            out["params"][key[6:]] = value
        elif key == "outputs":
            out[key] = [v for v in value.split(";") if v]
        else:
            out[key] = value
    for key in ("subcommand", "version", "digest", "outputs"):
        if key not in out:
            raise ValueError(f"manifest lacks {key!r}")
    return out
