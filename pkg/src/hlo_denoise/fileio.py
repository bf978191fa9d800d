"""OBJ / OFF mesh files and CSV scalar fields."""
from __future__ import annotations

import io
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IoError, LengthMismatch, MeshError, ParseError, UnsupportedFormat
from .mesh import build_mesh

FORMATS = ("obj", "off")


def _detect_format(path, fmt):
    if fmt not in (None, "auto"):
        if fmt not in FORMATS:
            raise UnsupportedFormat(f"unsupported mesh format {fmt!r}")
        return fmt
    if path is None:
        raise UnsupportedFormat("cannot infer the format of a stream; pass format='obj' or 'off'")
    ext = Path(path).suffix.lower().lstrip(".")
    if ext not in FORMATS:
        raise UnsupportedFormat(f"cannot infer mesh format from extension {ext!r}")
    return ext


def _float(tok, lineno):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", lineno) from None


def _fan(poly):
    return [(poly[0], poly[k], poly[k + 1]) for k in range(1, len(poly) - 1)]


def _parse_obj(lines):
    verts, faces = [], []
    for lineno, line in enumerate(lines, 1):
        parts = line.split()
        if not parts:
            continue
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ParseError("vertex needs 3 coordinates", lineno)
            verts.append([_float(t, lineno) for t in parts[1:4]])
        elif tag == "f":
            if len(parts) < 4:
                raise ParseError("face needs at least 3 vertices", lineno)
            poly = []
            for tok in parts[1:]:
                head = tok.split("/", 1)[0]
                try:
                    k = int(head)
                except ValueError:
                    raise ParseError(f"bad face index {tok!r}", lineno) from None
                if k == 0:
                    raise ParseError("OBJ indices are 1-based; got 0", lineno)
                # negative indices are relative to the vertices read so far
                poly.append(k - 1 if k > 0 else len(verts) + k)
            faces.extend(_fan(poly))
    return verts, faces


def _parse_off(lines):
    # strip comments and blanks, keep line numbers for diagnostics
    rows = []
    for lineno, line in enumerate(lines, 1):
        body = line.split("#", 1)[0].strip()
        if body:
            rows.append((lineno, body))
    if not rows:
        raise ParseError("empty file", 1)
    lineno, head = rows[0]
    if not head.startswith("OFF"):
        raise ParseError("missing OFF header", lineno)
    rest = head[3:].split()
    cursor = 1
    if not rest:
        if len(rows) < 2:
            raise ParseError("missing element counts", lineno)
        lineno, counts_line = rows[1]
        rest = counts_line.split()
        cursor = 2
    try:
        nv, nf = int(rest[0]), int(rest[1])
    except (ValueError, IndexError):
        raise ParseError("bad element counts", lineno) from None
    if len(rows) < cursor + nv + nf:
        raise ParseError(f"expected {nv} vertices and {nf} faces", rows[-1][0])
    verts = []
    for lineno, body in rows[cursor:cursor + nv]:
        toks = body.split()
        if len(toks) < 3:
            raise ParseError("vertex needs 3 coordinates", lineno)
        verts.append([_float(t, lineno) for t in toks[:3]])
    faces = []
    for lineno, body in rows[cursor + nv:cursor + nv + nf]:
        toks = body.split()
        try:
            k = int(toks[0])
            poly = [int(t) for t in toks[1:1 + k]]
        except (ValueError, IndexError):
            raise ParseError("bad face record", lineno) from None
        if k < 3 or len(poly) != k:
            raise ParseError("face record has wrong vertex count", lineno)
        faces.extend(_fan(poly))
    return verts, faces


def read_mesh(source, format="auto"):
    """Read an OBJ or OFF mesh from a path or a text/binary stream.

    Positions and faces are kept exactly as stored; polygons are fan
    triangulated. Only ``v`` and ``f`` records of OBJ files are used.
    """
    path = None
    if isinstance(source, (str, os.PathLike)):
        path = os.fspath(source)
        fmt = _detect_format(path, format)
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise IoError(f"cannot read {path}: {exc.strerror or exc}") from exc
    else:
        fmt = _detect_format(None, format)
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    lines = text.splitlines()
    verts, faces = (_parse_obj if fmt == "obj" else _parse_off)(lines)
    try:
        return build_mesh(np.array(verts, dtype=np.float64).reshape(-1, 3), faces)
    except MeshError as exc:
        raise ParseError(str(exc)) from exc


def _fmt(x):
    # shortest repr that round-trips exactly
    return repr(float(x))


def _obj_text(mesh):
    buf = io.StringIO()
    for p in mesh.positions:
        buf.write(f"v {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}\n")
    for f in mesh.faces + 1:
        buf.write(f"f {f[0]} {f[1]} {f[2]}\n")
    return buf.getvalue()


def _off_text(mesh):
    buf = io.StringIO()
    buf.write(f"OFF\n{mesh.n_vertices} {mesh.n_faces} 0\n")
    for p in mesh.positions:
        buf.write(f"{_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}\n")
    for f in mesh.faces:
        buf.write(f"3 {f[0]} {f[1]} {f[2]}\n")
    return buf.getvalue()


def write_mesh(mesh, target, format="auto"):
    """Write ``mesh`` as OBJ or OFF; coordinates round-trip exactly."""
    if mesh is None or mesh.n_faces == 0:
        raise IoError("refusing to write a mesh without faces")
    path = os.fspath(target) if isinstance(target, (str, os.PathLike)) else None
    fmt = _detect_format(path, format)
    text = _obj_text(mesh) if fmt == "obj" else _off_text(mesh)
    if path is None:
        target.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from exc


@dataclass(frozen=True)
class ScalarField:
    target: str  # "vertex" or "face"
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        if self.target not in ("vertex", "face"):
            raise ValueError(f"target must be 'vertex' or 'face', got {self.target!r}")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64).ravel())


def write_scalar_field(field, target, mesh=None):
    """Write ``index,value`` CSV rows; checks the length against ``mesh`` if given."""
    if mesh is not None:
        expected = mesh.n_vertices if field.target == "vertex" else mesh.n_faces
        if field.values.size != expected:
            raise LengthMismatch(
                f"{field.target} field has {field.values.size} values, mesh has {expected}"
            )
    lines = ["index,value"]
    lines += [f"{i},{_fmt(v)}" for i, v in enumerate(field.values)]
    text = "\n".join(lines) + "\n"
    if not isinstance(target, (str, os.PathLike)):
        target.write(text)
        return
    try:
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {os.fspath(target)}: {exc.strerror or exc}") from exc
