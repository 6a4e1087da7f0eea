"""Plain-text formats: geometry patches, coordinate matrix dumps, key=value config.

Patch format (``#`` starts a comment)::

    name disk
    degree 2 2
    knots_u 0 0 0 1 1 1
    knots_v 0 0 0 1 1 1
    size 3 3
    bc south simply_supported      # one line per side: south east north west
    degenerate 0 0                 # optional, parameter points with det J = 0
    cp 0 0 -0.70710678 -0.70710678 1.0   # i j x y weight
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .geometry import BC, SIDES, GeometryPatch

__all__ = ["write_patch", "read_patch", "format_patch", "parse_patch", "dump_matrix", "load_matrix",
           "dump_forms", "read_config", "FormatError"]


class FormatError(ValueError):
    pass


def format_patch(patch: GeometryPatch) -> str:
    fmt = lambda a: " ".join(repr(float(x)) for x in a)  # noqa: E731
    nu, nv = patch.weights.shape
    lines = [
        "# mixedplate patch",
        f"name {patch.name}",
        f"degree {patch.degree[0]} {patch.degree[1]}",
        f"knots_u {fmt(patch.knots[0])}",
        f"knots_v {fmt(patch.knots[1])}",
        f"size {nu} {nv}",
    ]
    lines += [f"bc {side} {bc.value}" for side, bc in zip(SIDES, patch.bcs)]
    lines += [f"degenerate {fmt(pt)}" for pt in patch.degenerate_points]
    for j in range(nv):
        for i in range(nu):
            x, y = patch.control_points[i, j]
            lines.append(f"cp {i} {j} {float(x)!r} {float(y)!r} {float(patch.weights[i, j])!r}")
    return "\n".join(lines) + "\n"


def parse_patch(text: str) -> GeometryPatch:
    fields = {"bc": {}, "degenerate": [], "cp": []}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        try:
            if key == "name":
                fields["name"] = " ".join(rest)
            elif key == "degree":
                fields["degree"] = tuple(int(x) for x in rest)
            elif key in ("knots_u", "knots_v", "size"):
                fields[key] = [float(x) for x in rest] if key != "size" else [int(x) for x in rest]
            elif key == "bc":
                fields["bc"][rest[0]] = BC.parse(rest[1])
            elif key == "degenerate":
                fields["degenerate"].append(tuple(float(x) for x in rest))
            elif key == "cp":
                fields["cp"].append((int(rest[0]), int(rest[1]), *map(float, rest[2:5])))
            else:
                raise FormatError(f"line {lineno}: unknown key {key!r}")
        except (IndexError, ValueError) as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
    for key in ("degree", "knots_u", "knots_v", "size"):
        if key not in fields:
            raise FormatError(f"missing {key!r}")
    nu, nv = fields["size"]
    P = np.full((nu, nv, 2), np.nan)
    W = np.full((nu, nv), np.nan)
    for i, j, x, y, w in fields["cp"]:
        P[i, j] = (x, y)
        W[i, j] = w
    if np.isnan(W).any():
        raise FormatError("incomplete control net")
    bcs = tuple(fields["bc"].get(side, BC.CLAMPED) for side in SIDES)
    return GeometryPatch(fields["degree"], (np.array(fields["knots_u"]), np.array(fields["knots_v"])),
                         P, W, bcs, fields.get("name", "patch"), tuple(fields["degenerate"]))


def write_patch(patch: GeometryPatch, path) -> None:
    Path(path).write_text(format_patch(patch))


def read_patch(path) -> GeometryPatch:
    return parse_patch(Path(path).read_text())


def dump_matrix(A, path) -> None:
    """Write ``row col value`` lines (0-based) after a ``# shape m n`` header."""
    A = sp.coo_matrix(A) if not isinstance(A, np.ndarray) or A.ndim == 2 else sp.coo_matrix(A[:, None])
    A.sum_duplicates()
    with open(path, "w") as fh:
        fh.write(f"# shape {A.shape[0]} {A.shape[1]}\n")
        for r, c, v in zip(A.row, A.col, A.data):
            fh.write(f"{r} {c} {v:.17g}\n")


def load_matrix(path) -> sp.csr_matrix:
    with open(path) as fh:
        head = fh.readline().split()
        if head[:2] != ["#", "shape"]:
            raise FormatError("missing shape header")
        shape = (int(head[2]), int(head[3]))
        body = fh.read()
    data = np.loadtxt(body.splitlines(), ndmin=2) if body.strip() else np.zeros((0, 3))
    if data.size == 0:
        return sp.csr_matrix(shape)
    return sp.csr_matrix((data[:, 2], (data[:, 0].astype(int), data[:, 1].astype(int))), shape=shape)


def dump_forms(disc, directory, prefix: str = "") -> list:
    """Dump all assembled operators of a discretization; returns written paths."""
    os.makedirs(directory, exist_ok=True)
    F = disc.forms
    items = {
        "K_pp": F.K_pp, "A_phiphi": F.A_phiphi, "B_pphi": F.B_pphi, "M_tr": F.M_tr,
        "L_phi": F.L_phi, "L_p": F.L_p, "R": F.R, "f": F.f_vec[:, None],
        "Z": disc.multipliers.basis.Z, "constraints": disc.multipliers.constraints.matrix,
    }
    paths = []
    for name, A in items.items():
        path = Path(directory) / f"{prefix}{name}.txt"
        dump_matrix(A, path)
        paths.append(path)
    return paths


def read_config(path) -> dict:
    """``key = value`` lines; blank lines and ``#`` comments are ignored."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out
