"""
Geometry files and matrix dumps
===============================

Geometries are stored as plain-text patches; assembled operators can be
written as "row col value" lines for inspection in other tools.
"""
import tempfile
from pathlib import Path

from mixedplate.benchmarks import get_benchmark
from mixedplate.io import dump_forms, format_patch, load_matrix, read_patch, write_patch
from mixedplate.pipeline import Discretization

geo = get_benchmark("disk").geometry()
print(format_patch(geo))

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "disk.patch"
    write_patch(geo, path)
    again = read_patch(path)
    print("round trip bcs:", [b.value for b in again.bcs])

    disc = Discretization(get_benchmark("square").problem(1, 2))
    for p in dump_forms(disc, tmp, prefix="square_"):
        A = load_matrix(p)
        print(f"{p.name:28s} shape {A.shape}  nnz {A.nnz}")
    print((Path(tmp) / "square_K_pp.txt").read_text().splitlines()[:4])
