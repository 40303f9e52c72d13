"""Write data/breast_wisconsin.csv from the MASS ``biopsy`` table.

The table is the UCI Wisconsin (Original) Breast Cancer data, 699 rows x 9
features.  It ships inside the ``rdatasets`` wheel, so no network access to
UCI is needed:

    pip download --no-deps -d /tmp/dl rdatasets
    python scripts/make_breast_csv.py /tmp/dl/rdatasets-*.whl

The 16 missing ``bare_nuclei`` values are filled with that column's median
so that all 699 samples are kept.
"""
import csv
import lzma
import pickle
import sys
import zipfile
from pathlib import Path

import numpy as np

NAMES = [
    "clump_thickness", "uniformity_cell_size", "uniformity_cell_shape",
    "marginal_adhesion", "single_epithelial_cell_size", "bare_nuclei",
    "bland_chromatin", "normal_nucleoli", "mitoses",
]


def main(wheel, out="data/breast_wisconsin.csv"):
    with zipfile.ZipFile(wheel) as z:
        raw = z.read("rdatasets/_data/MASS/biopsy.pkl.compress")
    df = pickle.loads(lzma.decompress(raw))
    feats = df[[f"V{i}" for i in range(1, 10)]].to_numpy(dtype=float)
    col = feats[:, 5]
    col[np.isnan(col)] = np.nanmedian(col)
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(NAMES + ["class"])
        for row, label in zip(feats, df["class"]):
            w.writerow([int(v) for v in row] + [label])
    print(f"wrote {len(feats)} rows to {out}")


if __name__ == "__main__":
    main(*sys.argv[1:])
