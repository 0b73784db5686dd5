#!/usr/bin/env python3
"""Build the benchmark LIBSVM files under data/ from the KEEL copies bundled in
the `keel-ds` wheel on PyPI.

    python3 scripts/prepare_datasets.py [--wheel keel_ds-*.whl] [--out data]

Without --wheel the script runs `pip download --no-deps keel-ds` into a temp dir.

Output files mirror the LIBSVM multiclass distributions:
  pendigits     first 7494 rows of penbased, raw 0..100 features
  vehicle.scale all 846 rows, svm-scale to [-1, 1]
  segment.scale all 2310 rows, svm-scale to [-1, 1]
  vowel.scale   the 528 training rows (TT == 0), 10 formant features, svm-scale to [-1, 1]

The full multiclass Statlog Shuttle set is not bundled there (only binary
subsets), so shuttle.scale must be supplied by hand.
"""
import argparse
import glob
import os
import subprocess
import sys
import tempfile
import zipfile

RAW = "keel_ds/data/balanced/raw/{}.dat"


def read_rows(z, name):
    rows = []
    for line in z.read(RAW.format(name)).decode().splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        rows.append([tok.strip() for tok in line.split(",")])
    return rows


def svm_scale(features, lower=-1.0, upper=1.0):
    d = len(features[0])
    lo = [min(r[j] for r in features) for j in range(d)]
    hi = [max(r[j] for r in features) for j in range(d)]
    out = []
    for r in features:
        row = []
        for j, v in enumerate(r):
            if hi[j] == lo[j]:
                row.append(None)  # svm-scale drops constant features
            else:
                row.append(lower + (upper - lower) * (v - lo[j]) / (hi[j] - lo[j]))
        out.append(row)
    return out


def write_libsvm(path, labels, features):
    with open(path, "w") as f:
        for y, row in zip(labels, features):
            toks = [str(y)]
            for j, v in enumerate(row, start=1):
                if v is None or v == 0:
                    continue
                toks.append("{}:{:.6g}".format(j, v))
            f.write(" ".join(toks) + "\n")
    print("wrote {} ({} rows)".format(path, len(labels)))


def label_ids(raw):
    order = {lab: i + 1 for i, lab in enumerate(sorted(set(raw)))}
    return [order[lab] for lab in raw]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wheel")
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()

    wheel = args.wheel
    if wheel is None:
        tmp = tempfile.mkdtemp()
        subprocess.check_call([sys.executable, "-m", "pip", "download", "--no-deps", "-d", tmp, "keel-ds"])
        wheel = glob.glob(os.path.join(tmp, "keel_ds-*.whl"))[0]
    os.makedirs(args.out, exist_ok=True)
    z = zipfile.ZipFile(wheel)

    rows = read_rows(z, "penbased")[:7494]
    feats = [[float(v) for v in r[:-1]] for r in rows]
    write_libsvm(os.path.join(args.out, "pendigits"), [int(r[-1]) for r in rows], feats)

    for name in ("vehicle", "segment"):
        rows = read_rows(z, name)
        feats = svm_scale([[float(v) for v in r[:-1]] for r in rows])
        write_libsvm(os.path.join(args.out, name + ".scale"), label_ids([r[-1] for r in rows]), feats)

    rows = [r for r in read_rows(z, "vowel") if r[0] == "0"]
    feats = svm_scale([[float(v) for v in r[3:13]] for r in rows])
    write_libsvm(os.path.join(args.out, "vowel.scale"), [int(r[-1]) for r in rows], feats)


if __name__ == "__main__":
    main()
