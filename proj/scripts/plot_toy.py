#!/usr/bin/env python3
# Copyright 2026 The irelab Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Plot the CSVs written by `irelab toy`."""

import argparse
import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_rows(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    # The last row only carries the final step and status.
    return [r for r in rows[:-1] if r["loss"]]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("dir", type=Path, help="directory written by `irelab toy`")
    ap.add_argument("-o", "--output", type=Path, default=None)
    args = ap.parse_args()

    fig, (ax_gd, ax_trace, ax_path) = plt.subplots(1, 3, figsize=(15, 4.5))

    for name, label in (("toy_gd_lr1.csv", "lr = 1"), ("toy_gd_lr2.csv", "lr = 2")):
        rows = read_rows(args.dir / name)
        ax_gd.semilogy([int(r["step"]) for r in rows], [max(float(r["loss"]), 1e-300) for r in rows], label=label)
    ax_gd.set_xlabel("step")
    ax_gd.set_ylabel("loss")
    ax_gd.set_title("GD from (0.5, 0.5)")
    ax_gd.legend()

    by_kappa = defaultdict(list)
    for r in read_rows(args.dir / "toy_ire_kappa.csv"):
        by_kappa[float(r["kappa"])].append(r)
    for kappa, rows in sorted(by_kappa.items()):
        steps = [int(r["step"]) for r in rows]
        ax_trace.plot(steps, [float(r["trace_hessian"]) for r in rows], label=f"kappa = {kappa:g}")
        ax_path.plot([float(r["theta_0"]) for r in rows], [float(r["theta_1"]) for r in rows], ".-", ms=2,
                     label=f"kappa = {kappa:g}")
    ax_trace.set_xscale("symlog")
    ax_trace.set_xlabel("step")
    ax_trace.set_ylabel("trace of Hessian")
    ax_trace.set_title("GD-IRE, lr = 0.5")
    ax_trace.legend()
    ax_path.set_xlabel("u")
    ax_path.set_ylabel("v")
    ax_path.set_title("iterates")

    fig.tight_layout()
    out = args.output or args.dir / "toy.png"
    fig.savefig(out, dpi=120)
    print(out)


if __name__ == "__main__":
    main()
