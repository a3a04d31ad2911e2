#!/usr/bin/env python3
# Copyright 2026 The viewx Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Turn a LINQS-format citation dataset (.content + .cites) into a graph bundle.

Nodes keep the order of the .content file. The split follows the usual
20-per-class / 500 / 1000 recipe, drawn from a fixed-seed permutation.
"""
import argparse
import json
import os
import random


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--content", required=True)
    ap.add_argument("--cites", required=True)
    ap.add_argument("--name", default="cora")
    ap.add_argument("--out", required=True)
    ap.add_argument("--per-class", type=int, default=20)
    ap.add_argument("--val", type=int, default=500)
    ap.add_argument("--test", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ids, feats, names = [], [], []
    with open(args.content) as f:
        for line in f:
            parts = line.rstrip("\n").split("\t")
            ids.append(parts[0])
            feats.append(parts[1:-1])
            names.append(parts[-1])
    index = {pid: i for i, pid in enumerate(ids)}
    classes = sorted(set(names))
    labels = [classes.index(c) for c in names]

    edges = set()
    with open(args.cites) as f:
        for line in f:
            a, b = line.split()
            u, v = index[a], index[b]
            if u != v:
                edges.add((min(u, v), max(u, v)))
    edges = sorted(edges)

    rng = random.Random(args.seed)
    order = list(range(len(ids)))
    rng.shuffle(order)
    train, taken = [], [0] * len(classes)
    for node in order:
        if taken[labels[node]] < args.per_class:
            taken[labels[node]] += 1
            train.append(node)
    chosen = set(train)
    rest = [node for node in order if node not in chosen]
    val = rest[: args.val]
    test = rest[args.val : args.val + args.test]

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "meta.json"), "w") as f:
        json.dump({"name": args.name, "num_nodes": len(ids),
                   "num_features": len(feats[0]), "num_classes": len(classes),
                   "directed": False}, f)
        f.write("\n")
    with open(os.path.join(args.out, "edges.tsv"), "w") as f:
        for u, v in edges:
            f.write(f"{u}\t{v}\n")
    with open(os.path.join(args.out, "features.tsv"), "w") as f:
        for i, row in enumerate(feats):
            for j, x in enumerate(row):
                if x != "0":
                    f.write(f"{i}\t{j}\t{x}\n")
    with open(os.path.join(args.out, "labels.tsv"), "w") as f:
        for i, y in enumerate(labels):
            f.write(f"{i}\t{y}\n")
    with open(os.path.join(args.out, "split.json"), "w") as f:
        json.dump({"train": sorted(train), "val": sorted(val), "test": sorted(test)}, f)
        f.write("\n")
    print(f"{args.name}: {len(ids)} nodes, {len(edges)} edges, "
          f"{len(feats[0])} features, {len(classes)} classes, "
          f"split {len(train)}/{len(val)}/{len(test)}")


if __name__ == "__main__":
    main()
