"""Rebuild the MUTAG graphs shipped with the ``graphkernels`` source package.

The ``graphkernels`` 0.2.1 sdist contains ``graphkernels/data.mutag``, a
NumPy object array of pickled igraph graphs (188 molecules, atom-type vertex
labels, integer-coded edge labels). It carries no class labels. This script
reads it without igraph and writes the graphs in TU text format::

    pip download graphkernels==0.2.1 --no-deps --no-binary :all: -d /tmp/gk
    tar xf /tmp/gk/graphkernels-0.2.1.tar.gz -C /tmp/gk
    python scripts/mutag_from_graphkernels.py /tmp/gk/graphkernels-0.2.1 data/MUTAG

Pass ``--class-labels FILE`` (one label per line, same graph order) to also
write ``MUTAG_graph_labels.txt``; without it only Gram matrices can be built.
"""
import argparse
import pickle
from pathlib import Path

import numpy as np

from lcskernel import Dataset, Graph, save_tudataset


class _IgraphStub:
    # igraph pickles as Graph(n, edges, directed, graph_attrs, vertex_attrs, edge_attrs)
    def __init__(self, *args):
        self.args = args


class _Unpickler(pickle.Unpickler):
    def find_class(self, module, name):
        if module == "igraph":
            return _IgraphStub
        return super().find_class(module, name)


def read_graphkernels_mutag(path):
    path = Path(path)
    if path.is_dir():
        path = path / "graphkernels" / "data.mutag"
    with open(path, "rb") as fh:
        version = np.lib.format.read_magic(fh)
        np.lib.format._read_array_header(fh, version)
        objs = _Unpickler(fh, encoding="latin1").load()
    raw = [g.args for g in objs]
    # edge labels are sparse integer codes; map them to 1..k in sorted order
    codes = sorted({int(x) for args in raw for x in args[5]["label"]})
    remap = {c: k + 1 for k, c in enumerate(codes)}
    graphs = []
    for gid, (n, edges, directed, _, vattrs, eattrs) in enumerate(raw):
        assert not directed
        graphs.append(Graph.from_edges(
            n, edges,
            [int(x) for x in vattrs["label"]],
            [remap[int(x)] for x in eattrs["label"]],
            id=gid,
        ))
    return graphs


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("source", help="unpacked graphkernels sdist, or the data.mutag file")
    parser.add_argument("out", help="output directory")
    parser.add_argument("--class-labels", help="text file with one class label per graph")
    args = parser.parse_args()
    graphs = read_graphkernels_mutag(args.source)
    labels = [0] * len(graphs)
    if args.class_labels:
        labels = [int(float(x)) for x in Path(args.class_labels).read_text().split()]
    ds = Dataset(graphs, labels, "MUTAG", has_edge_labels=True)
    save_tudataset(ds, args.out, class_labels=bool(args.class_labels))
    n_v = sum(g.n_vertices for g in graphs) / len(graphs)
    n_e = sum(g.n_edges for g in graphs) / len(graphs)
    print(f"wrote {len(graphs)} graphs to {args.out} (mean |V| {n_v:.2f}, mean |E| {n_e:.2f})")


if __name__ == "__main__":
    main()
