"""Command-line front door.

Commands: rank, equiv, homogeneous, isometric, dnset, compare-dn, tree,
epsnet.  Inputs are space files (distance matrices) or node-list files
(one bracketed sequence per line); node lists are accepted wherever a
structure is expected and can be read under either view.

Exit codes: 0 success / positive verdict, 1 negative verdict, 2 input
error, 3 resource ceiling exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction

from . import equivalence, gromov, trees
from .errors import BfrankError, ResourceLimitError
from .ordinals import cnf_parse
from .spaces import (
    FiniteMetricSpace,
    format_space_file,
    metric_view,
    parse_space_file,
)


class _Run:
    """Collects the report for one invocation."""

    def __init__(self, args):
        self.command = " ".join(args)
        self.machine = False
        self.inputs = {}
        self.lines = []
        self.result = {}
        self.started = time.monotonic()

    def digest(self, path, text):
        self.inputs[path] = hashlib.sha256(text.encode()).hexdigest()

    def say(self, line=""):
        self.lines.append(line)

    def emit(self, exit_code):
        elapsed = time.monotonic() - self.started
        if self.machine:
            doc = {
                "command": self.command,
                "inputs": self.inputs,
                "result": self.result,
                "exit_code": exit_code,
                "timing_seconds": round(elapsed, 6),
            }
            print(json.dumps(doc, indent=2, sort_keys=True))
        else:
            for line in self.lines:
                print(line)
        return exit_code


def _read(path, run):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise BfrankError("cannot read %s: %s" % (path, e))
    run.digest(path, text)
    return text


def _is_node_list(text):
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        return line.startswith("[")
    return False


def _load_space(path, run) -> FiniteMetricSpace:
    text = _read(path, run)
    if _is_node_list(text):
        return trees.tree_metric_space(trees.parse_nodes(text))
    return parse_space_file(text)


def _load_view(path, run, kind):
    text = _read(path, run)
    if _is_node_list(text):
        tree = trees.parse_nodes(text)
        if kind == "function":
            return trees.tree_function_structure(tree)
        return metric_view(trees.tree_metric_space(tree))
    if kind == "function":
        raise BfrankError(
            "the function view needs a node-list file, not a space file")
    return metric_view(parse_space_file(text))


def _parse_tuple(text):
    text = (text or "").strip()
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise BfrankError("bad tuple %r, expected comma-separated indices" % text)


def _parse_fraction(text):
    try:
        f = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise BfrankError("bad rational %r" % text)
    if "." in text:
        raise BfrankError("decimal literal %r rejected, use p/q" % text)
    return f


# -- commands --------------------------------------------------------------


def _cmd_rank(args, run):
    view = _load_view(args.file, run, args.view)
    max_len = args.max_length if args.max_length is not None else min(view.size, 3)
    family = equivalence.compute_family(view, max_len)
    rank = family.stabilization
    run.say("scott rank: %d" % rank)
    run.say("classes per length (levels 0..%d):" % rank)
    counts = family.class_counts()
    for k in sorted(counts):
        run.say("  length %d: %s" % (k, " ".join(str(c) for c in counts[k])))
    run.result = {"rank": rank,
                  "class_counts": {str(k): v for k, v in counts.items()}}
    return 0


def _cmd_equiv(args, run):
    view = _load_view(args.file, run, args.view)
    a = _parse_tuple(args.tuple_a)
    b = _parse_tuple(args.tuple_b)
    verdict = equivalence.are_equivalent(view, a, b, args.alpha)
    run.say("equivalent at level %d: %s" % (args.alpha, verdict))
    run.result = {"equivalent": verdict, "alpha": args.alpha}
    return 0 if verdict else 1


def _cmd_homogeneous(args, run):
    space = _load_space(args.file, run)
    verdict, witness = equivalence.is_ultrahomogeneous(space)
    run.say("ultrahomogeneous: %s" % verdict)
    payload = {"ultrahomogeneous": verdict}
    if not verdict:
        pretty = ", ".join("%s -> %s" % (space.labels[a], space.labels[b])
                           for a, b in witness)
        run.say("unextendable partial isometry: {%s}" % pretty)
        payload["witness"] = [[a, b] for a, b in witness]
    run.result = payload
    return 0 if verdict else 1


def _cmd_isometric(args, run):
    x = _load_space(args.file_x, run)
    y = _load_space(args.file_y, run)
    anchor_a = _parse_tuple(args.anchor_a)
    anchor_b = _parse_tuple(args.anchor_b)
    emb = gromov.find_isometric_embedding(x, y, anchor_a, anchor_b)
    iso = emb is not None and x.size == y.size
    if emb is None:
        run.say("isometric embedding: none")
        run.result = {"embedding": None, "isometric": False}
        return 1
    pretty = ", ".join("%s -> %s" % (x.labels[a], y.labels[b])
                       for a, b in sorted(emb.items()))
    run.say("embedding: {%s}" % pretty)
    run.say("isometric (sizes equal): %s" % iso)
    run.result = {"embedding": {str(a): b for a, b in sorted(emb.items())},
                  "isometric": iso}
    return 0


def _cmd_dnset(args, run):
    space = _load_space(args.file, run)
    payload = {}
    for n in range(1, args.max_n + 1):
        matrices = gromov.dn_set(space, n)
        run.say("# order %d: %d matrices" % (n, len(matrices)))
        for mat in matrices:
            for row in mat:
                run.say(" ".join(str(v) for v in row))
            run.say()
        payload[str(n)] = [[[str(v) for v in row] for row in mat]
                           for mat in matrices]
    run.result = {"dn_sets": payload}
    return 0


def _cmd_compare_dn(args, run):
    x = _load_space(args.file_x, run)
    y = _load_space(args.file_y, run)
    cmp = gromov.compare_dn(x, y, args.max_n)
    if cmp.equal:
        run.say("distance-matrix sets equal up to order %d" % args.max_n)
        run.result = {"equal": True, "max_n": args.max_n}
        return 0
    side = args.file_x if cmp.witness_side == "left" else args.file_y
    run.say("distance-matrix sets differ first at order %d" % cmp.first_diff_n)
    run.say("matrix present only in %s:" % side)
    for row in cmp.witness:
        run.say("  " + " ".join(str(v) for v in row))
    run.result = {"equal": False, "first_diff_n": cmp.first_diff_n,
                  "witness": [[str(v) for v in row] for row in cmp.witness],
                  "witness_side": cmp.witness_side}
    return 1


def _cmd_tree(args, run):
    if args.n == "w":
        n = None
    else:
        try:
            n = int(args.n)
        except ValueError:
            raise BfrankError("width must be a natural or 'w'")
    alpha = cnf_parse(args.alpha)
    spec = trees.TreeSpec(n=n, alpha=alpha, cap=args.cap,
                          depth_cap=args.depth_cap)
    tree = trees.build_tree(spec, max_nodes=args.max_nodes)
    expected = alpha.times_omega()
    run.say("# nodes: %d" % tree.size)
    run.say("# untruncated family is claimed to have rank %s*w = %s "
            "(informational, not checked here)" % (alpha, expected))
    payload = {"nodes": tree.size, "untruncated_rank_claim": str(expected)}
    if args.emit == "nodes":
        for s in tree.sorted_nodes:
            run.say(trees.node_label(s))
        payload["node_list"] = [trees.node_label(s) for s in tree.sorted_nodes]
    elif args.emit == "space":
        text = format_space_file(trees.tree_metric_space(tree))
        for line in text.splitlines():
            run.say(line)
        payload["space_file"] = text
    else:  # function
        view = trees.tree_function_structure(tree)
        nodes = tree.sorted_nodes
        table = []
        for s in nodes:
            parent = s[:-1] if s else s
            table.append((trees.node_label(s), trees.node_label(parent)))
        for child, parent in table:
            run.say("%s -> %s" % (child, parent))
        payload["function_table"] = [[c, p] for c, p in table]
        del view
    run.result = payload
    return 0


def _cmd_epsnet(args, run):
    space = _load_space(args.file, run)
    eps = _parse_fraction(args.eps)
    net = gromov.epsilon_net(space, eps)
    run.say("net size %d: %s" % (len(net), " ".join(space.labels[p] for p in net)))
    run.result = {"net": net, "net_labels": [space.labels[p] for p in net]}
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="bfrank",
        description="Back-and-forth equivalence, Scott rank, and "
                    "distance-matrix invariants of finite metric spaces.")
    p.add_argument("--machine", action="store_true",
                   help="emit one JSON document instead of text")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common_view(sp):
        sp.add_argument("--view", choices=["metric", "function"],
                        default="metric")

    sp = sub.add_parser("rank", help="Scott rank and stabilization table")
    sp.add_argument("file")
    common_view(sp)
    sp.add_argument("--max-length", type=int, default=None,
                    help="longest tuple length in the printed table")
    sp.set_defaults(func=_cmd_rank)

    sp = sub.add_parser("equiv", help="level-alpha equivalence of two tuples")
    sp.add_argument("file")
    common_view(sp)
    sp.add_argument("--tuple-a", required=True)
    sp.add_argument("--tuple-b", required=True)
    sp.add_argument("--alpha", type=int, required=True)
    sp.set_defaults(func=_cmd_equiv)

    sp = sub.add_parser("homogeneous", help="ultrahomogeneity with witness")
    sp.add_argument("file")
    sp.set_defaults(func=_cmd_homogeneous)

    sp = sub.add_parser("isometric", help="exact isometric embedding search")
    sp.add_argument("file_x")
    sp.add_argument("file_y")
    sp.add_argument("--anchor-a", default="")
    sp.add_argument("--anchor-b", default="")
    sp.set_defaults(func=_cmd_isometric)

    sp = sub.add_parser("dnset", help="distance-matrix sets up to an order")
    sp.add_argument("file")
    sp.add_argument("--max-n", type=int, required=True)
    sp.set_defaults(func=_cmd_dnset)

    sp = sub.add_parser("compare-dn", help="compare distance-matrix sets")
    sp.add_argument("file_x")
    sp.add_argument("file_y")
    sp.add_argument("--max-n", type=int, required=True)
    sp.set_defaults(func=_cmd_compare_dn)

    sp = sub.add_parser("tree", help="build a truncated family member")
    sp.add_argument("--n", required=True, help="width: a natural or 'w'")
    sp.add_argument("--alpha", required=True, help="ordinal expression")
    sp.add_argument("--cap", type=int, default=4)
    sp.add_argument("--depth-cap", type=int, default=None)
    sp.add_argument("--max-nodes", type=int, default=trees.MAX_TREE_NODES)
    sp.add_argument("--emit", choices=["nodes", "space", "function"],
                    default="nodes")
    sp.set_defaults(func=_cmd_tree)

    sp = sub.add_parser("epsnet", help="greedy covering subset")
    sp.add_argument("file")
    sp.add_argument("--eps", required=True)
    sp.set_defaults(func=_cmd_epsnet)
    return p


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    run = _Run(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        run.machine = args.machine
        code = args.func(args, run)
    except ResourceLimitError as e:
        print("resource ceiling: %s" % e, file=sys.stderr)
        return 3
    except (BfrankError, ValueError) as e:
        print("input error: %s" % e, file=sys.stderr)
        return 2
    return run.emit(code)


if __name__ == "__main__":
    sys.exit(main())
