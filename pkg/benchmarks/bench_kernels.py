"""Compare the compiled kernel backend against the pure-Python fallback.

Runs the same workloads twice: once in this process (whatever backend the
import machinery picked, normally the compiled one) and once in a child
process with BFRANK_PURE_PYTHON=1. Prints a side-by-side table.

Usage: python3 benchmarks/bench_kernels.py [--heavy]

--heavy adds the cap-4 truncated tree (16 points, ~2k map classes), which
takes a few minutes under the pure backend.
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workloads(heavy: bool):
    # name -> (family args) for the truncated w-tree T(0, 1, cap)
    caps = [2, 3]
    if heavy:
        caps.append(4)
    return [("rank T(0,1,cap=%d) metric" % c, c, "metric") for c in caps] + \
           [("rank T(0,1,cap=%d) function" % c, c, "function") for c in caps[:2]]


def run_workloads(heavy: bool):
    import bfrank.equivalence as eq
    from bfrank._backend import BACKEND
    from bfrank.ordinals import cnf_parse
    from bfrank.spaces import metric_view
    from bfrank.trees import (TreeSpec, build_tree, tree_function_structure,
                              tree_metric_space)

    out = {"backend": BACKEND, "times": {}}
    for name, cap, view in workloads(heavy):
        t = build_tree(TreeSpec(0, cnf_parse("1"), cap))
        v = (metric_view(tree_metric_space(t)) if view == "metric"
             else tree_function_structure(t))
        eq._machines.clear()
        t0 = time.perf_counter()
        m = eq._Machine(v)
        out["times"][name] = time.perf_counter() - t0
        out["times"].setdefault("_meta", {})[name] = \
            {"rank": m.rank, "classes": len(m.classes)}
    return out


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--heavy", action="store_true")
    ap.add_argument("--emit-json", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.emit_json:
        print(json.dumps(run_workloads(args.heavy)))
        return 0

    here = run_workloads(args.heavy)
    if here["backend"] != "compiled":
        print("warning: compiled backend not available; comparing "
              "pure against pure", file=sys.stderr)

    env = dict(os.environ, BFRANK_PURE_PYTHON="1")
    cmd = [sys.executable, os.path.abspath(__file__), "--emit-json"]
    if args.heavy:
        cmd.append("--heavy")
    pure = json.loads(subprocess.check_output(cmd, env=env, text=True))
    assert pure["backend"] == "python"

    meta = here["times"].pop("_meta")
    pure["times"].pop("_meta", None)
    w = max(len(k) for k in here["times"])
    print("%-*s  %10s  %10s  %8s  %s" % (w, "workload", here["backend"],
                                         "python", "speedup", "result"))
    for name, tc in here["times"].items():
        tp = pure["times"][name]
        info = meta[name]
        print("%-*s  %9.3fs  %9.3fs  %7.1fx  rank=%d classes=%d"
              % (w, name, tc, tp, tp / tc, info["rank"], info["classes"]))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
