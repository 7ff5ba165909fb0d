#!/usr/bin/env python3
"""Build the dualplan_py extension and exercise its API end to end.

Run from anywhere: `python3 python/smoke_test.py`
"""

import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def build_and_import():
    subprocess.run(["cargo", "build", "-p", "dualplan-py"], cwd=ROOT, check=True)
    debug = ROOT / "target" / "debug"
    for built, loadable in [
        ("libdualplan_py.so", "dualplan_py.so"),
        ("libdualplan_py.dylib", "dualplan_py.so"),
        ("dualplan_py.dll", "dualplan_py.pyd"),
    ]:
        if (debug / built).exists():
            staging = Path(tempfile.mkdtemp(prefix="dualplan-py-"))
            shutil.copy(debug / built, staging / loadable)
            sys.path.insert(0, str(staging))
            import dualplan_py

            return dualplan_py
    sys.exit("no built extension found under target/debug")


def main():
    dp = build_and_import()
    checks = 0

    def check(label, ok):
        nonlocal checks
        checks += 1
        print(f"  {label}: {'ok' if ok else 'FAIL'}")
        if not ok:
            sys.exit(1)

    task = dp.Task(
        atoms=["p", "q"],
        init=["p"],
        goal=["q"],
        actions=[("a1", ["p"], ["q"], ["p"])],
    )
    check("constructing a task", task.width == 2 and task.normalized)

    dual = dp.dualize(task)
    check(
        "dual complements goal and init",
        dual.init == ["p"] and dual.goal == ["q"] and dual.dualized,
    )
    check("dualizing twice is the identity", dp.dualize(dual) == task)

    out = dp.solve(task, direction="forward", strategy="bfs")
    check("forward bfs finds the plan", out["verdict"] == "plan-found" and out["plan"] == ["a1"])
    trace = dp.validate(task, out["plan"])
    check("the plan validates", trace[-1] == ["q"])

    back = dp.solve(task, direction="backward", strategy="bfs", record_layers=True)
    fwd_dual = dp.solve(dual, direction="forward", strategy="bfs", record_layers=True)
    check(
        "backward layers mirror the dual's forward layers",
        len(back["layers"]) == len(fwd_dual["layers"]),
    )

    check("gtf round-trips", dp.read_gtf(dp.write_gtf(task)) == task)

    domain, problem = dp.write_pddl(task)
    reground = dp.ground_pddl(domain, problem, reachability_prune=False)
    check("pddl export re-grounds to the same shape", reground.width == task.width)

    micro = ROOT / "domains" / "micro-logistics"
    grounded = dp.ground_pddl(
        (micro / "domain.pddl").read_text(), (micro / "problem.pddl").read_text()
    )
    out = dp.solve(grounded)
    check(
        "micro-logistics solves",
        out["verdict"] == "plan-found" and dp.validate(grounded, out["plan"]) is not None,
    )

    dual_plan = dp.solve(dp.dualize(grounded), direction="forward")["plan"]
    primal = dp.dual_plan_to_primal(dp.dualize(grounded), dual_plan)
    check("dual plan transfers back", dp.validate(grounded, primal) is not None)

    inv = dp.invariants(grounded)
    binv = dp.invariants(grounded, direction="backward")
    check("invariants come back", "mutex" in inv and "clauses" in binv)

    agreements = 0
    for seed in range(50):
        t = dp.random_task(atoms=5, actions=5, seed=seed)
        solved = dp.solve(t, strategy="bfs")["verdict"] == "plan-found"
        if solved == dp.solvable_bruteforce(t) == (
            dp.solve(dp.dualize(t), strategy="bfs")["verdict"] == "plan-found"
        ):
            agreements += 1
    check("50 random tasks: search, oracle and dual agree", agreements == 50)

    print(f"smoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
