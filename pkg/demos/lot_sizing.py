"""Solve a few generated lot-sizing instances and print the savings split."""
import sys
import time

from pwlship.bnb import solve_bbdp
from pwlship.instgen import generate_lswrc
from pwlship.lswrc import plan_from_solution, reduce_to_areltp, savings_decomposition

n = int(sys.argv[1]) if len(sys.argv) > 1 else 20
print(f"{'instance':32} {'cost':>8} {'nodes':>5} {'sec':>6} {'dZ':>7} {'prod':>7} {'setup':>7} {'inv':>7}")
for qc in ("small", "medium", "large"):
    for seed in range(3):
        ls = generate_lswrc(n, qc, "medium", seed)
        inst, _ = reduce_to_areltp(ls)
        t0 = time.perf_counter()
        res = solve_bbdp(inst)
        dt = time.perf_counter() - t0
        plan = plan_from_solution(ls, res.solution)
        s = savings_decomposition(ls, plan)
        print(f"{ls.name:32} {plan.cost:>8} {res.nodes:>5} {dt:>6.2f} "
              f"{s.dz:>7.3f} {s.prod:>7.3f} {s.setup:>7.3f} {s.inv:>7.3f}")
