"""Export a small instance as an LP model and, if scipy is present, solve it.

Usage: python demos/mip_cross_check.py [out.lp]
The file can also be handed to any MIP solver that reads the LP format.
"""
import random
import sys
from pathlib import Path

from pwlship import Instance, PwlFunction
from pwlship.dp import solve_with_duration
from pwlship.mipexport import export, read_lp

rng = random.Random(7)
n = 7
prof = []
for _ in range(n):
    a, b = -rng.randint(0, 3), rng.randint(0, 3)
    prof.append(PwlFunction.from_breakpoints([(x, rng.randint(-6, 6) if x else 0) for x in sorted({a, 0, b})]))
cost = [[rng.randint(1, 6) if j > i else None for j in range(n)] for i in range(n)]
inst = Instance(cost=cost, time=cost, profit=prof, qmax=5, tmax=12, name="demo7")

path = sys.argv[1] if len(sys.argv) > 1 else "demo7.lp"
export(inst, "beta", path)
_, sol = solve_with_duration(inst)
print(f"wrote {path}; DP optimum {sol.objective} via {sol.visits}")
print("model size:", read_lp(path).counts())
try:
    sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
    from lpsolve import solve_lp_model
    print("HiGHS objective:", solve_lp_model(read_lp(path))[0])
except ImportError:
    print("scipy not installed; solve the file with an external MIP solver")
