"""Walk through the four-location example: value functions, optimum, route."""
from pwlship import Instance, PwlFunction
from pwlship.dp import solve_no_duration

F = PwlFunction.from_breakpoints

# arc (1, 2) is forbidden; every other arc is free
c = [[0, 0, 0, 0], [0, 0, None, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
inst = Instance(cost=c, time=c, qmax=3, profit=[
    F([(0, 0), (1, 4)]),      # pick up to 1 unit at cost 4 each
    F([(0, 0), (1, 2)]),
    F([(0, 0), (2, 8)]),
    F([(-2, -10), (0, 0)]),   # deliver up to 2 units, gain 5 each
])

table, sol = solve_no_duration(inst, integer=False)
for i, V in enumerate(table.V):
    print(f"V_{i + 1}: {V}")
print(f"optimum {sol.objective}: visits {[v + 1 for v in sol.visits]}, transfers {sol.y}")
