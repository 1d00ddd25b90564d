"""
Charging rendezvous: mobile versus parked UGV
=============================================

Low-battery UAVs fly to their UGV to recharge. Under PCTP the UGV drives
toward the summed UAV offsets, faster when UAVs are far away or nearly empty;
the baseline leaves it parked. Every UAV docks once within the charging
distance.
"""

import numpy as np

from agco.charging import ChargingScenario, Uav, run_pctp, run_static
from agco.model import Position
from agco.scenario import gen_charging

# Head on: one UAV ten metres away. The UGV drives to meet it.
s = ChargingScenario(Position(0, 0, 0), [Uav("u0", Position(10, 0, 10), speed=20)])
r = run_pctp(s, dt=0.01)
print(f"head-on: docked at t={r.charge_times['u0']:.2f} min, "
      f"UAV {r.distances['u0']:.2f} m + UGV {r.distances['ugv']:.2f} m")

# Three UAVs spread around one quadrant of the city.
sc = gen_charging(seed=4, uavs_per_ugv=3)[0]
for run in (run_static, run_pctp):
    res = run(sc, dt=0.1, log=True)
    print(f"{res.algorithm:>6}: total {res.total_distance:7.1f} m, last dock at "
          f"{res.time_to_last_charge:5.1f} min, UGV drove {res.distances['ugv']:.1f} m")

# Moving the UGV a step ds along heading h changes the total by
# ds * (1 - sum_i h . u_i), u_i the unit vector to UAV i. So the mobile UGV
# pays off when its UAVs lie roughly to one side, and can lose when they ring it.
for layout in ("cell", "centered"):
    diffs = [run_pctp(x).total_distance - run_static(x).total_distance
             for seed in range(20) for x in gen_charging(seed, 4, layout=layout)]
    print(f"{layout:>8} layout, 4 UAVs: mean pctp - static = {np.mean(diffs):+.1f} m")
