"""
Simulated SRAM power-up and ternary enrollment
==============================================

Build a 65536-cell device, power it up a few times, then characterize it
into a ternary map where unstable cells are marked X.
"""

import numpy as np

from ternapg.device import BiasModel, build_device, power_up_read
from ternapg.enrollment import enroll, puf_noise

# 95% of cells always wake up the same way; the rest have a weak preference
device = build_device(65536, BiasModel(stable_fraction=0.95), device_seed=2021)

# two power cycles disagree only on (some of) the fuzzy cells
a = power_up_read(device, cycle_seed=1).bits
b = power_up_read(device, cycle_seed=2).bits
print("cells that flipped between two power-ups:", int(np.count_nonzero(a != b)))

# enrollment: any disagreement over R reads marks the cell fuzzy
for reads in (2, 10, 200):
    tmap = enroll(device, reads, base_seed=0)
    print(f"R={reads:4d}  noise={puf_noise(tmap):.4f}")

print("first 64 cells:", tmap.render()[:64])
