"""
What masking buys: reproducibility and uniqueness
=================================================
"""

import numpy as np

from ternapg.device import BiasModel, build_device
from ternapg.enrollment import enroll
from ternapg.metrics import inter_device_study, intra_device_study, write_csv

creds = [(f"user{k}".encode(), f"pw{k}".encode()) for k in range(20)]
device = build_device(device_seed=3)
tmap = enroll(device, 200, base_seed=0)

masked = intra_device_study(device, tmap, creds, trials=200, seed=1000)
raw = intra_device_study(device, tmap, creds, trials=200, seed=1000, mask=False)
print(f"noise              {masked.noise:.4f}")
print(f"intra HD, masked   mean={masked.intra_hd_mean:.4f} max={masked.intra_hd_max:.4f}")
print(f"intra HD, unmasked mean={raw.intra_hd_mean:.4f} max={raw.intra_hd_max:.4f}")

inter = inter_device_study(BiasModel(), creds, device_pairs=50, seed=1)
print(f"inter HD           mean={inter.inter_hd_mean:.4f} std={inter.inter_hd_std:.4f}")

hist = np.bincount([r.hd for r in raw.rows])
print("unmasked bit errors per response:", dict(enumerate(hist.tolist())))
print(write_csv(raw.rows[:5]), end="")
