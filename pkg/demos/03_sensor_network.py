#!/usr/bin/env python3
"""Sensor placements as a radio network.

Each sensor talks to neighbours within an L1 radius tau. Pivoted-QR
placements tend to spread out, so the network may fall apart into islands;
relay nodes along grid paths reconnect it. The heatmap marks sensors and
relays in white.
"""
from pathlib import Path

from sparsefield import analyze_connectivity, insert_bridges, select_sampling_locations, synth_series
from sparsefield.render import heatmap_pixels, write_pgm

series = synth_series("traveling_gaussians", 20, 20, 120, seed=3, noise_level=0.02)
placement = select_sampling_locations(series, 12)

for tau in (2, 3, 4):
    rep = analyze_connectivity(placement, tau)
    print(f"tau={tau}: omega={rep.omega} every-node-has-neighbour={rep.connected} "
          f"components={rep.n_components}")

bridged, rep = insert_bridges(placement, 3)
print(f"\nafter bridging at tau=3: {len(rep.bridges_added)} relays added, "
      f"components={rep.n_components}, omega={rep.omega}")

out = Path("network.pgm")
write_pgm(out, heatmap_pixels(series.values[0], 20, 20, sensors=bridged.indices))
print(f"wrote {out}")
