#!/usr/bin/env python3
"""Checking hand-written backpropagation through time.

Every parameter of a tiny model is nudged both ways and the loss change is
compared with the analytic gradient. Then one gradient component is
corrupted on purpose to show what a failure looks like.
"""
import numpy as np

from sparsefield import NeuralReconstructor, Placement, SnapshotSeries, gradient_check
from sparsefield.neural_recon import Normalizer, backward

placement = Placement((0, 2), 1, 3)
batch = SnapshotSeries(np.random.default_rng(0).uniform(0, 1, (3, 3)), 1, 3)
model = NeuralReconstructor.initialize(placement, seed=0, norm=Normalizer(0.0, 1.0))

report = gradient_check(model, batch)
print(report)
for group, dev in report.group_deviation.items():
    print(f"  {group:<9} {dev:.2e}")

grads = backward(model, batch)
grads["mlp.1.w"] = grads["mlp.1.w"].copy()
grads["mlp.1.w"][0, 1] *= -1.0
print("\nwith one component negated:")
print(gradient_check(model, batch, analytic=grads))
