#!/usr/bin/env python3

# hystiff: hysteretic joint stiffness, identified and put to work
# Copyright (C) 2026 the hystiff authors
#
# This file is part of `hystiff`.
#
# `hystiff` is free software: you can redistribute it and/or modify it under
# the terms of the GNU Lesser General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option) any
# later version.
#
# `hystiff` is distributed in the hope that it will be useful, but WITHOUT
# ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS
# FOR A PARTICULAR PURPOSE.  See the GNU Lesser General Public License for more
# details.
#
# You should have received a copy of the GNU Lesser General Public License along
# with `hystiff`.  If not, see <http://www.gnu.org/licenses/>.

import platform
import time

import hystiff
from hystiff import control, fixtures, identify, stats
from hystiff.signal import estimate_frf
from hystiff.sim import SubjectTruth, simulate_protocol

count = 20

protocol = fixtures.experiment_protocol('II.3')
params = fixtures.subject_params('II.3', 'M2')
cfg = protocol.experiment

print('*** Benchmarking hystiff {} ***'.format(hystiff.__version__))
print('Python: {}, {}, {}'.format(
    platform.python_version(), platform.machine(), platform.system())
)
print('Iterations: {}'.format(count))
print('Samples per record: {}'.format(protocol.chirp.size))
print('')

print('simulate_protocol()')
start = time.time()
for i in range(count):
    record = simulate_protocol(SubjectTruth(params, 0.05, seed=i), protocol)
elapsed = time.time() - start
print('  Records per second: {:.1f}'.format(count / elapsed))
print('')

print('estimate_frf()')
start = time.time()
for i in range(count):
    frf = estimate_frf(record, protocol.chirp, protocol.segmentation)
elapsed = time.time() - start
print('  Records per second: {:.1f}'.format(count / elapsed))
print('')

print('fit_all() + compare_models()')
compensated = identify.compensate_inertia(frf, cfg)
start = time.time()
for i in range(count * 50):
    stats.compare_models(identify.fit_all(compensated))
elapsed = time.time() - start
print('  Fits per second: {:.0f}'.format(count * 50 / elapsed))
print('')

print('design_controller()')
plant = control.plant_from_dict(
    dict(K_h=20.0, c_h=0.5, M_h=0.3, M_e=0.6, alpha=4.0)
)
start = time.time()
for i in range(count):
    design = control.design_controller(plant, 10.0)
elapsed = time.time() - start
print('  Designs per second: {:.1f}'.format(count / elapsed))
print('')
