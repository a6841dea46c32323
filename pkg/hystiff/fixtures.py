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

"""
Experiment presets and identified subject parameters shipped with `hystiff`.

The data lives in ``hystiff/data/subject-parameters.json``.  Fifteen
experiments in three groups (I, II, III) vary the exoskeleton load, the
augmentation factor, the grip force and the bias torque; each experiment has
one identified parameter row per model.

>>> [row['exp'] for row in subject_rows('M2')][:3]
['I.1', 'I.2', 'I.3']
>>> subject_params('II.3', 'M3')
ModelParamsM3(K_h=25.95, C_h=15.48, B_h=0.26, M=1.03)

"""

import functools
import logging
from os import path

from . import ExperimentConfig, ValidationError, MODELS, load, params_from_dict
from .signal import ChirpSpec, SegmentationSpec
from .sim import ProtocolSpec


log = logging.getLogger()

DATA_DIR = path.join(path.dirname(path.abspath(__file__)), 'data')
SUBJECT_PARAMETERS = path.join(DATA_DIR, 'subject-parameters.json')
SUPPORTED_VERSION = 1


@functools.lru_cache(maxsize=None)
def _fixture(filename=SUBJECT_PARAMETERS):
    doc = load(filename)
    if doc.get('version') != SUPPORTED_VERSION:
        raise ValidationError(
            '{!r}: need fixture version {}; got {!r}'.format(
                filename, SUPPORTED_VERSION, doc.get('version')
            )
        )
    return doc


def experiment_labels():
    return [e['exp'] for e in _fixture()['experiments']]


def _experiment(label):
    for e in _fixture()['experiments']:
        if e['exp'] == label:
            return e
    raise ValidationError(
        'unknown experiment {!r}; expected one of {}'.format(
            label, ', '.join(experiment_labels())
        )
    )


def exoskeleton_inertia(load):
    """
    Exoskeleton moment of inertia with a *load* (kg) on its arm.
    """
    exo = _fixture()['exoskeleton']
    return exo['base_inertia'] + load * exo['load_arm'] ** 2


def experiment_config(label):
    """
    `ExperimentConfig` of a preset experiment.

    >>> cfg = experiment_config('II.5')
    >>> cfg.alpha, cfg.bias, round(cfg.M_e, 6)
    (4.0, 16.0, 1.01125)

    """
    e = _experiment(label)
    return ExperimentConfig(
        alpha=e['alpha'],
        M_e=exoskeleton_inertia(e['load']),
        exp=label,
        load=e['load'],
        grip=e['grip'],
        bias=e['bias_per_alpha'] * e['alpha'],
    )


def experiment_protocol(label, **overrides):
    """
    `sim.ProtocolSpec` of a preset experiment.

    Keyword arguments override chirp and segmentation fields, e.g.
    ``experiment_protocol('I.1', duration=20.0, n_segments=2)``.
    """
    e = _experiment(label)
    p = dict(_fixture()['protocol'])
    p.update(omega_min=e['omega_min'], omega_max=e['omega_max'])
    p['amplitude'] = p.pop('amplitude_per_alpha') * e['alpha']
    unknown = set(overrides) - set(p)
    if unknown:
        raise ValidationError(
            'unknown protocol field(s): {}'.format(', '.join(sorted(unknown)))
        )
    p.update(overrides)
    chirp = ChirpSpec(p['omega_min'], p['omega_max'], p['duration'],
        p['amplitude'], p['sample_rate']
    )
    seg = SegmentationSpec(p['n_segments'], p['segment_period'], p['used_duration'])
    return ProtocolSpec(chirp, seg, experiment_config(label))


def subject_rows(model):
    """
    Parameter rows of *model* (``'M1'``, ``'M2'`` or ``'M3'``) in experiment
    order, as ``dict`` including the reported ``omega_n`` and ``zeta``.
    """
    if model not in MODELS:
        raise ValidationError(
            "model must be 'M1', 'M2' or 'M3'; got {!r}".format(model)
        )
    return [dict(r) for r in _fixture()['parameters'] if r['model'] == model]


def subject_params(label, model):
    for row in subject_rows(model):
        if row['exp'] == label:
            return params_from_dict(row)
    raise ValidationError(
        'no {} parameters for experiment {!r}'.format(model, label)
    )
