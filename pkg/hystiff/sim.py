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
Synthetic subjects for driving the identification pipeline.

Hysteretic damping has no causal time-domain realization, so a subject is
simulated one frequency at a time: every segment slot of the protocol holds
the steady-state response to a sinusoid at that slot's frequency.  Bias and
gravity torques are taken as already cancelled, so records are zero-mean.
"""

import cmath
import logging
from collections import namedtuple

import numpy as np

from . import (
    TimeSeries, ExperimentConfig, ValidationError, NumericalError, MODELS,
    params_from_dict, _nonnegative, _positive,
)
from .signal import ChirpSpec, SegmentationSpec, segment_frequencies


log = logging.getLogger()


class SubjectTruth(namedtuple('SubjectTruth', 'params noise_sigma_torque noise_sigma_angle seed')):
    """
    Ground-truth human model plus measurement noise levels.

    *params* are the human's own parameters; the exoskeleton inertia is
    applied downstream by compensation.
    """

    __slots__ = ()

    def __new__(cls, params, noise_sigma_torque=0.0, noise_sigma_angle=0.0, seed=0):
        if not isinstance(params, tuple(MODELS.values())):
            raise ValidationError(
                'params must be ModelParamsM1, M2 or M3; got {!r}'.format(params)
            )
        if not (isinstance(seed, int) and seed >= 0):
            raise ValidationError('seed must be an int >= 0; got {!r}'.format(seed))
        return super().__new__(cls, params,
            _nonnegative('noise_sigma_torque', noise_sigma_torque),
            _nonnegative('noise_sigma_angle', noise_sigma_angle),
            seed,
        )

    @property
    def model(self):
        return self.params.model

    def rng(self, *key):
        return np.random.default_rng([self.seed] + list(key))


class ProtocolSpec(namedtuple('ProtocolSpec', 'chirp segmentation experiment')):
    __slots__ = ()

    def __new__(cls, chirp, segmentation, experiment):
        if not isinstance(chirp, ChirpSpec):
            raise ValidationError('chirp must be a ChirpSpec; got {!r}'.format(chirp))
        if not isinstance(segmentation, SegmentationSpec):
            raise ValidationError(
                'segmentation must be a SegmentationSpec; got {!r}'.format(segmentation)
            )
        if not isinstance(experiment, ExperimentConfig):
            raise ValidationError(
                'experiment must be an ExperimentConfig; got {!r}'.format(experiment)
            )
        if segmentation.span > chirp.duration * (1 + 1e-12):
            raise ValidationError(
                '{} segments of {!r} s exceed the {!r} s chirp'.format(
                    segmentation.n_segments, segmentation.segment_period,
                    chirp.duration
                )
            )
        return super().__new__(cls, chirp, segmentation, experiment)


def steady_state_segment(truth, omega, amplitude, duration, dt, rng=None):
    """
    Steady-state torque and angle of *truth* driven at *omega*.

    The angle is ``amplitude * sin(omega*t)`` and the torque leads it by
    ``arg S(j*omega)`` with gain ``|S(j*omega)|``.  Gaussian noise is added
    from *rng*, which defaults to a generator seeded with ``truth.seed``.
    """
    omega = _positive('omega', omega)
    dt = _positive('dt', dt)
    count = int(round(_positive('duration', duration) / dt))
    t = dt * np.arange(count)
    S = complex(truth.params.evaluate(omega))
    theta = amplitude * np.sin(omega * t)
    tau = abs(S) * amplitude * np.sin(omega * t + cmath.phase(S))
    if truth.noise_sigma_torque > 0 or truth.noise_sigma_angle > 0:
        if rng is None:
            rng = truth.rng()
        if truth.noise_sigma_torque > 0:
            tau = tau + rng.normal(0.0, truth.noise_sigma_torque, count)
        if truth.noise_sigma_angle > 0:
            theta = theta + rng.normal(0.0, truth.noise_sigma_angle, count)
    return TimeSeries(dt, 0.0, tau, theta)


def simulate_protocol(truth, protocol):
    """
    Full record of *truth* under *protocol*.

    Slot ``k`` starts at sample ``round(k * segment_period / dt)`` and runs to
    the next slot, the last slot to the end of the chirp.  The angle
    amplitude in each slot is chosen so the torque amplitude equals the chirp
    amplitude.  Each slot draws its noise from its own generator keyed by
    ``(seed, k)``.
    """
    (chirp, seg, cfg) = protocol
    dt = chirp.dt
    total = chirp.size
    omegas = segment_frequencies(chirp, seg)
    tau = np.empty(total)
    theta = np.empty(total)
    bounds = [int(round(k * seg.segment_period / dt)) for k in range(seg.n_segments)]
    bounds.append(total)
    for (k, omega) in enumerate(omegas):
        (start, stop) = (bounds[k], bounds[k + 1])
        gain = abs(complex(truth.params.evaluate(omega)))
        if gain == 0:
            raise NumericalError(
                'subject has zero dynamic stiffness at {!r} rad/s'.format(omega)
            )
        piece = steady_state_segment(truth, omega, chirp.amplitude / gain,
            (stop - start) * dt, dt, truth.rng(k)
        )
        tau[start:stop] = piece.tau_c
        theta[start:stop] = piece.theta_e
        log.debug('slot %d: %.4g rad/s, samples %d to %d', k, omega, start, stop)
    log.info('simulated %s %s: %d samples at %.6g Hz',
        cfg.exp, truth.model, total, chirp.sample_rate
    )
    return TimeSeries(dt, 0.0, tau, theta)


def perceived_params(params, cfg):
    """
    Parameters identification should return for the human *params*.

    Compensation removes only the attenuated inertia ``M_e/alpha`` from the
    measured response, so the lumped inertia comes back as
    ``M + M_e/alpha``:

    >>> from hystiff import ModelParamsM2
    >>> p = perceived_params(ModelParamsM2(10.0, 5.0, 0.3), ExperimentConfig(4, 0.8))
    >>> round(p.M, 12)
    0.5

    """
    return type(params)(*params[:-1], params.M + cfg.M_e / cfg.alpha)


def cycle_work(theta, tau):
    """
    Work ``sum(tau * d(theta))`` by the trapezoid rule.

    Over one closed steady-state cycle of a hysteretic subject this is the
    loop area ``pi * C_h * A**2``.
    """
    theta = np.asarray(theta, dtype=float)
    tau = np.asarray(tau, dtype=float)
    return float(np.sum(0.5 * (tau[1:] + tau[:-1]) * np.diff(theta)))


def truth_to_json(truth):
    d = truth.params.to_dict()
    d.update(
        noise_sigma_torque=truth.noise_sigma_torque,
        noise_sigma_angle=truth.noise_sigma_angle,
        seed=truth.seed,
    )
    return d


def truth_from_json(d):
    return SubjectTruth(params_from_dict(d),
        d.get('noise_sigma_torque', 0.0),
        d.get('noise_sigma_angle', 0.0),
        d.get('seed', 0),
    )


def protocol_to_json(protocol):
    return {
        'chirp': dict(protocol.chirp._asdict()),
        'segmentation': dict(protocol.segmentation._asdict()),
        'experiment': dict(protocol.experiment._asdict()),
    }
