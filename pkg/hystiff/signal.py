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
Chirp excitation, record segmentation, and single-frequency FRF estimates.

The perturbation is an exponential chirp whose instantaneous frequency runs
geometrically from *omega_min* to *omega_max*.  Each segment of the response
record is treated as steady state at the chirp frequency at the segment start,
and the dynamic stiffness at that frequency is the ratio of the torque and
angle phasors.
"""

import logging
import math
from collections import namedtuple

import numpy as np

from . import (
    TimeSeries, FrequencyResponse, ValidationError, RecordTooShort,
    InsufficientExcitation, BadFormat,
    _float, _positive, _nonnegative,
)


log = logging.getLogger()

DEFAULT_SAMPLE_RATE = 1000.0
EXCITATION_FLOOR = 1e-12
CSV_HEADER = 't,tau_c,theta_e'


class ChirpSpec(namedtuple('ChirpSpec', 'omega_min omega_max duration amplitude sample_rate')):
    """
    Exponential chirp: frequencies in rad/s, *duration* in s, *amplitude* in
    N*m, *sample_rate* in Hz.

    >>> ChirpSpec(2, 20, 100, 2).dt
    0.001
    >>> ChirpSpec(2, 20, 100, 2, sample_rate=5)
    Traceback (most recent call last):
      ...
    hystiff.ValidationError: sample_rate must exceed omega_max/pi = 6.36620 Hz; got 5.0

    """

    __slots__ = ()

    def __new__(cls, omega_min, omega_max, duration, amplitude,
                sample_rate=DEFAULT_SAMPLE_RATE):
        omega_min = _positive('omega_min', omega_min)
        omega_max = _float('omega_max', omega_max)
        if not omega_max >= omega_min:
            raise ValidationError(
                'omega_max must be >= omega_min={!r}; got {!r}'.format(
                    omega_min, omega_max
                )
            )
        duration = _positive('duration', duration)
        amplitude = _nonnegative('amplitude', amplitude)
        sample_rate = _positive('sample_rate', sample_rate)
        if not sample_rate > omega_max / math.pi:
            raise ValidationError(
                'sample_rate must exceed omega_max/pi = {:.5f} Hz; got {!r}'.format(
                    omega_max / math.pi, sample_rate
                )
            )
        return super().__new__(cls,
            omega_min, omega_max, duration, amplitude, sample_rate
        )

    @property
    def dt(self):
        return 1.0 / self.sample_rate

    @property
    def ratio(self):
        return self.omega_max / self.omega_min

    @property
    def size(self):
        return int(round(self.duration * self.sample_rate))


class SegmentationSpec(namedtuple('SegmentationSpec', 'n_segments segment_period used_duration')):
    """
    Split a record into *n_segments* windows, one every *segment_period*
    seconds, of which only the first *used_duration* seconds are analyzed.
    """

    __slots__ = ()

    def __new__(cls, n_segments, segment_period, used_duration):
        if not (isinstance(n_segments, int) and n_segments >= 1):
            raise ValidationError(
                'n_segments must be an int >= 1; got {!r}'.format(n_segments)
            )
        segment_period = _positive('segment_period', segment_period)
        used_duration = _positive('used_duration', used_duration)
        if not used_duration <= segment_period:
            raise ValidationError(
                'used_duration must be <= segment_period={!r}; got {!r}'.format(
                    segment_period, used_duration
                )
            )
        return super().__new__(cls, n_segments, segment_period, used_duration)

    @property
    def gap(self):
        'Seconds discarded at the end of every segment.'
        return self.segment_period - self.used_duration

    @property
    def span(self):
        return self.n_segments * self.segment_period


class Excitation(namedtuple('Excitation', 'dt t0 tau_c')):
    __slots__ = ()

    @property
    def time(self):
        return self.t0 + self.dt * np.arange(len(self.tau_c))


def chirp_frequency(spec, t):
    """
    Instantaneous frequency ``omega_min * ratio**(t/T)`` at time *t*.

    >>> round(float(chirp_frequency(ChirpSpec(2, 20, 100, 2), 50.0)), 6)
    6.324555

    """
    t = np.asarray(t, dtype=float)
    return spec.omega_min * spec.ratio ** (t / spec.duration)


def chirp_phase(spec, t):
    """
    Phase of the chirp at time *t*, the integral of `chirp_frequency()`.

    >>> round(float(chirp_phase(ChirpSpec(2, 20, 100, 2), 100.0)), 2)
    781.73

    When ``omega_min == omega_max`` this is simply ``omega_min * t``.
    """
    t = np.asarray(t, dtype=float)
    if spec.omega_max == spec.omega_min:
        return spec.omega_min * t
    L = math.log(spec.ratio)
    return spec.omega_min * spec.duration / L * np.expm1(L * t / spec.duration)


def gen_exp_chirp(spec):
    """
    Sample the chirp torque ``amplitude * sin(phase(t))``.

    Samples are taken at ``t = k*dt`` for ``k`` in
    ``range(round(duration * sample_rate))``.
    """
    dt = spec.dt
    t = dt * np.arange(spec.size)
    tau_c = spec.amplitude * np.sin(chirp_phase(spec, t))
    return Excitation(dt, 0.0, tau_c)


def segment_frequencies(spec, seg):
    """
    Chirp frequency at the start of every segment.

    >>> omegas = segment_frequencies(ChirpSpec(4, 40, 100, 2), SegmentationSpec(10, 10, 5.78))
    >>> [round(w, 3) for w in omegas[:3]]
    [4.0, 5.036, 6.34]

    """
    if seg.span > spec.duration * (1 + 1e-12):
        raise ValidationError(
            '{} segments of {!r} s exceed the {!r} s chirp'.format(
                seg.n_segments, seg.segment_period, spec.duration
            )
        )
    starts = seg.segment_period * np.arange(seg.n_segments)
    return [float(w) for w in chirp_frequency(spec, starts)]


def _settling_gap_ok(seg, settling):
    if seg.gap < settling:
        log.warning(
            'settling gap %.3g s is shorter than the %.3g s the subject needs',
            seg.gap, settling
        )
        return False
    return True


def check_settling_gap(seg, zeta, omega_n):
    """
    Check the discarded gap against four time constants ``1/(zeta*omega_n)``.

    Logs a warning and returns ``False`` if the gap is too short, or if the
    damping is not positive so that no time constant exists.
    """
    if not (zeta > 0 and omega_n > 0):
        log.warning('no settling time for zeta=%r, omega_n=%r', zeta, omega_n)
        return False
    return _settling_gap_ok(seg, 4.0 / (zeta * omega_n))


def segment_record(record, seg, time_constant=None):
    """
    Cut *record* into the analyzed window of every segment.

    Segment ``k`` starts at sample ``round(k * segment_period / dt)`` and keeps
    ``round(used_duration / dt)`` samples.  If *time_constant* is given, a
    warning is logged when the discarded gap is shorter than four of them.
    """
    if seg.span > record.duration + 0.5 * record.dt:
        raise RecordTooShort(
            'record of {:.6g} s is shorter than {} segments of {:.6g} s'.format(
                record.duration, seg.n_segments, seg.segment_period
            )
        )
    if time_constant is not None:
        _settling_gap_ok(seg, 4.0 * time_constant)
    count = int(round(seg.used_duration / record.dt))
    windows = []
    for k in range(seg.n_segments):
        start = int(round(k * seg.segment_period / record.dt))
        if start + count > record.size:
            raise RecordTooShort(
                'segment {} needs samples up to {}; record has {}'.format(
                    k, start + count, record.size
                )
            )
        windows.append(record.window(start, count))
    return windows


def estimate_frf_point(seg_tau, seg_theta, dt, omega, floor=EXCITATION_FLOOR):
    """
    Estimate the dynamic stiffness ``tau_c/theta_e`` at *omega*.

    The window is cut to a whole number of periods and both signals are
    least-squares fitted with ``a*sin(omega*t) + b*cos(omega*t) + c``.  The
    phasor of each signal is ``a + j*b`` and the estimate is their ratio.  On a
    pure sinusoid at *omega* this is exact.

    >>> t = 0.001 * np.arange(5780)
    >>> S = estimate_frf_point(3 * np.sin(4 * t + 0.5), np.sin(4 * t), 0.001, 4.0)
    >>> round(abs(S), 9), round(math.atan2(S.imag, S.real), 9)
    (3.0, 0.5)

    Raises `InsufficientExcitation` when the angle phasor magnitude is not
    above *floor* times the RMS of the angle signal.
    """
    tau = np.asarray(seg_tau, dtype=float)
    theta = np.asarray(seg_theta, dtype=float)
    if tau.ndim != 1 or tau.shape != theta.shape:
        raise ValidationError(
            'segments must be 1-dimensional and equal length; got {!r} and {!r}'.format(
                tau.shape, theta.shape
            )
        )
    dt = _positive('dt', dt)
    omega = _positive('omega', omega)
    if not dt * omega < math.pi:
        raise ValidationError(
            'omega={!r} is above the Nyquist limit pi/dt={!r}'.format(
                omega, math.pi / dt
            )
        )
    period = 2 * math.pi / omega
    periods = math.floor(len(tau) * dt / period)
    if periods < 1:
        raise ValidationError(
            'segment of {:.6g} s is shorter than one {:.6g} s period'.format(
                len(tau) * dt, period
            )
        )
    count = int(round(periods * period / dt))
    if count < 4:
        raise ValidationError(
            'need at least 4 samples per window; got {}'.format(count)
        )
    t = dt * np.arange(count)
    basis = np.column_stack(
        (np.sin(omega * t), np.cos(omega * t), np.ones(count))
    )
    signals = np.column_stack((tau[:count], theta[:count]))
    (coef, _, _, _) = np.linalg.lstsq(basis, signals, rcond=None)
    num = complex(coef[0, 0], coef[1, 0])
    den = complex(coef[0, 1], coef[1, 1])
    rms = math.sqrt(float(np.mean(theta[:count] ** 2)))
    if not abs(den) > floor * rms:
        raise InsufficientExcitation(
            'angle phasor {:.3g} at omega={:.6g} is below the excitation floor'.format(
                abs(den), omega
            )
        )
    return num / den


def estimate_frf(record, chirp, seg, meta=None, floor=EXCITATION_FLOOR):
    """
    Estimate one FRF sample per segment of *record*.
    """
    omegas = segment_frequencies(chirp, seg)
    windows = segment_record(record, seg)
    values = [
        estimate_frf_point(w.tau_c, w.theta_e, w.dt, omega, floor)
        for (w, omega) in zip(windows, omegas)
    ]
    log.info('estimated %d FRF samples over %.4g to %.4g rad/s',
        len(values), omegas[0], omegas[-1]
    )
    return FrequencyResponse.from_arrays(omegas, values, meta)


def save_timeseries(filename, record):
    """
    Write *record* as CSV with columns ``t,tau_c,theta_e``.
    """
    data = np.column_stack((record.time, record.tau_c, record.theta_e))
    np.savetxt(filename, data,
        fmt='%.17g', delimiter=',', header=CSV_HEADER, comments=''
    )
    log.debug('wrote %d samples to %r', record.size, filename)


def load_timeseries(filename):
    """
    Read a CSV written by `save_timeseries()`.

    The time column must be uniformly spaced; otherwise `BadFormat` is raised.
    """
    with open(filename, 'r') as fp:
        header = fp.readline().strip()
        if header != CSV_HEADER:
            raise BadFormat(
                '{!r}: expected header {!r}; got {!r}'.format(
                    filename, CSV_HEADER, header
                )
            )
        try:
            data = np.loadtxt(fp, delimiter=',', ndmin=2)
        except ValueError as e:
            raise BadFormat('{!r}: {}'.format(filename, e)) from None
    if data.shape[1] != 3 or data.shape[0] < 2:
        raise BadFormat(
            '{!r}: need >= 2 rows of 3 columns; got shape {!r}'.format(
                filename, data.shape
            )
        )
    t = data[:, 0]
    dt = t[1] - t[0]
    if not (dt > 0 and np.allclose(np.diff(t), dt, rtol=1e-6, atol=0)):
        raise BadFormat('{!r}: time column is not uniformly spaced'.format(filename))
    try:
        return TimeSeries(dt, t[0], data[:, 1], data[:, 2])
    except ValidationError as e:
        raise BadFormat('{!r}: {}'.format(filename, e)) from None


def frf_to_json(frf):
    return {
        'meta': frf.meta,
        'samples': [
            {'omega': s.omega, 're': s.value.real, 'im': s.value.imag}
            for s in frf.samples
        ],
    }


def frf_from_json(obj):
    try:
        return FrequencyResponse.from_arrays(
            [s['omega'] for s in obj['samples']],
            [complex(s['re'], s['im']) for s in obj['samples']],
            obj.get('meta'),
        )
    except (KeyError, TypeError, AttributeError) as e:
        raise BadFormat('bad FRF document: {!r}'.format(e)) from None
