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
`hystiff` - hysteretic joint stiffness, identified and put to work.

Hystiff identifies the dynamic stiffness of a human joint from torque/angle
chirp-response records under three competing models:

    * M1, viscous damping:      ``S = K_h - M w^2 + j B_h w``
    * M2, hysteretic damping:   ``S = K_h - M w^2 + j C_h``
    * M3, both:                 ``S = K_h - M w^2 + j (C_h + B_h w)``

It then compares the models with F-tests on complex residuals, and uses the
hysteretic (complex stiffness) model to synthesize a fractional-order
augmentation controller with a guaranteed phase margin.

This module holds what every other module shares: the exception hierarchy,
the JSON helpers, and the immutable value types.  The work is done in:

    * `hystiff.signal` - chirp excitation, segmentation, FRF estimates
    * `hystiff.identify` - least-squares fits of M1, M2 and M3
    * `hystiff.stats` - F-tests and the C_h/K_h regression
    * `hystiff.control` - augmentation plant and controller synthesis
    * `hystiff.sim` - synthetic subjects
    * `hystiff.cli` - the ``hystiff`` command
"""

import json
import logging
import math
from collections import namedtuple

import numpy as np


__all__ = (
    'HystiffError',
    'ValidationError',
    'NumericalError',

    'TimeSeries',
    'FrequencySample',
    'FrequencyResponse',
    'ExperimentConfig',
    'ModelParamsM1',
    'ModelParamsM2',
    'ModelParamsM3',

    'dumps',
    'load',
    'save',
)

__version__ = '26.10.0'
log = logging.getLogger()


class HystiffError(Exception):
    """
    Base class for all exceptions raised by `hystiff`.

    The `exit_code` attribute is what ``hystiff`` exits with when the
    exception escapes a command.
    """

    exit_code = 1


class ValidationError(HystiffError):
    """
    Raised when an input value, a config field, or a file fails validation.
    """

    exit_code = 2


class BadFormat(ValidationError):
    'Unreadable or ill-formed CSV or JSON input'

class RecordTooShort(ValidationError):
    'Record is shorter than the segmentation requires'

class GridMismatch(ValidationError):
    'Model and data are on different frequency grids'


class TooFewSections(ValidationError):
    """
    Raised by `control.lag_cascade()` when *n* lag sections cannot hold the
    phase ripple within tolerance.
    """

    def __init__(self, n, ripple, tolerance, required):
        self.n = n
        self.ripple = ripple
        self.tolerance = tolerance
        self.required = required
        super().__init__(
            'n={} gives {:.3g} deg phase ripple > {:.3g} deg; need n >= {}'.format(
                n, ripple, tolerance, required
            )
        )


class InfeasibleMargin(ValidationError):
    """
    Raised when the target phase margin is not below ``atan(c_h)``.

    The admissible interval for the margin is available as `interval`.
    """

    def __init__(self, phi, limit):
        self.phi = phi
        self.limit = limit
        self.interval = (0.0, limit)
        super().__init__(
            'phi={:.4g} deg is infeasible; admissible phi is in (0, {:.4g}) deg'.format(
                phi, limit
            )
        )


class NumericalError(HystiffError):
    """
    Raised when a computation cannot produce a meaningful number.
    """

    exit_code = 3


class InsufficientExcitation(NumericalError):
    'FRF denominator coefficient is below the excitation floor'

class RankDeficient(NumericalError):
    'Regression is not identifiable from the given data'

class NonPhysical(NumericalError):
    'Fitted stiffness or inertia is not positive'

class PerfectFit(NumericalError):
    'Full model residual is zero, the F-statistic is undefined'


def _float(name, value):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(
            '{} must be a number; got {!r}'.format(name, value)
        ) from None
    if not math.isfinite(value):
        raise ValidationError('{} must be finite; got {!r}'.format(name, value))
    return value


def _positive(name, value):
    value = _float(name, value)
    if not value > 0:
        raise ValidationError('{} must be > 0; got {!r}'.format(name, value))
    return value


def _nonnegative(name, value):
    value = _float(name, value)
    if not value >= 0:
        raise ValidationError('{} must be >= 0; got {!r}'.format(name, value))
    return value


def _frozen(name, values, dtype=float):
    try:
        array = np.array(values, dtype=dtype)
    except (TypeError, ValueError):
        raise ValidationError(
            '{} must be a sequence of numbers'.format(name)
        ) from None
    if array.ndim != 1:
        raise ValidationError(
            '{} must be 1-dimensional; got shape {!r}'.format(name, array.shape)
        )
    if not np.all(np.isfinite(array)):
        raise ValidationError('{} must be finite everywhere'.format(name))
    array.flags.writeable = False
    return array


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError('{!r} is not JSON serializable'.format(obj))


def dumps(obj, pretty=False):
    """
    Safe and opinionated use of ``json.dumps()``.

    This function always calls ``json.dumps()`` with *ensure_ascii=False* and
    *sort_keys=True*, and it encodes numpy scalars and arrays as their Python
    equivalents.

    For example:

    >>> dumps({'model': 'M2', 'K_h': 10.05, 'C_h': 5.89})
    '{"C_h":5.89,"K_h":10.05,"model":"M2"}'

    >>> dumps({'n': np.int64(10), 'omegas': np.array([4.0, 5.0])})
    '{"n":10,"omegas":[4.0,5.0]}'

    By default compact encoding is used, but if you supply *pretty=True*,
    4-space indentation will be used:

    >>> print(dumps({'zeta': 0.3, 'omega_n': 5.02}, pretty=True))
    {
        "omega_n": 5.02,
        "zeta": 0.3
    }

    """
    if pretty:
        return json.dumps(obj,
            ensure_ascii=False,
            sort_keys=True,
            separators=(',',': '),
            indent=4,
            default=_json_default,
        )
    return json.dumps(obj,
        ensure_ascii=False,
        sort_keys=True,
        separators=(',',':'),
        default=_json_default,
    )


def load(filename):
    """
    Load a JSON document from *filename*.

    Raises `BadFormat` if the file is not valid JSON.
    """
    with open(filename, 'r', encoding='utf-8') as fp:
        try:
            return json.load(fp)
        except ValueError as e:
            raise BadFormat('{!r}: {}'.format(filename, e)) from None


def save(filename, obj):
    """
    Write *obj* to *filename* as pretty JSON with a trailing newline.
    """
    with open(filename, 'w', encoding='utf-8') as fp:
        fp.write(dumps(obj, pretty=True))
        fp.write('\n')
    log.debug('wrote %r', filename)


class TimeSeries(namedtuple('TimeSeries', 'dt t0 tau_c theta_e')):
    """
    Uniformly sampled interaction torque and joint angle.

    *tau_c* is in N*m, *theta_e* in rad, *dt* and *t0* in seconds.  The sample
    arrays are copied and made read-only:

    >>> ts = TimeSeries(0.5, 0.0, [1.0, 2.0, 3.0], [0.1, 0.2, 0.3])
    >>> ts.size
    3
    >>> ts.time.tolist()
    [0.0, 0.5, 1.0]
    >>> ts.tau_c.flags.writeable
    False

    """

    __slots__ = ()

    def __new__(cls, dt, t0, tau_c, theta_e):
        dt = _positive('dt', dt)
        t0 = _float('t0', t0)
        tau_c = _frozen('tau_c', tau_c)
        theta_e = _frozen('theta_e', theta_e)
        if len(tau_c) != len(theta_e):
            raise ValidationError(
                'tau_c and theta_e must have equal length; got {} and {}'.format(
                    len(tau_c), len(theta_e)
                )
            )
        if len(tau_c) < 2:
            raise ValidationError(
                'need at least 2 samples; got {}'.format(len(tau_c))
            )
        return super().__new__(cls, dt, t0, tau_c, theta_e)

    @property
    def size(self):
        return len(self.tau_c)

    @property
    def duration(self):
        return self.size * self.dt

    @property
    def time(self):
        return self.t0 + self.dt * np.arange(self.size)

    def window(self, start, count):
        """
        Return the *count* samples starting at index *start*.
        """
        stop = start + count
        return TimeSeries(self.dt, self.t0 + start * self.dt,
            self.tau_c[start:stop], self.theta_e[start:stop]
        )


class FrequencySample(namedtuple('FrequencySample', 'omega value')):
    """
    A complex dynamic stiffness *value* (N*m/rad) at *omega* (rad/s).
    """

    __slots__ = ()

    def __new__(cls, omega, value):
        omega = _positive('omega', omega)
        value = complex(value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise ValidationError('value must be finite; got {!r}'.format(value))
        return super().__new__(cls, omega, value)


class FrequencyResponse(namedtuple('FrequencyResponse', 'samples meta')):
    """
    An ordered set of `FrequencySample` with experiment metadata.

    The omegas must be strictly increasing:

    >>> frf = FrequencyResponse.from_arrays([2.0, 4.0], [10+5j, 8+5j], {'exp': 'I.1'})
    >>> frf.omegas.tolist()
    [2.0, 4.0]
    >>> FrequencyResponse.from_arrays([4.0, 4.0], [1, 2])
    Traceback (most recent call last):
      ...
    hystiff.ValidationError: omegas must be strictly increasing

    """

    __slots__ = ()

    def __new__(cls, samples, meta=None):
        samples = tuple(
            s if isinstance(s, FrequencySample) else FrequencySample(*s)
            for s in samples
        )
        if not samples:
            raise ValidationError('need at least 1 sample')
        for (a, b) in zip(samples, samples[1:]):
            if not b.omega > a.omega:
                raise ValidationError('omegas must be strictly increasing')
        meta = ({} if meta is None else dict(meta))
        return super().__new__(cls, samples, meta)

    @classmethod
    def from_arrays(cls, omegas, values, meta=None):
        if len(omegas) != len(values):
            raise ValidationError(
                'got {} omegas but {} values'.format(len(omegas), len(values))
            )
        return cls(
            [FrequencySample(w, v) for (w, v) in zip(omegas, values)], meta
        )

    @property
    def size(self):
        return len(self.samples)

    @property
    def omegas(self):
        return np.array([s.omega for s in self.samples])

    @property
    def values(self):
        return np.array([s.value for s in self.samples], dtype=complex)

    def with_values(self, values, meta=None):
        """
        Return a response on the same omega grid with new *values*.
        """
        if meta is None:
            meta = self.meta
        return FrequencyResponse.from_arrays(self.omegas, values, meta)


class ExperimentConfig(namedtuple('ExperimentConfig', 'alpha M_e exp load grip bias')):
    """
    Conditions of one perturbation experiment.

    *alpha* is the augmentation factor and *M_e* the exoskeleton moment of
    inertia (kg*m^2).  *load* and *grip* (kg) and *bias* (N*m) are metadata.

    >>> cfg = ExperimentConfig(4, 0.8, 'I.5')
    >>> cfg.attenuated_inertia
    0.2
    >>> ExperimentConfig(0.5, 0.8)
    Traceback (most recent call last):
      ...
    hystiff.ValidationError: alpha must be >= 1; got 0.5

    """

    __slots__ = ()

    def __new__(cls, alpha=1.0, M_e=0.0, exp='', load=None, grip=None, bias=0.0):
        alpha = _float('alpha', alpha)
        if not alpha >= 1:
            raise ValidationError('alpha must be >= 1; got {!r}'.format(alpha))
        M_e = _nonnegative('M_e', M_e)
        if load is not None:
            load = _nonnegative('load', load)
        if grip is not None:
            grip = _nonnegative('grip', grip)
        bias = _float('bias', bias)
        return super().__new__(cls, alpha, M_e, str(exp), load, grip, bias)

    @property
    def attenuated_inertia(self):
        return self.M_e / self.alpha

    def meta(self):
        return {'exp': self.exp, 'alpha': self.alpha, 'M_e': self.M_e}


def _stiffness_and_inertia(K_h, M):
    return (_positive('K_h', K_h), _positive('M', M))


class _DynamicStiffness:
    """
    Evaluation shared by the three model parameter types.

    The real part ``K_h - M*omega**2`` is common to every model; each model
    supplies its own `imag_part()`.
    """

    __slots__ = ()
    model = None

    def real_part(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.K_h - self.M * omega ** 2

    def evaluate(self, omega):
        """
        Return the complex dynamic stiffness at *omega* (rad/s).
        """
        return self.real_part(omega) + 1j * self.imag_part(omega)

    def to_dict(self):
        d = dict(self._asdict())
        d['model'] = self.model
        return d


class ModelParamsM1(_DynamicStiffness, namedtuple('ModelParamsM1', 'K_h B_h M')):
    """
    Viscous model, ``S = K_h - M w^2 + j B_h w``.

    >>> complex(ModelParamsM1(10.0, 1.0, 0.25).evaluate(2.0))
    (9+2j)

    """

    __slots__ = ()
    model = 'M1'

    def __new__(cls, K_h, B_h, M):
        (K_h, M) = _stiffness_and_inertia(K_h, M)
        return super().__new__(cls, K_h, _float('B_h', B_h), M)

    def imag_part(self, omega):
        return self.B_h * np.asarray(omega, dtype=float)


class ModelParamsM2(_DynamicStiffness, namedtuple('ModelParamsM2', 'K_h C_h M')):
    """
    Hysteretic (complex stiffness) model, ``S = K_h - M w^2 + j C_h``.
    """

    __slots__ = ()
    model = 'M2'

    def __new__(cls, K_h, C_h, M):
        (K_h, M) = _stiffness_and_inertia(K_h, M)
        return super().__new__(cls, K_h, _float('C_h', C_h), M)

    def imag_part(self, omega):
        return np.full(np.shape(omega), self.C_h)


class ModelParamsM3(_DynamicStiffness, namedtuple('ModelParamsM3', 'K_h C_h B_h M')):
    """
    Combined model, ``S = K_h - M w^2 + j (C_h + B_h w)``.

    Neither *C_h* nor *B_h* is constrained in sign.
    """

    __slots__ = ()
    model = 'M3'

    def __new__(cls, K_h, C_h, B_h, M):
        (K_h, M) = _stiffness_and_inertia(K_h, M)
        return super().__new__(cls, K_h, _float('C_h', C_h), _float('B_h', B_h), M)

    def imag_part(self, omega):
        return self.C_h + self.B_h * np.asarray(omega, dtype=float)


MODELS = {
    'M1': ModelParamsM1,
    'M2': ModelParamsM2,
    'M3': ModelParamsM3,
}


def params_from_dict(d):
    """
    Build model parameters from a ``dict`` with a ``'model'`` key.

    >>> params_from_dict({'model': 'M2', 'K_h': 12.73, 'C_h': 10.18, 'M': 0.2})
    ModelParamsM2(K_h=12.73, C_h=10.18, M=0.2)

    """
    model = d.get('model')
    if model not in MODELS:
        raise ValidationError(
            "model must be 'M1', 'M2' or 'M3'; got {!r}".format(model)
        )
    cls = MODELS[model]
    try:
        return cls(**dict((name, d[name]) for name in cls._fields))
    except KeyError as e:
        raise ValidationError(
            '{} parameters need {!r}'.format(model, e.args[0])
        ) from None
