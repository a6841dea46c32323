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
Least-squares fits of the three dynamic stiffness models.

All three models share their real part, ``K_h - M*omega**2``, and differ only
in the imaginary part:

    ======  =========================
    Model   Im S(j omega)
    ======  =========================
    M1      ``B_h*omega``
    M2      ``C_h``
    M3      ``C_h + B_h*omega``
    ======  =========================

No parameter appears in both parts.  The squared modulus of a complex residual
is the squared real residual plus the squared imaginary residual, so the
complex least-squares objective splits into two independent real problems,
and solving them separately gives exactly the joint complex solution.
"""

import logging
import math
from collections import namedtuple

import numpy as np

from . import (
    ModelParamsM1, ModelParamsM2, ModelParamsM3, ValidationError,
    RankDeficient, NonPhysical, params_from_dict, _positive,
)
from .stats import rss


log = logging.getLogger()

Fit = namedtuple('Fit', 'params omega_n zeta rss n')


def compensate_inertia(frf, cfg):
    """
    Remove the attenuated exoskeleton inertia from a measured response.

    Returns ``S + (M_e/alpha) * (j*omega)**2`` at every sample, leaving the
    imaginary part untouched.  The metadata records *alpha* and *M_e*.
    """
    shift = cfg.M_e / cfg.alpha
    meta = dict(frf.meta)
    meta.update(alpha=cfg.alpha, M_e=cfg.M_e)
    if cfg.exp:
        meta['exp'] = cfg.exp
    return frf.with_values(frf.values - shift * frf.omegas ** 2, meta)


def _lstsq(design, y, weights=None):
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        if w.shape != y.shape or not np.all(w > 0):
            raise ValidationError('weights must be positive, one per sample')
        root = np.sqrt(w)
        design = design * root[:, None]
        y = y * root
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise RankDeficient(
            'cannot identify {} parameters from {} samples'.format(
                design.shape[1], design.shape[0]
            )
        )
    (coef, _, _, _) = np.linalg.lstsq(design, y, rcond=None)
    return [float(c) for c in coef]


def fit_real_part(frf, weights=None):
    """
    Fit ``Re S = K_h - M*omega**2``, returning ``(K_h, M)``.

    Raises `RankDeficient` with fewer than two distinct frequencies, and
    `NonPhysical` unless both estimates are positive.
    """
    omegas = frf.omegas
    if len(np.unique(omegas)) < 2:
        raise RankDeficient(
            'need >= 2 distinct frequencies; got {}'.format(len(np.unique(omegas)))
        )
    design = np.column_stack((np.ones_like(omegas), -omegas ** 2))
    (K_h, M) = _lstsq(design, frf.values.real, weights)
    if not (K_h > 0 and M > 0):
        raise NonPhysical(
            'fitted K_h={:.4g}, M={:.4g}; both must be > 0'.format(K_h, M)
        )
    return (K_h, M)


def fit_m1(frf, weights=None):
    """
    Fit the viscous model.

    >>> from hystiff import FrequencyResponse
    >>> truth = ModelParamsM1(25.95, 2.63, 1.03)
    >>> omegas = [2.0, 4.0, 8.0, 16.0]
    >>> frf = FrequencyResponse.from_arrays(omegas, truth.evaluate(omegas))
    >>> p = fit_m1(frf)
    >>> [round(v, 9) for v in p]
    [25.95, 2.63, 1.03]

    """
    (K_h, M) = fit_real_part(frf, weights)
    omegas = frf.omegas
    (B_h,) = _lstsq(omegas[:, None], frf.values.imag, weights)
    return ModelParamsM1(K_h, B_h, M)


def fit_m2(frf, weights=None):
    """
    Fit the hysteretic model; *C_h* is the (weighted) mean imaginary part.
    """
    (K_h, M) = fit_real_part(frf, weights)
    (C_h,) = _lstsq(np.ones((frf.size, 1)), frf.values.imag, weights)
    return ModelParamsM2(K_h, C_h, M)


def fit_m3(frf, weights=None):
    (K_h, M) = fit_real_part(frf, weights)
    omegas = frf.omegas
    design = np.column_stack((np.ones_like(omegas), omegas))
    (C_h, B_h) = _lstsq(design, frf.values.imag, weights)
    return ModelParamsM3(K_h, C_h, B_h, M)


FITTERS = {
    'M1': fit_m1,
    'M2': fit_m2,
    'M3': fit_m3,
}


def natural_frequency(K_h, M):
    """
    Undamped natural frequency ``sqrt(K_h/M)`` in rad/s.

    >>> round(natural_frequency(25.95, 1.03), 2)
    5.02

    """
    return math.sqrt(_positive('K_h', K_h) / _positive('M', M))


def damping_ratio(params):
    """
    Damping ratio of fitted parameters.

    For M1 this is ``B_h/(2*sqrt(K_h*M))``, for M2 ``C_h/(2*K_h)``, and for M3
    the sum of the two.

    >>> round(damping_ratio(ModelParamsM2(12.73, 10.18, 0.20)), 2)
    0.4

    """
    if isinstance(params, ModelParamsM1):
        return params.B_h / (2 * math.sqrt(params.K_h * params.M))
    if isinstance(params, ModelParamsM2):
        return params.C_h / (2 * params.K_h)
    if isinstance(params, ModelParamsM3):
        return (params.C_h / (2 * params.K_h)
            + params.B_h / (2 * math.sqrt(params.K_h * params.M)))
    raise TypeError(
        'params: need ModelParamsM1, M2 or M3; got {!r}'.format(type(params))
    )


def fit_all(frf, weights=None):
    """
    Fit M1, M2 and M3 to the same response.

    Returns a ``dict`` mapping model name to a `Fit` carrying the parameters,
    natural frequency, damping ratio, complex RSS and sample count.
    """
    fits = {}
    for (name, fitter) in sorted(FITTERS.items()):
        params = fitter(frf, weights)
        fits[name] = Fit(
            params,
            natural_frequency(params.K_h, params.M),
            damping_ratio(params),
            rss(frf, params),
            frf.size,
        )
        log.debug('%s %s: %r rss=%.4g', frf.meta.get('exp', ''), name,
            params, fits[name].rss
        )
    return fits


def params_to_json(exp, fit):
    """
    Flatten a `Fit` into the parameters record written by ``hystiff identify``.
    """
    record = fit.params.to_dict()
    record.update(
        exp=exp,
        omega_n=fit.omega_n,
        zeta=fit.zeta,
        rss=fit.rss,
        n=fit.n,
    )
    return record


def fit_from_json(record):
    """
    Inverse of `params_to_json()`, returning ``(exp, fit)``.
    """
    params = params_from_dict(record)
    try:
        fit = Fit(params,
            float(record['omega_n']),
            float(record['zeta']),
            float(record['rss']),
            (None if record.get('n') is None else int(record['n'])),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(
            'bad parameters record: {!r}'.format(e)
        ) from None
    return (record.get('exp', ''), fit)
