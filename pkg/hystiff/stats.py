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
F-tests on complex residuals, and the C_h/K_h regression.

Every complex sample contributes two real observations, so a fit of ``p``
real parameters to ``n`` complex samples leaves ``2n - p`` degrees of freedom.
The M3 model has four parameters and M1 and M2 have three each, giving the
reference distribution ``F(1, 2n - 4)`` for both nested comparisons.
"""

import logging
import math
from collections import namedtuple

import numpy as np
from scipy.special import betainc, betaincinv

from . import (
    FrequencyResponse, ModelParamsM1, ModelParamsM2, ModelParamsM3,
    ValidationError, GridMismatch, PerfectFit, RankDeficient,
)


log = logging.getLogger()

FALSE_REJECT = 0.05

FTestReport = namedtuple('FTestReport',
    'rss_reduced rss_full n f_stat f_critical significant'
)
RegressionReport = namedtuple('RegressionReport', 'c_h d_h r_squared')
ViscousReport = namedtuple('ViscousReport',
    'a_h zeta_const rss_proportional rss_constant rejected'
)


def rss(frf, model):
    """
    Sum of squared complex moduli of ``frf - model`` over the samples.

    *model* is either fitted parameters (evaluated on the grid of *frf*) or a
    `FrequencyResponse` on the same grid.

    >>> data = FrequencyResponse.from_arrays([1.0], [3+4j])
    >>> rss(data, FrequencyResponse.from_arrays([1.0], [0j]))
    25.0

    """
    if isinstance(model, FrequencyResponse):
        if model.size != frf.size or not np.array_equal(model.omegas, frf.omegas):
            raise GridMismatch(
                'model grid ({} samples) differs from data grid ({} samples)'.format(
                    model.size, frf.size
                )
            )
        predicted = model.values
    else:
        predicted = model.evaluate(frf.omegas)
    residual = frf.values - predicted
    return float(np.sum(residual.real ** 2 + residual.imag ** 2))


def _degrees_of_freedom(n):
    if not (isinstance(n, (int, np.integer)) and n >= 3):
        raise ValidationError('n must be an int >= 3; got {!r}'.format(n))
    return (1, 2 * int(n) - 4)


def f_statistic(rss_reduced, rss_full, n):
    """
    Nested-model F-statistic for complex samples.

    >>> f_statistic(2.0, 1.0, 10)
    16.0

    """
    _degrees_of_freedom(n)
    if not rss_reduced >= 0:
        raise ValidationError(
            'rss_reduced must be >= 0; got {!r}'.format(rss_reduced)
        )
    if not rss_full > 0:
        raise PerfectFit(
            'rss_full={!r}; the F-statistic needs a nonzero residual'.format(rss_full)
        )
    return (rss_reduced - rss_full) / rss_full * (2 * n - 4)


def _check_probability(name, p):
    if not 0 < p < 1:
        raise ValidationError('{} must be in (0, 1); got {!r}'.format(name, p))


def f_critical(n, p_false_reject=FALSE_REJECT):
    """
    Upper *p_false_reject* quantile of ``F(1, 2n - 4)``.

    >>> round(f_critical(10, 0.05), 2)
    4.49

    """
    (dfn, dfd) = _degrees_of_freedom(n)
    _check_probability('p_false_reject', p_false_reject)
    x = float(betaincinv(dfn / 2, dfd / 2, 1 - p_false_reject))
    if x >= 1:
        return math.inf
    return dfd * x / (dfn * (1 - x))


def f_cdf(f_stat, n):
    """
    ``P(F <= f_stat)`` for ``F ~ F(1, 2n - 4)``.
    """
    (dfn, dfd) = _degrees_of_freedom(n)
    if f_stat <= 0:
        return 0.0
    return float(betainc(dfn / 2, dfd / 2, dfn * f_stat / (dfn * f_stat + dfd)))


def f_pvalue(f_stat, n):
    return 1.0 - f_cdf(f_stat, n)


def f_test(rss_reduced, rss_full, n, p_false_reject=FALSE_REJECT):
    """
    Build an `FTestReport` comparing a reduced model against M3.
    """
    f_stat = f_statistic(rss_reduced, rss_full, n)
    threshold = f_critical(n, p_false_reject)
    return FTestReport(
        float(rss_reduced), float(rss_full), int(n),
        f_stat, threshold, f_stat > threshold
    )


def compare_models(fits, n=None, p_false_reject=FALSE_REJECT):
    """
    Run the M1-M3 and M2-M3 F-tests for one experiment.

    *fits* maps model names to `identify.Fit` values.  Returns a ``dict`` keyed
    by ``'M1-M3'`` and ``'M2-M3'``.
    """
    missing = sorted(set(('M1', 'M2', 'M3')) - set(fits))
    if missing:
        raise ValidationError('missing model record(s): {}'.format(', '.join(missing)))
    full = fits['M3']
    if n is None:
        n = full.n
    reports = {}
    for name in ('M1', 'M2'):
        reports[name + '-M3'] = f_test(fits[name].rss, full.rss, n, p_false_reject)
    return reports


def ftest_to_json(exp, comparison, report):
    return {
        'exp': exp,
        'comparison': comparison,
        'f_stat': report.f_stat,
        'f_critical': report.f_critical,
        'significant': bool(report.significant),
        'n': report.n,
        'rss_reduced': report.rss_reduced,
        'rss_full': report.rss_full,
    }


def regress_ch_kh(pairs):
    """
    Least-squares line ``C_h = c_h * K_h + d_h`` through ``(K_h, C_h)`` pairs.

    >>> regress_ch_kh([(10.0, 5.0), (20.0, 10.0), (40.0, 20.0)]).r_squared
    1.0

    """
    pairs = list(pairs)
    if len(pairs) < 2:
        raise ValidationError('need >= 2 pairs; got {}'.format(len(pairs)))
    K = np.array([k for (k, c) in pairs], dtype=float)
    C = np.array([c for (k, c) in pairs], dtype=float)
    if np.ptp(K) == 0:
        raise RankDeficient('all K_h are equal; the slope is undefined')
    design = np.column_stack((K, np.ones_like(K)))
    ((slope, intercept), _, _, _) = np.linalg.lstsq(design, C, rcond=None)
    residual = C - (slope * K + intercept)
    ss_res = float(np.sum(residual ** 2))
    ss_tot = float(np.sum((C - C.mean()) ** 2))
    r_squared = (1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot)
    return RegressionReport(
        float(slope), float(intercept), min(1.0, max(0.0, r_squared))
    )


def regress_through_origin(x, y):
    """
    Slope of ``y = k * x`` and its residual sum of squares, as ``(k, rss)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sxx = float(np.dot(x, x))
    if sxx == 0:
        raise RankDeficient('all x are zero; the slope is undefined')
    k = float(np.dot(x, y)) / sxx
    return (k, float(np.sum((y - k * x) ** 2)))


def viscous_hypothesis_check(rows):
    """
    Test whether M1 damping ratios grow in proportion to natural frequency.

    Under purely viscous damping with ``B_h`` proportional to ``K_h``,
    ``zeta = (a_h/2) * omega``.  *rows* are ``(omega_n, zeta)`` pairs from M1
    fits; the proportional model is fitted through the origin and compared to
    a constant ``zeta``.  `ViscousReport.rejected` is ``True`` when the
    constant model leaves the smaller residual.
    """
    rows = list(rows)
    if len(rows) < 3:
        raise ValidationError('need >= 3 rows; got {}'.format(len(rows)))
    omega = np.array([w for (w, z) in rows], dtype=float)
    zeta = np.array([z for (w, z) in rows], dtype=float)
    (k, rss_proportional) = regress_through_origin(omega, zeta)
    zeta_const = float(zeta.mean())
    rss_constant = float(np.sum((zeta - zeta_const) ** 2))
    rejected = bool(rss_constant < rss_proportional)
    log.info('viscous hypothesis: rss proportional=%.4g, constant=%.4g%s',
        rss_proportional, rss_constant, (', rejected' if rejected else '')
    )
    return ViscousReport(2 * k, zeta_const, rss_proportional, rss_constant, rejected)


def phase_shift_low_freq(params, omega=0.0):
    """
    Phase lead of torque over angle in degrees, with the inertia term dropped.

    For M2 this is ``atan(C_h/K_h)``; for M3 ``atan((C_h + B_h*omega)/K_h)``.

    >>> round(phase_shift_low_freq(ModelParamsM2(10.05, 5.89, 0.28)), 1)
    30.4

    """
    if isinstance(params, ModelParamsM2):
        imag = params.C_h
    elif isinstance(params, ModelParamsM3):
        imag = params.C_h + params.B_h * omega
    else:
        raise TypeError(
            'params: need ModelParamsM2 or ModelParamsM3; got {!r}'.format(type(params))
        )
    return math.degrees(math.atan(imag / params.K_h))


def one_param_damping(c_h, d_h, K_h, B_h=0.0, M=None):
    """
    Damping ratio with ``C_h`` replaced by the regression ``c_h*K_h + d_h``.

    The viscous term ``B_h/(2*sqrt(K_h*M))`` is added when *B_h* is nonzero,
    which then needs *M*.
    """
    zeta = c_h / 2 + d_h / (2 * K_h)
    if B_h:
        if M is None:
            raise ValidationError('M is required when B_h is nonzero')
        zeta += B_h / (2 * math.sqrt(K_h * M))
    return zeta


def phase_shift_from_regression(c_h, d_h, K_h, B_h=0.0, omega=0.0):
    """
    Low-frequency phase shift in degrees using the regression for ``C_h``.

    >>> phase_shift_from_regression(0.5, 0.0, 20.0) == math.degrees(math.atan(0.5))
    True

    """
    return math.degrees(math.atan(c_h + (d_h + B_h * omega) / K_h))


def regression_to_json(label, report):
    return {
        'model': label,
        'c_h': report.c_h,
        'd_h': report.d_h,
        'r_squared': report.r_squared,
    }


def viscous_to_json(report):
    return dict(report._asdict())
