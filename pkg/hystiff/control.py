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
Augmentation plant and fractional-order controller synthesis.

The exoskeleton amplifies the human's interaction torque by *alpha*.  With the
human modeled by the one-parameter complex stiffness ``K_h*(1 + c_h*j)``, the
torque loop sees the plant

    ``P(jw) = alpha * S_he_alpha(jw) / S_he(jw) * G_sea(jw)``

where ``S_he_alpha`` carries the human inertia plus the attenuated exoskeleton
inertia ``M_e/alpha``, ``S_he`` carries the full ``M_e``, and ``G_sea`` is the
second order low-pass of the series elastic actuator.

The phase of ``S_he_alpha/S_he`` never falls below ``atan(c_h) - 180``
degrees.  A controller ``k_f/(jw)**f`` adds a constant ``-90*f`` degrees, so
any ``90*f < atan(c_h) - phi`` leaves at least *phi* degrees of phase margin
wherever the SEA lag is negligible.  In practice the fractional element is
realized as a cascade of first order lag sections.
"""

import cmath
import logging
import math
from collections import namedtuple

import numpy as np

from . import (
    ValidationError, InfeasibleMargin, TooFewSections,
    _float, _positive, _nonnegative,
)


log = logging.getLogger()

SEA_BANDWIDTH_HZ = 10.0
DEFAULT_OMEGA_SEA = 2 * math.pi * SEA_BANDWIDTH_HZ
DEFAULT_ZETA_SEA = 0.7
POINTS_PER_DECADE = 400
BISECT_RTOL = 1e-4
RIPPLE_TOLERANCE = 3.0  # degrees
DEFAULT_SECTIONS = 8
MAX_SECTIONS = 1024


class OneParamModel(namedtuple('OneParamModel', 'K_h c_h M_h')):
    """
    Human joint as ``K_h*(1 + c_h*j) - M_h*w**2``.
    """

    __slots__ = ()

    def __new__(cls, K_h, c_h, M_h):
        return super().__new__(cls,
            _positive('K_h', K_h),
            _nonnegative('c_h', c_h),
            _positive('M_h', M_h),
        )

    def stiffness(self, omega, inertia):
        omega = np.asarray(omega, dtype=float)
        return self.K_h * complex(1, self.c_h) - inertia * omega ** 2


class PlantConfig(namedtuple('PlantConfig', 'model M_e alpha omega_sea zeta_sea')):
    """
    Everything `eval_plant()` needs.

    >>> cfg = PlantConfig(OneParamModel(20, 0.5, 0.3), 0.6, 4)
    >>> round(cfg.omega_coupled, 3), round(cfg.omega_attenuated, 3)
    (4.714, 6.667)

    """

    __slots__ = ()

    def __new__(cls, model, M_e, alpha, omega_sea=DEFAULT_OMEGA_SEA,
                zeta_sea=DEFAULT_ZETA_SEA):
        if not isinstance(model, OneParamModel):
            raise ValidationError(
                'model must be a OneParamModel; got {!r}'.format(model)
            )
        M_e = _nonnegative('M_e', M_e)
        alpha = _float('alpha', alpha)
        if not alpha >= 1:
            raise ValidationError('alpha must be >= 1; got {!r}'.format(alpha))
        omega_sea = _positive('omega_sea', omega_sea)
        zeta_sea = _positive('zeta_sea', zeta_sea)
        self = super().__new__(cls, model, M_e, alpha, omega_sea, zeta_sea)
        if not omega_sea > self.omega_attenuated:
            raise ValidationError(
                'omega_sea must exceed the attenuated resonance {:.4g} rad/s; got {!r}'.format(
                    self.omega_attenuated, omega_sea
                )
            )
        return self

    @property
    def inertia_coupled(self):
        return self.model.M_h + self.M_e

    @property
    def inertia_attenuated(self):
        return self.model.M_h + self.M_e / self.alpha

    @property
    def omega_coupled(self):
        'Resonance of the human with the full exoskeleton inertia.'
        return math.sqrt(self.model.K_h / self.inertia_coupled)

    @property
    def omega_attenuated(self):
        'Resonance of the human with the attenuated exoskeleton inertia.'
        return math.sqrt(self.model.K_h / self.inertia_attenuated)

    def evaluate(self, omega):
        return eval_plant(self, omega)

    def with_stiffness(self, K_h, c_h=None):
        if c_h is None:
            c_h = self.model.c_h
        return PlantConfig(OneParamModel(K_h, c_h, self.model.M_h),
            self.M_e, self.alpha, self.omega_sea, self.zeta_sea
        )

    def to_dict(self):
        d = dict(self.model._asdict())
        d.update(M_e=self.M_e, alpha=self.alpha,
            omega_sea=self.omega_sea, zeta_sea=self.zeta_sea
        )
        return d


def plant_from_dict(d):
    try:
        model = OneParamModel(d['K_h'], d['c_h'], d['M_h'])
        return PlantConfig(model, d['M_e'], d['alpha'],
            d.get('omega_sea', DEFAULT_OMEGA_SEA),
            d.get('zeta_sea', DEFAULT_ZETA_SEA),
        )
    except KeyError as e:
        raise ValidationError('plant needs {!r}'.format(e.args[0])) from None


def one_param_from_regression(report, K_h, M_h):
    """
    One-parameter model from a C_h/K_h regression.

    The intercept is taken as negligible, so ``c_h`` is the regression slope
    (clamped at zero).
    """
    return OneParamModel(K_h, max(report.c_h, 0.0), M_h)


def sea_response(omega, omega_sea, zeta_sea):
    s = 1j * np.asarray(omega, dtype=float)
    return omega_sea ** 2 / (s ** 2 + 2 * zeta_sea * omega_sea * s + omega_sea ** 2)


def augmentation_error_ratio(cfg, omega):
    """
    ``alpha * S_he_alpha / S_he``, the plant without the SEA.
    """
    model = cfg.model
    return (cfg.alpha
        * model.stiffness(omega, cfg.inertia_attenuated)
        / model.stiffness(omega, cfg.inertia_coupled))


def eval_plant(cfg, omega):
    """
    Complex plant response at *omega* (rad/s).

    At low frequency the plant is the static amplification:

    >>> cfg = PlantConfig(OneParamModel(20, 0.5, 0.3), 0.6, 4)
    >>> round(abs(complex(eval_plant(cfg, 0.001))), 4)
    4.0

    """
    return (augmentation_error_ratio(cfg, omega)
        * sea_response(omega, cfg.omega_sea, cfg.zeta_sea))


class FractionalController(namedtuple('FractionalController', 'k_f f')):
    """
    Ideal fractional element ``k_f / (j*w)**f``.
    """

    __slots__ = ()

    def evaluate(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.k_f * omega ** (-self.f) * cmath.exp(-0.5j * math.pi * self.f)


class RationalTF(namedtuple('RationalTF', 'gain zeros poles')):
    """
    ``gain * prod(s - z) / prod(s - p)`` evaluated on the imaginary axis.

    >>> lag = RationalTF(1.0, [], [-1.0])
    >>> round(abs(complex(lag.evaluate(1.0))), 6)
    0.707107

    """

    __slots__ = ()

    def __new__(cls, gain, zeros, poles):
        gain = _float('gain', gain)
        zeros = tuple(complex(z) for z in zeros)
        poles = tuple(complex(p) for p in poles)
        for r in zeros + poles:
            if not cmath.isfinite(r):
                raise ValidationError('zeros and poles must be finite; got {!r}'.format(r))
        return super().__new__(cls, gain, zeros, poles)

    def evaluate(self, omega):
        s = 1j * np.asarray(omega, dtype=float)
        result = np.full(s.shape, self.gain, dtype=complex)
        for z in self.zeros:
            result = result * (s - z)
        for p in self.poles:
            result = result / (s - p)
        return result

    def scaled(self, k):
        return RationalTF(self.gain * k, self.zeros, self.poles)

    @property
    def is_stable(self):
        return all(p.real < 0 for p in self.poles)

    @property
    def is_minimum_phase(self):
        return all(z.real < 0 for z in self.zeros)


class CascadeGeometry(namedtuple('CascadeGeometry', 'n p1 r_pp r_zp')):
    """
    ``n`` lag sections with poles ``p1 * r_pp**i`` and zeros ``r_zp`` above
    each pole.
    """

    __slots__ = ()

    def __new__(cls, n, p1, r_pp, r_zp):
        if not (isinstance(n, int) and n >= 1):
            raise ValidationError('n must be an int >= 1; got {!r}'.format(n))
        p1 = _positive('p1', p1)
        r_zp = _float('r_zp', r_zp)
        if not r_zp > 1:
            raise ValidationError('r_zp must be > 1; got {!r}'.format(r_zp))
        r_pp = _float('r_pp', r_pp)
        if not r_pp > r_zp:
            raise ValidationError(
                'r_pp must be > r_zp={!r}; got {!r}'.format(r_zp, r_pp)
            )
        return super().__new__(cls, n, p1, r_pp, r_zp)

    @property
    def order(self):
        return cascade_order(self.r_zp, self.r_pp)

    @property
    def poles(self):
        return self.p1 * self.r_pp ** np.arange(self.n)

    @property
    def zeros(self):
        return self.r_zp * self.poles


DesignSpec = namedtuple('DesignSpec', 'phi f k_f omega_c cascade')
FractionalOrder = namedtuple('FractionalOrder', 'lower upper f')
MarginReport = namedtuple('MarginReport', 'omega_crossover phase_margin all_crossovers')
SweepReport = namedtuple('SweepReport', 'min_margin worst_K_h violations reports')
Design = namedtuple('Design', 'spec plant controller cascade margin cascade_margin')


def cascade_order(r_zp, r_pp):
    """
    Fractional order approximated by a cascade, ``log(r_zp)/log(r_pp)``.

    >>> cascade_order(4.0, 4.0)
    1.0

    """
    return math.log(r_zp) / math.log(r_pp)


def choose_fractional_order(c_h, phi_deg):
    """
    Admissible fractional orders for a target phase margin of *phi_deg*.

    Returns a `FractionalOrder` with the open interval bounds and the selected
    order, its midpoint.

    >>> order = choose_fractional_order(0.5, 10)
    >>> round(order.upper, 3), round(order.f, 3)
    (0.184, 0.092)

    """
    c_h = _nonnegative('c_h', c_h)
    phi_deg = _float('phi', phi_deg)
    limit = math.degrees(math.atan(c_h))
    if not phi_deg > 0:
        raise ValidationError('phi must be > 0; got {!r}'.format(phi_deg))
    if not phi_deg < limit:
        raise InfeasibleMargin(phi_deg, limit)
    upper = (limit - phi_deg) / 90
    return FractionalOrder(0.0, upper, upper / 2)


def crossover_gain(f, omega_c, magnitude):
    """
    Gain placing the crossover of ``k_f/(jw)**f * P`` at *omega_c*.

    >>> round(crossover_gain(0.2, 10.0, 2.0), 3)
    0.792

    """
    return _positive('omega_c', omega_c) ** f / _positive('magnitude', magnitude)


def tune_gain(cfg, f, omega_c):
    """
    Tune ``k_f`` for a crossover at *omega_c*, between the two resonances.

    When ``alpha == 1`` the resonances coincide; the band check is skipped and
    a warning logged.
    """
    omega_c = _positive('omega_c', omega_c)
    (lo, hi) = (cfg.omega_coupled, cfg.omega_attenuated)
    if cfg.alpha == 1:
        log.warning('alpha == 1: no crossover band, using omega_c=%.4g', omega_c)
    elif not lo < omega_c < hi:
        raise ValidationError(
            'omega_c must lie in ({:.4g}, {:.4g}) rad/s; got {!r}'.format(
                lo, hi, omega_c
            )
        )
    return crossover_gain(f, omega_c, abs(complex(eval_plant(cfg, omega_c))))


def cascade_geometry(f, band, n):
    """
    Geometry of an *n*-section cascade of order *f* spanning *band*.

    The first pole sits at the lower band edge and the last zero at the upper
    one.
    """
    f = _float('f', f)
    if not 0 < f < 1:
        raise ValidationError('f must be in (0, 1); got {!r}'.format(f))
    (w_lo, w_hi) = (_positive('w_lo', band[0]), _float('w_hi', band[1]))
    if not w_hi > w_lo:
        raise ValidationError(
            'w_hi must be > w_lo={!r}; got {!r}'.format(w_lo, w_hi)
        )
    if not (isinstance(n, int) and n >= 1):
        raise ValidationError('n must be an int >= 1; got {!r}'.format(n))
    r_pp = (w_hi / w_lo) ** (1 / (n - 1 + f))
    return CascadeGeometry(n, w_lo, r_pp, r_pp ** f)


def cascade_tf(geometry):
    """
    ``p1**-f * prod((1 + s/z_i)/(1 + s/p_i))`` as a `RationalTF`.
    """
    f = geometry.order
    gain = geometry.p1 ** (-f) * geometry.r_zp ** (-geometry.n)
    return RationalTF(gain, -geometry.zeros, -geometry.poles)


def cascade_ripple(geometry):
    """
    Peak phase deviation from ``-90*f`` over one section spacing at the
    geometric center of the cascade.
    """
    tf = cascade_tf(geometry)
    top = geometry.zeros[-1]
    center = math.sqrt(geometry.p1 * top)
    grid = center * geometry.r_pp ** np.linspace(-0.5, 0.5, 65)
    phase = np.degrees(np.angle(tf.evaluate(grid)))
    return float(np.max(np.abs(phase + 90 * geometry.order)))


def lag_cascade(f, band, n, ripple=RIPPLE_TOLERANCE):
    """
    Approximate ``1/s**f`` over *band* by *n* first order lag sections.

    Raises `TooFewSections` when the mid-band phase ripple exceeds *ripple*
    degrees; pass ``ripple=None`` to skip the check.
    """
    geometry = cascade_geometry(f, band, n)
    if ripple is not None:
        measured = cascade_ripple(geometry)
        if measured > ripple:
            required = None
            for m in range(n + 1, MAX_SECTIONS + 1):
                if cascade_ripple(cascade_geometry(f, band, m)) <= ripple:
                    required = m
                    break
            raise TooFewSections(n, measured, ripple, required)
    return cascade_tf(geometry)


def log_grid(w_lo, w_hi, per_decade=POINTS_PER_DECADE):
    """
    Log-spaced grid from *w_lo* to *w_hi* with *per_decade* points per decade.
    """
    decades = math.log10(w_hi / w_lo)
    count = max(2, int(math.ceil(decades * per_decade)) + 1)
    return np.logspace(math.log10(w_lo), math.log10(w_hi), count)


def default_grid(cfg, per_decade=POINTS_PER_DECADE):
    return log_grid(cfg.omega_coupled / 100, 100 * cfg.omega_sea, per_decade)


class Loop(namedtuple('Loop', 'controller plant')):
    """
    Open loop ``controller * plant``; *plant* is a `PlantConfig`.
    """

    __slots__ = ()

    def evaluate(self, omega):
        return self.controller.evaluate(omega) * eval_plant(self.plant, omega)


def _evaluator(loop):
    return getattr(loop, 'evaluate', loop)


def _log_gain(evaluate, omega):
    with np.errstate(divide='ignore', invalid='ignore'):
        return float(np.log(np.abs(evaluate(omega))))


def _bisect(evaluate, lo, hi, rtol):
    below = _log_gain(evaluate, lo) < 0
    while hi / lo - 1 > rtol:
        mid = math.sqrt(lo * hi)
        if (_log_gain(evaluate, mid) < 0) == below:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def margins(loop, grid, rtol=BISECT_RTOL):
    """
    Locate every unity-gain crossing of *loop* over *grid*.

    *loop* is anything with an ``evaluate(omega)`` method, or a callable.  The
    phase margin is taken at the lowest crossing and wrapped into
    ``(-180, 180]``.

    >>> report = margins(lambda w: 5 / (1j * w), log_grid(0.1, 100))
    >>> round(report.omega_crossover, 3), round(report.phase_margin, 6)
    (5.0, 90.0)

    """
    evaluate = _evaluator(loop)
    grid = np.asarray(grid, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        excess = np.log(np.abs(evaluate(grid)))
    crossings = []
    for i in range(len(grid) - 1):
        (a, b) = (excess[i], excess[i + 1])
        if a == 0:
            crossings.append(float(grid[i]))
        elif (a < 0 and b > 0) or (a > 0 and b < 0):
            crossings.append(_bisect(evaluate, grid[i], grid[i + 1], rtol))
    if len(grid) and excess[-1] == 0:
        crossings.append(float(grid[-1]))
    if not crossings:
        log.debug('no crossover in %.4g to %.4g rad/s', grid[0], grid[-1])
        return MarginReport(None, None, ())
    omega_c = crossings[0]
    phase = math.degrees(cmath.phase(complex(evaluate(omega_c))))
    margin = 180.0 + phase
    if margin > 180:
        margin -= 360
    return MarginReport(omega_c, margin, tuple(crossings))


def margin_to_json(report):
    return {
        'omega_crossover': report.omega_crossover,
        'phase_margin': report.phase_margin,
        'all_crossovers': list(report.all_crossovers),
    }


def design_controller(cfg, phi, f=None, omega_c=None, n=DEFAULT_SECTIONS,
                      band=None, grid=None, ripple=RIPPLE_TOLERANCE):
    """
    Synthesize a fractional-order augmentation controller for *cfg*.

    The order defaults to the midpoint of the admissible interval, the
    crossover to the geometric mean of the two resonances, and the cascade
    band to a decade either side of them.  The margins of the ideal and the
    cascade-realized loops are both reported.
    """
    order = choose_fractional_order(cfg.model.c_h, phi)
    if f is None:
        f = order.f
    elif not order.lower < f < order.upper:
        raise ValidationError(
            'f must be in ({:.4g}, {:.4g}) for phi={!r}; got {!r}'.format(
                order.lower, order.upper, phi, f
            )
        )
    if omega_c is None:
        omega_c = math.sqrt(cfg.omega_coupled * cfg.omega_attenuated)
    k_f = tune_gain(cfg, f, omega_c)
    if band is None:
        band = (cfg.omega_coupled / 10, 10 * cfg.omega_attenuated)
    geometry = cascade_geometry(f, band, n)
    cascade = lag_cascade(f, band, n, ripple).scaled(k_f)
    controller = FractionalController(k_f, f)
    if grid is None:
        grid = default_grid(cfg)
    margin = margins(Loop(controller, cfg), grid)
    cascade_margin = margins(Loop(cascade, cfg), grid)
    if margin.phase_margin is None or margin.phase_margin < phi:
        log.warning('designed loop margin %r is below the %.4g deg target',
            margin.phase_margin, phi
        )
    log.info('designed f=%.4g, k_f=%.4g, crossover %r rad/s, margin %r deg',
        f, k_f, margin.omega_crossover, margin.phase_margin
    )
    spec = DesignSpec(float(phi), float(f), k_f, float(omega_c), geometry)
    return Design(spec, cfg, controller, cascade, margin, cascade_margin)


def design_to_json(design):
    spec = design.spec
    return {
        'phi': spec.phi,
        'f': spec.f,
        'k_f': spec.k_f,
        'omega_c': spec.omega_c,
        'cascade': dict(spec.cascade._asdict()),
        'plant': design.plant.to_dict(),
        'margin': margin_to_json(design.margin),
        'cascade_margin': margin_to_json(design.cascade_margin),
    }


def _margin_from_json(d):
    try:
        return MarginReport(d['omega_crossover'], d['phase_margin'],
            tuple(d['all_crossovers'])
        )
    except (KeyError, TypeError) as e:
        raise ValidationError('bad margin record: {!r}'.format(e)) from None


def design_from_json(obj):
    """
    Rebuild a `Design` from the output of `design_to_json()`.
    """
    try:
        plant = plant_from_dict(obj['plant'])
        c = obj['cascade']
        geometry = CascadeGeometry(int(c['n']), c['p1'], c['r_pp'], c['r_zp'])
        spec = DesignSpec(float(obj['phi']), float(obj['f']),
            _positive('k_f', obj['k_f']), float(obj['omega_c']), geometry
        )
    except (KeyError, TypeError) as e:
        raise ValidationError('bad design document: {!r}'.format(e)) from None
    controller = FractionalController(spec.k_f, spec.f)
    cascade = cascade_tf(geometry).scaled(spec.k_f)
    return Design(spec, plant, controller, cascade,
        _margin_from_json(obj.get('margin')),
        _margin_from_json(obj.get('cascade_margin')),
    )


def robustness_sweep(design, K_range, c_h, M_h, M_e, alpha,
                     omega_sea=DEFAULT_OMEGA_SEA, zeta_sea=DEFAULT_ZETA_SEA,
                     grid=None, realized=False):
    """
    Margins of the fixed controller in *design* for every ``K_h`` in *K_range*.

    With *realized* the lag cascade is used instead of the ideal element.  An
    undefined margin counts as the worst case.
    """
    controller = (design.cascade if realized else design.controller)
    reports = []
    for K_h in K_range:
        cfg = PlantConfig(OneParamModel(K_h, c_h, M_h), M_e, alpha,
            omega_sea, zeta_sea
        )
        report = margins(Loop(controller, cfg),
            (default_grid(cfg) if grid is None else grid)
        )
        reports.append((float(K_h), report))
        log.debug('K_h=%.4g: margin %r deg', K_h, report.phase_margin)
    if not reports:
        raise ValidationError('K_range is empty')

    def badness(item):
        margin = item[1].phase_margin
        return (-math.inf if margin is None else margin)

    (worst_K_h, worst) = min(reports, key=badness)
    violations = tuple(
        K for (K, r) in reports
        if r.phase_margin is None or r.phase_margin < design.spec.phi
    )
    if violations:
        log.warning('margin below %.4g deg for %d of %d K_h values',
            design.spec.phi, len(violations), len(reports)
        )
    return SweepReport(worst.phase_margin, worst_K_h, violations, tuple(reports))


def bode(system, omega):
    """
    Rows of ``(omega, mag_db, phase_deg)`` with the phase unwrapped.
    """
    omega = np.asarray(omega, dtype=float)
    response = _evaluator(system)(omega)
    mag_db = 20 * np.log10(np.abs(response))
    phase_deg = np.degrees(np.unwrap(np.angle(response)))
    return np.column_stack((omega, mag_db, phase_deg))


def save_bode(filename, rows):
    np.savetxt(filename, rows,
        fmt='%.17g', delimiter=',', header='omega,mag_db,phase_deg', comments=''
    )
    log.debug('wrote %d Bode rows to %r', len(rows), filename)
