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
Unit tests for the `hystiff.control` module.
"""

from unittest import TestCase
import cmath
import math

import numpy as np

from hystiff import ValidationError, InfeasibleMargin, TooFewSections
from hystiff import control, stats
from hystiff.control import OneParamModel, PlantConfig

from . import TempDirTestCase, assert_close


def nominal(**kw):
    values = dict(K_h=20.0, c_h=0.5, M_h=0.3, M_e=0.6, alpha=4.0)
    values.update(kw)
    return PlantConfig(
        OneParamModel(values['K_h'], values['c_h'], values['M_h']),
        values['M_e'], values['alpha'],
        values.get('omega_sea', control.DEFAULT_OMEGA_SEA),
        values.get('zeta_sea', control.DEFAULT_ZETA_SEA),
    )


def phase_deg(value):
    return math.degrees(cmath.phase(complex(value)))


class TestPlant(TestCase):
    def test_OneParamModel(self):
        m = OneParamModel(20, 0.5, 0.3)
        self.assertEqual(m, (20.0, 0.5, 0.3))
        self.assertEqual(complex(m.stiffness(2.0, 0.5)), complex(18.0, 10.0))
        with self.assertRaises(ValidationError) as cm:
            OneParamModel(20, -0.1, 0.3)
        self.assertEqual(str(cm.exception), 'c_h must be >= 0; got -0.1')
        with self.assertRaises(ValidationError) as cm:
            OneParamModel(0, 0.5, 0.3)
        self.assertEqual(str(cm.exception), 'K_h must be > 0; got 0.0')

    def test_PlantConfig(self):
        cfg = nominal()
        self.assertAlmostEqual(cfg.inertia_coupled, 0.9)
        self.assertAlmostEqual(cfg.inertia_attenuated, 0.45)
        self.assertAlmostEqual(cfg.omega_coupled, math.sqrt(20 / 0.9))
        self.assertAlmostEqual(cfg.omega_attenuated, math.sqrt(20 / 0.45))
        self.assertEqual(cfg.omega_sea, 2 * math.pi * 10)
        self.assertEqual(cfg.zeta_sea, 0.7)

        with self.assertRaises(ValidationError) as cm:
            nominal(alpha=0.5)
        self.assertEqual(str(cm.exception), 'alpha must be >= 1; got 0.5')
        with self.assertRaises(ValidationError) as cm:
            nominal(omega_sea=5.0)
        self.assertTrue(str(cm.exception).startswith(
            'omega_sea must exceed the attenuated resonance 6.667 rad/s'
        ))
        with self.assertRaises(ValidationError):
            PlantConfig((20, 0.5, 0.3), 0.6, 4)

        stiffer = cfg.with_stiffness(40.0)
        self.assertEqual(stiffer.model, OneParamModel(40.0, 0.5, 0.3))
        self.assertEqual(stiffer[1:], cfg[1:])
        self.assertEqual(cfg.with_stiffness(40.0, 0.0).model.c_h, 0.0)

    def test_plant_dict(self):
        cfg = nominal(zeta_sea=0.3)
        d = cfg.to_dict()
        self.assertEqual(d, {
            'K_h': 20.0, 'c_h': 0.5, 'M_h': 0.3, 'M_e': 0.6, 'alpha': 4.0,
            'omega_sea': 2 * math.pi * 10, 'zeta_sea': 0.3,
        })
        self.assertEqual(control.plant_from_dict(d), cfg)
        del d['M_e']
        with self.assertRaises(ValidationError) as cm:
            control.plant_from_dict(d)
        self.assertEqual(str(cm.exception), "plant needs 'M_e'")

    def test_one_param_from_regression(self):
        report = stats.RegressionReport(0.54, 2.0, 0.88)
        m = control.one_param_from_regression(report, 25.0, 0.3)
        self.assertEqual(m, OneParamModel(25.0, 0.54, 0.3))
        report = stats.RegressionReport(-0.1, 2.0, 0.1)
        self.assertEqual(control.one_param_from_regression(report, 25.0, 0.3).c_h, 0.0)

    def test_low_frequency_asymptote(self):
        cfg = nominal()
        gain = abs(complex(control.eval_plant(cfg, cfg.omega_coupled / 100)))
        self.assertTrue(abs(gain / 4.0 - 1) < 0.02, gain)

    def test_high_frequency_asymptote(self):
        cfg = nominal()
        expected = (4.0 * 0.3 + 0.6) / (0.3 + 0.6)
        center = math.sqrt(cfg.omega_attenuated * cfg.omega_sea)
        ratio = abs(complex(control.augmentation_error_ratio(cfg, 10 * center)))
        self.assertTrue(abs(ratio / expected - 1) < 0.02, ratio)
        gain = abs(complex(control.eval_plant(cfg, center)))
        self.assertTrue(abs(gain / expected - 1) < 0.07, gain)

    def test_phase_bound(self):
        # The SEA-free plant never lags by more than 180 - atan(c_h) degrees:
        for c_h in (0.1, 0.5, 1.0):
            cfg = nominal(c_h=c_h)
            bound = math.degrees(math.atan(c_h)) - 180
            omega = control.log_grid(0.01, 1000, 200)
            phase = np.degrees(np.angle(control.augmentation_error_ratio(cfg, omega)))
            self.assertTrue(np.all(phase >= bound - 1e-9), c_h)
            self.assertTrue(np.all(phase <= 1e-9), c_h)

    def test_sea_response(self):
        self.assertEqual(complex(control.sea_response(0.0, 10.0, 0.7)), 1+0j)
        at = complex(control.sea_response(10.0, 10.0, 0.7))
        self.assertAlmostEqual(phase_deg(at), -90.0)
        self.assertAlmostEqual(abs(at), 1 / 1.4)


class TestTransferFunctions(TestCase):
    def test_FractionalController(self):
        c = control.FractionalController(2.0, 0.4)
        for omega in (0.1, 1.0, 30.0):
            value = complex(c.evaluate(omega))
            self.assertAlmostEqual(abs(value), 2.0 * omega ** -0.4)
            self.assertAlmostEqual(phase_deg(value), -36.0)

    def test_RationalTF(self):
        tf = control.RationalTF(2, [-1.0], [-2.0, -3.0])
        self.assertEqual(tf.zeros, (-1+0j,))
        self.assertTrue(tf.is_stable)
        self.assertTrue(tf.is_minimum_phase)
        self.assertAlmostEqual(complex(tf.evaluate(0.0)), 2 / 6)
        self.assertAlmostEqual(complex(tf.scaled(3).evaluate(0.0)), 1.0)
        self.assertFalse(control.RationalTF(1, [1.0], [1.0]).is_stable)
        self.assertFalse(control.RationalTF(1, [1.0], [-1.0]).is_minimum_phase)
        with self.assertRaises(ValidationError):
            control.RationalTF(1, [complex('inf')], [])
        self.assertEqual(tf.evaluate([1.0, 2.0]).shape, (2,))


class TestCascade(TestCase):
    def test_cascade_geometry(self):
        g = control.cascade_geometry(0.2, (0.5, 500), 12)
        self.assertEqual(g.n, 12)
        self.assertEqual(g.p1, 0.5)
        self.assertAlmostEqual(g.order, 0.2)
        self.assertAlmostEqual(g.zeros[-1], 500.0)
        self.assertAlmostEqual(g.r_pp, 1.853, places=3)
        self.assertAlmostEqual(g.r_zp, 1.131, places=3)
        self.assertEqual(len(g.poles), 12)
        with self.assertRaises(ValidationError) as cm:
            control.cascade_geometry(1.0, (0.5, 500), 12)
        self.assertEqual(str(cm.exception), 'f must be in (0, 1); got 1.0')
        with self.assertRaises(ValidationError):
            control.cascade_geometry(0.2, (500, 0.5), 12)
        with self.assertRaises(ValidationError):
            control.cascade_geometry(0.2, (0.5, 500), 0)
        with self.assertRaises(ValidationError):
            control.CascadeGeometry(3, 1.0, 1.5, 2.0)

    def test_lag_cascade(self):
        tf = control.lag_cascade(0.2, (0.5, 500), 12)
        self.assertTrue(tf.is_stable)
        self.assertTrue(tf.is_minimum_phase)
        self.assertEqual(len(tf.poles), 12)
        center = math.sqrt(0.5 * 500)
        omega = control.log_grid(center / 10, center * 10)
        response = tf.evaluate(omega)
        phase = np.degrees(np.angle(response))
        self.assertTrue(np.max(np.abs(phase + 18.0)) <= 3.0)
        mag_db = 20 * np.log10(np.abs(response))
        slope = np.polyfit(np.log10(omega), mag_db, 1)[0]
        self.assertTrue(abs(slope + 4.0) <= 1.0, slope)

    def test_cascade_matches_fractional_gain(self):
        f = 0.3
        tf = control.lag_cascade(f, (0.01, 100), 16)
        for omega in (0.3, 1.0, 3.0):
            ideal = control.FractionalController(1.0, f).evaluate(omega)
            ratio = abs(complex(tf.evaluate(omega))) / abs(complex(ideal))
            self.assertTrue(abs(ratio - 1) < 0.05, (omega, ratio))

    def test_convergence(self):
        omega = control.log_grid(10 ** -0.5, 10 ** 0.5)
        errors = []
        for n in (4, 8, 16):
            tf = control.lag_cascade(0.5, (1e-3, 1e3), n, ripple=None)
            phase = np.degrees(np.angle(tf.evaluate(omega)))
            errors.append(float(np.max(np.abs(phase + 45.0))))
        self.assertTrue(errors[0] > errors[1] > errors[2], errors)
        self.assertTrue(errors[2] < 0.5, errors)

    def test_too_few_sections(self):
        with self.assertRaises(TooFewSections) as cm:
            control.lag_cascade(0.2, (0.5, 500), 2)
        e = cm.exception
        self.assertEqual(e.n, 2)
        self.assertTrue(e.ripple > 3.0)
        self.assertIsInstance(e.required, int)
        self.assertTrue(2 < e.required <= 12, e.required)
        control.lag_cascade(0.2, (0.5, 500), e.required)
        self.assertTrue(
            control.cascade_ripple(control.cascade_geometry(0.2, (0.5, 500), e.required))
            <= 3.0
        )


class TestSynthesis(TestCase):
    def test_choose_fractional_order(self):
        order = control.choose_fractional_order(0.5, 10)
        limit = math.degrees(math.atan(0.5))
        self.assertEqual(order.lower, 0.0)
        self.assertAlmostEqual(order.upper, (limit - 10) / 90)
        self.assertAlmostEqual(order.f, (limit - 10) / 180)

        with self.assertRaises(InfeasibleMargin) as cm:
            control.choose_fractional_order(0.5, 80)
        self.assertEqual(cm.exception.interval, (0.0, limit))
        self.assertIn('admissible phi is in (0, 26.57) deg', str(cm.exception))
        with self.assertRaises(InfeasibleMargin):
            control.choose_fractional_order(0.0, 5)
        with self.assertRaises(ValidationError) as cm:
            control.choose_fractional_order(0.5, 0)
        self.assertNotIsInstance(cm.exception, InfeasibleMargin)

    def test_tune_gain(self):
        cfg = nominal()
        k_f = control.tune_gain(cfg, 0.1, 5.5)
        loop = control.Loop(control.FractionalController(k_f, 0.1), cfg)
        self.assertAlmostEqual(abs(complex(loop.evaluate(5.5))), 1.0)
        with self.assertRaises(ValidationError) as cm:
            control.tune_gain(cfg, 0.1, 10.0)
        self.assertTrue(str(cm.exception).startswith('omega_c must lie in (4.714, 6.667)'))
        with self.assertLogs(level='WARNING'):
            control.tune_gain(nominal(alpha=1.0), 0.1, 10.0)

    def test_margins(self):
        report = control.margins(lambda w: 5 / (1j * w), control.log_grid(0.1, 100))
        assert_close(self, 5.0, report.omega_crossover, 1e-4)
        self.assertAlmostEqual(report.phase_margin, 90.0)
        self.assertEqual(len(report.all_crossovers), 1)

        report = control.margins(lambda w: 0.5 + 0 * w, control.log_grid(0.1, 100))
        self.assertEqual(report, (None, None, ()))

        # Two crossings of a lightly damped resonance:
        def peaky(w):
            s = 1j * w
            return 4.0 / (s ** 2 + 0.2 * s + 1)
        report = control.margins(peaky, control.log_grid(0.01, 100))
        self.assertEqual(len(report.all_crossovers), 1)
        self.assertTrue(report.omega_crossover > 1.0)

        # Phase margin is wrapped into (-180, 180]:
        lead = control.margins(lambda w: 2 * np.exp(0.5j) * np.ones_like(w) / w,
            control.log_grid(0.1, 100)
        )
        self.assertAlmostEqual(lead.phase_margin, 180 + math.degrees(0.5) - 360)

    def test_bare_plant_margin(self):
        light = control.margins(nominal(zeta_sea=0.05),
            control.default_grid(nominal(zeta_sea=0.05))
        )
        self.assertTrue(light.omega_crossover > control.DEFAULT_OMEGA_SEA)
        self.assertTrue(0 < light.phase_margin < 15, light.phase_margin)
        damped = control.margins(nominal(), control.default_grid(nominal()))
        self.assertTrue(55 < damped.phase_margin < 80, damped.phase_margin)

    def test_design_controller(self):
        cfg = nominal()
        design = control.design_controller(cfg, 10.0, n=10)
        spec = design.spec
        self.assertAlmostEqual(spec.f, 0.0920, places=4)
        self.assertAlmostEqual(spec.omega_c,
            math.sqrt(cfg.omega_coupled * cfg.omega_attenuated)
        )
        self.assertAlmostEqual(spec.k_f, 0.328, places=2)
        self.assertEqual(design.controller, control.FractionalController(spec.k_f, spec.f))
        self.assertTrue(design.margin.phase_margin >= 10.0)
        assert_close(self, spec.omega_c, design.margin.omega_crossover, 1e-3)
        self.assertIsNotNone(design.cascade_margin.phase_margin)
        self.assertTrue(design.cascade.is_stable)
        self.assertEqual(len(design.cascade.poles), 10)

        # Explicit order and crossover:
        design = control.design_controller(cfg, 10.0, f=0.15, omega_c=5.0, n=10)
        self.assertEqual(design.spec.f, 0.15)
        self.assertEqual(design.spec.omega_c, 5.0)
        with self.assertRaises(ValidationError):
            control.design_controller(cfg, 10.0, f=0.2)
        with self.assertRaises(InfeasibleMargin):
            control.design_controller(cfg, 80.0)

    def test_ideal_margin_guarantee(self):
        # With negligible SEA lag the margin at the crossover is at least phi:
        for c_h in (0.3, 0.5, 1.0):
            limit = math.degrees(math.atan(c_h))
            for phi in (limit / 4, limit / 2):
                model = OneParamModel(20.0, c_h, 0.05)
                probe = PlantConfig(model, 1.0, 20.0)
                cfg = PlantConfig(model, 1.0, 20.0, 10 * probe.omega_attenuated)
                design = control.design_controller(cfg, phi, omega_c=4.5, n=12)
                loop = control.Loop(design.controller, cfg)
                margin = 180 + phase_deg(loop.evaluate(4.5))
                self.assertTrue(margin >= phi, (c_h, phi, margin))

    def test_alpha_one(self):
        cfg = nominal(alpha=1.0)
        with self.assertLogs(level='WARNING'):
            design = control.design_controller(cfg, 10.0, n=10)
        self.assertTrue(design.margin.phase_margin >= 10.0)
        sea = control.sea_response(3.0, cfg.omega_sea, cfg.zeta_sea)
        self.assertAlmostEqual(complex(control.eval_plant(cfg, 3.0)), complex(sea))

    def test_robustness_sweep(self):
        design = control.design_controller(nominal(), 10.0, n=10)
        K_range = np.linspace(10, 48.6, 20)
        sweep = control.robustness_sweep(design, K_range, 0.5, 0.3, 0.6, 4.0)
        self.assertEqual(len(sweep.reports), 20)
        self.assertTrue(sweep.min_margin > 0, sweep.min_margin)
        self.assertIn(sweep.worst_K_h, [float(K) for K in K_range])
        worst = min(r.phase_margin for (K, r) in sweep.reports)
        self.assertEqual(sweep.min_margin, worst)

        realized = control.robustness_sweep(design, [20.0], 0.5, 0.3, 0.6, 4.0,
            realized=True
        )
        self.assertTrue(realized.min_margin > 0)

        # Without hysteretic damping the same controller loses its margin:
        bare = control.robustness_sweep(design, [20.0], 0.0, 0.3, 0.6, 4.0)
        self.assertTrue(bare.min_margin < 0, bare.min_margin)
        self.assertEqual(bare.violations, (20.0,))

        with self.assertRaises(ValidationError):
            control.robustness_sweep(design, [], 0.5, 0.3, 0.6, 4.0)

    def test_design_json(self):
        design = control.design_controller(nominal(), 10.0, n=10)
        doc = control.design_to_json(design)
        self.assertEqual(sorted(doc),
            ['cascade', 'cascade_margin', 'f', 'k_f', 'margin', 'omega_c', 'phi', 'plant']
        )
        back = control.design_from_json(doc)
        self.assertEqual(back.spec, design.spec)
        self.assertEqual(back.plant, design.plant)
        self.assertEqual(back.controller, design.controller)
        self.assertEqual(back.margin, design.margin)
        for omega in (0.5, 5.0, 50.0):
            assert_close(self, abs(complex(design.cascade.evaluate(omega))),
                abs(complex(back.cascade.evaluate(omega))), 1e-12
            )
        del doc['cascade']
        with self.assertRaises(ValidationError):
            control.design_from_json(doc)


class TestBode(TempDirTestCase):
    def test_bode(self):
        omega = control.log_grid(0.1, 10, 10)
        self.assertEqual(len(omega), 21)
        rows = control.bode(lambda w: 1 / (1j * w), omega)
        self.assertEqual(rows.shape, (21, 3))
        self.assertEqual(rows[:, 0].tolist(), omega.tolist())
        self.assertTrue(np.allclose(rows[:, 1], -20 * np.log10(omega)))
        self.assertTrue(np.allclose(rows[:, 2], -90.0))

        # Phase is unwrapped through -180:
        rows = control.bode(lambda w: 1 / (1 + 1j * w) ** 3, control.log_grid(0.1, 100, 10))
        self.assertTrue(np.all(np.diff(rows[:, 2]) < 0))
        self.assertTrue(rows[-1, 2] < -250.0, rows[-1, 2])

    def test_save_bode(self):
        rows = control.bode(nominal(), control.log_grid(1, 10, 4))
        f = self.join('bode.csv')
        control.save_bode(f, rows)
        with open(f, 'r') as fp:
            lines = fp.read().splitlines()
        self.assertEqual(lines[0], 'omega,mag_db,phase_deg')
        self.assertEqual(len(lines), 1 + len(rows))
        back = np.loadtxt(f, delimiter=',', skiprows=1)
        self.assertEqual(back.tolist(), rows.tolist())
