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
Unit tests for `hystiff` module.
"""

from unittest import TestCase
import json
import math
import shutil
import tempfile
from os import path

import numpy as np

import hystiff
from hystiff import (
    HystiffError, ValidationError, NumericalError,
    BadFormat, RecordTooShort, GridMismatch, TooFewSections, InfeasibleMargin,
    InsufficientExcitation, RankDeficient, NonPhysical, PerfectFit,
    TimeSeries, FrequencySample, FrequencyResponse, ExperimentConfig,
    ModelParamsM1, ModelParamsM2, ModelParamsM3,
)


def frf_from_params(params, omegas, meta=None):
    """
    Noiseless `FrequencyResponse` of *params* on *omegas*.
    """
    omegas = np.asarray(omegas, dtype=float)
    return FrequencyResponse.from_arrays(omegas, params.evaluate(omegas), meta)


def assert_close(test, expected, got, rel=1e-9, msg=None):
    test.assertTrue(
        math.isclose(got, expected, rel_tol=rel, abs_tol=0.0),
        msg or 'expected {!r}; got {!r} (rel {!r})'.format(expected, got, rel)
    )


class TempDirTestCase(TestCase):
    """
    Creates a temporary directory for each test and removes it afterwards.
    """

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp(prefix='hystiff.')

    def tearDown(self):
        shutil.rmtree(self.tmpdir)
        self.tmpdir = None

    def join(self, *parts):
        return path.join(self.tmpdir, *parts)


class TestConstants(TestCase):
    def test_version(self):
        self.assertIsInstance(hystiff.__version__, str)
        (year, month, rev) = hystiff.__version__.split('.')
        y = int(year)
        self.assertTrue(y >= 26)
        self.assertEqual(str(y), year)
        m = int(month)
        self.assertTrue(1 <= m <= 12)
        self.assertEqual('{:02d}'.format(m), month)
        r = int(rev)
        self.assertTrue(r >= 0)
        self.assertEqual(str(r), rev)

    def test_all(self):
        for name in hystiff.__all__:
            self.assertTrue(hasattr(hystiff, name), name)


class TestErrors(TestCase):
    def test_hierarchy(self):
        self.assertTrue(issubclass(HystiffError, Exception))
        for cls in (BadFormat, RecordTooShort, GridMismatch, TooFewSections,
                    InfeasibleMargin):
            self.assertTrue(issubclass(cls, ValidationError), cls)
            self.assertEqual(cls.exit_code, 2)
        for cls in (InsufficientExcitation, RankDeficient, NonPhysical, PerfectFit):
            self.assertTrue(issubclass(cls, NumericalError), cls)
            self.assertEqual(cls.exit_code, 3)
        self.assertEqual(HystiffError.exit_code, 1)

    def test_InfeasibleMargin(self):
        e = InfeasibleMargin(80.0, 26.5)
        self.assertEqual(e.phi, 80.0)
        self.assertEqual(e.interval, (0.0, 26.5))
        self.assertEqual(str(e),
            'phi=80 deg is infeasible; admissible phi is in (0, 26.5) deg'
        )

    def test_TooFewSections(self):
        e = TooFewSections(2, 25.0, 3.0, 9)
        self.assertEqual(e.required, 9)
        self.assertEqual(str(e),
            'n=2 gives 25 deg phase ripple > 3 deg; need n >= 9'
        )


class TestFunctions(TestCase):
    def test_dumps(self):
        doc = {
            'model': 'M2',
            'note': 'ζ',
            'omegas': np.array([4.0, 5.0]),
            'n': np.int64(10),
        }
        self.assertEqual(
            hystiff.dumps(doc),
            '{"model":"M2","n":10,"note":"ζ","omegas":[4.0,5.0]}'
        )
        self.assertEqual(
            hystiff.dumps({'b': 1, 'a': 2.5}, pretty=True),
            '{\n    "a": 2.5,\n    "b": 1\n}'
        )
        with self.assertRaises(TypeError):
            hystiff.dumps({'x': object()})

    def test_save_load(self):
        d = tempfile.mkdtemp()
        try:
            f = path.join(d, 'doc.json')
            doc = {'K_h': 25.95, 'exp': 'II.3', 'rows': [1, 2, 3]}
            hystiff.save(f, doc)
            with open(f, 'r', encoding='utf-8') as fp:
                text = fp.read()
            self.assertTrue(text.endswith('}\n'))
            self.assertEqual(json.loads(text), doc)
            self.assertEqual(hystiff.load(f), doc)

            bad = path.join(d, 'bad.json')
            with open(bad, 'w') as fp:
                fp.write('{"K_h": ')
            with self.assertRaises(BadFormat) as cm:
                hystiff.load(bad)
            self.assertTrue(str(cm.exception).startswith(repr(bad)))
        finally:
            shutil.rmtree(d)


class TestTimeSeries(TestCase):
    def test_new(self):
        ts = TimeSeries(0.001, 2.0, [1, 2, 3], [0.1, 0.2, 0.3])
        self.assertEqual(ts.dt, 0.001)
        self.assertEqual(ts.t0, 2.0)
        self.assertEqual(ts.tau_c.tolist(), [1.0, 2.0, 3.0])
        self.assertEqual(ts.size, 3)
        self.assertAlmostEqual(ts.duration, 0.003)
        with self.assertRaises(ValueError):
            ts.theta_e[0] = 1.0

        with self.assertRaises(ValidationError) as cm:
            TimeSeries(0, 0, [1, 2], [1, 2])
        self.assertEqual(str(cm.exception), 'dt must be > 0; got 0.0')
        with self.assertRaises(ValidationError) as cm:
            TimeSeries(0.001, 0, [1, 2, 3], [1, 2])
        self.assertEqual(str(cm.exception),
            'tau_c and theta_e must have equal length; got 3 and 2'
        )
        with self.assertRaises(ValidationError) as cm:
            TimeSeries(0.001, 0, [1], [1])
        self.assertEqual(str(cm.exception), 'need at least 2 samples; got 1')
        with self.assertRaises(ValidationError) as cm:
            TimeSeries(0.001, 0, [1, float('nan')], [1, 2])
        self.assertEqual(str(cm.exception), 'tau_c must be finite everywhere')
        with self.assertRaises(ValidationError) as cm:
            TimeSeries(0.001, 0, [[1, 2]], [[1, 2]])
        self.assertEqual(str(cm.exception),
            'tau_c must be 1-dimensional; got shape (1, 2)'
        )

    def test_window(self):
        ts = TimeSeries(0.5, 1.0, range(10), range(10, 20))
        w = ts.window(4, 3)
        self.assertEqual(w.t0, 3.0)
        self.assertEqual(w.dt, 0.5)
        self.assertEqual(w.tau_c.tolist(), [4.0, 5.0, 6.0])
        self.assertEqual(w.theta_e.tolist(), [14.0, 15.0, 16.0])
        self.assertEqual(w.time.tolist(), [3.0, 3.5, 4.0])


class TestFrequencyResponse(TestCase):
    def test_FrequencySample(self):
        s = FrequencySample(4, 3)
        self.assertEqual(s, (4.0, 3+0j))
        self.assertIsInstance(s.value, complex)
        with self.assertRaises(ValidationError) as cm:
            FrequencySample(0, 1j)
        self.assertEqual(str(cm.exception), 'omega must be > 0; got 0.0')
        with self.assertRaises(ValidationError):
            FrequencySample(1.0, complex(float('inf'), 0))

    def test_new(self):
        frf = FrequencyResponse([(2.0, 1+1j), FrequencySample(3.0, 2j)])
        self.assertEqual(frf.size, 2)
        self.assertEqual(frf.meta, {})
        self.assertEqual(frf.omegas.tolist(), [2.0, 3.0])
        self.assertEqual(frf.values.tolist(), [1+1j, 2j])
        with self.assertRaises(ValidationError) as cm:
            FrequencyResponse([])
        self.assertEqual(str(cm.exception), 'need at least 1 sample')
        with self.assertRaises(ValidationError) as cm:
            FrequencyResponse.from_arrays([3.0, 2.0], [1, 1])
        self.assertEqual(str(cm.exception), 'omegas must be strictly increasing')
        with self.assertRaises(ValidationError) as cm:
            FrequencyResponse.from_arrays([1.0, 2.0], [1])
        self.assertEqual(str(cm.exception), 'got 2 omegas but 1 values')

    def test_with_values(self):
        frf = FrequencyResponse.from_arrays([1.0, 2.0], [1, 2], {'exp': 'I.1'})
        other = frf.with_values([3j, 4j])
        self.assertEqual(other.omegas.tolist(), [1.0, 2.0])
        self.assertEqual(other.values.tolist(), [3j, 4j])
        self.assertEqual(other.meta, {'exp': 'I.1'})
        self.assertIsNot(other.meta, frf.meta)
        other = frf.with_values([3j, 4j], {'exp': 'I.2'})
        self.assertEqual(other.meta, {'exp': 'I.2'})


class TestExperimentConfig(TestCase):
    def test_new(self):
        cfg = ExperimentConfig()
        self.assertEqual(cfg, (1.0, 0.0, '', None, None, 0.0))
        cfg = ExperimentConfig(4, 1.01125, 'II.5', 4.5, 14, 16)
        self.assertEqual(cfg.alpha, 4.0)
        self.assertAlmostEqual(cfg.attenuated_inertia, 0.2528125)
        self.assertEqual(cfg.meta(), {'exp': 'II.5', 'alpha': 4.0, 'M_e': 1.01125})
        with self.assertRaises(ValidationError) as cm:
            ExperimentConfig(0.5)
        self.assertEqual(str(cm.exception), 'alpha must be >= 1; got 0.5')
        with self.assertRaises(ValidationError) as cm:
            ExperimentConfig(1, -0.1)
        self.assertEqual(str(cm.exception), 'M_e must be >= 0; got -0.1')
        with self.assertRaises(ValidationError) as cm:
            ExperimentConfig(1, 0.1, load='heavy')
        self.assertEqual(str(cm.exception), "load must be a number; got 'heavy'")


class TestModelParams(TestCase):
    def test_evaluate(self):
        omegas = np.array([1.0, 2.0, 4.0])
        m1 = ModelParamsM1(10.0, 0.5, 0.25)
        m2 = ModelParamsM2(10.0, 3.0, 0.25)
        m3 = ModelParamsM3(10.0, 3.0, 0.5, 0.25)
        real = 10.0 - 0.25 * omegas ** 2
        self.assertEqual(m1.evaluate(omegas).tolist(), list(real + 0.5j * omegas))
        self.assertEqual(m2.evaluate(omegas).tolist(), list(real + 3j))
        self.assertEqual(m3.evaluate(omegas).tolist(),
            list(real + 1j * (3.0 + 0.5 * omegas))
        )
        self.assertEqual(m2.imag_part(omegas).shape, (3,))
        self.assertEqual(complex(m2.evaluate(2.0)), 9+3j)

    def test_validation(self):
        for (cls, args) in [(ModelParamsM1, (1, 1)), (ModelParamsM2, (1, 1))]:
            with self.assertRaises(ValidationError) as cm:
                cls(-1, *args)
            self.assertEqual(str(cm.exception), 'K_h must be > 0; got -1.0')
            with self.assertRaises(ValidationError) as cm:
                cls(1, 1, 0)
            self.assertEqual(str(cm.exception), 'M must be > 0; got 0.0')
        # Damping coefficients of M3 may be negative:
        m3 = ModelParamsM3(15.74, 10.44, -0.60, 1.18)
        self.assertEqual(m3.B_h, -0.60)

    def test_to_dict(self):
        m3 = ModelParamsM3(25.95, 15.48, 0.26, 1.03)
        d = m3.to_dict()
        self.assertEqual(d,
            {'model': 'M3', 'K_h': 25.95, 'C_h': 15.48, 'B_h': 0.26, 'M': 1.03}
        )
        self.assertEqual(hystiff.params_from_dict(d), m3)

    def test_params_from_dict(self):
        with self.assertRaises(ValidationError) as cm:
            hystiff.params_from_dict({'model': 'M4'})
        self.assertEqual(str(cm.exception),
            "model must be 'M1', 'M2' or 'M3'; got 'M4'"
        )
        with self.assertRaises(ValidationError) as cm:
            hystiff.params_from_dict({'model': 'M2', 'K_h': 1, 'M': 1})
        self.assertEqual(str(cm.exception), "M2 parameters need 'C_h'")
        p = hystiff.params_from_dict(
            {'model': 'M1', 'K_h': 10.05, 'B_h': 1.03, 'M': 0.28, 'zeta': 0.31}
        )
        self.assertEqual(p, ModelParamsM1(10.05, 1.03, 0.28))
