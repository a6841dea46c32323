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
The ``hystiff`` command.

Every subcommand reads JSON config or earlier outputs, writes its results
into an output directory, and records what it did in ``manifest.json``
alongside them.  Exit codes: 0 on success, 2 for invalid input, 3 for a
numerical failure.
"""

import argparse
import logging
import os
import sys
import time
from collections import namedtuple
from os import path

import numpy as np
from dbase32 import time_id

from . import (
    __version__, HystiffError, ValidationError, NumericalError, BadFormat,
    ExperimentConfig, load, save,
)
from . import control, fixtures
from .identify import compensate_inertia, fit_all, params_to_json, fit_from_json
from .signal import (
    ChirpSpec, SegmentationSpec, estimate_frf, check_settling_gap,
    save_timeseries, load_timeseries, frf_to_json,
)
from .sim import (
    ProtocolSpec, simulate_protocol, truth_from_json, truth_to_json,
    protocol_to_json,
)
from .stats import (
    compare_models, ftest_to_json, regress_ch_kh, regression_to_json,
    viscous_hypothesis_check, viscous_to_json, FALSE_REJECT,
)


log = logging.getLogger()

NOMINAL_PLANT = {
    'K_h': 20.0,
    'c_h': 0.5,
    'M_h': 0.3,
    'M_e': 0.6,
    'alpha': 4.0,
}
DEFAULT_PHI = 10.0
DEFAULT_N = 10
SWEEP_POINTS = 50

RunManifest = namedtuple('RunManifest',
    'command inputs outputs params version seed run_id timestamp'
)


def write_manifest(outdir, command, inputs, outputs, params, seed=None):
    """
    Write ``manifest.json`` into *outdir* and return the `RunManifest`.

    *run_id* and *timestamp* differ on every run; everything else depends
    only on the inputs.
    """
    manifest = RunManifest(
        command,
        [path.abspath(p) for p in inputs],
        sorted(outputs),
        params,
        __version__,
        seed,
        time_id(),
        time.time(),
    )
    save(path.join(outdir, 'manifest.json'), manifest._asdict())
    return manifest


def _outdir(args):
    outdir = path.abspath(args.outdir)
    os.makedirs(outdir, exist_ok=True)
    return outdir


def load_config(filename):
    if filename is None:
        return {}
    config = load(filename)
    if not isinstance(config, dict):
        raise BadFormat('{!r}: config must be a JSON object'.format(filename))
    return config


def _section(config, name):
    value = config.get(name, {})
    if not isinstance(value, dict):
        raise ValidationError('{}: must be a JSON object'.format(name))
    return dict(value)


def _build(name, cls, values):
    try:
        return cls(**values)
    except (TypeError, ValidationError) as e:
        raise ValidationError('{}: {}'.format(name, e)) from None


def protocol_from_config(config):
    """
    `ProtocolSpec` from the ``chirp``, ``segmentation`` and ``experiment``
    sections, filled in from the preset named by ``exp`` when given.
    """
    chirp = _section(config, 'chirp')
    seg = _section(config, 'segmentation')
    exp = _section(config, 'experiment')
    label = config.get('exp')
    if label:
        preset = fixtures.experiment_protocol(label)
        chirp = dict(preset.chirp._asdict(), **chirp)
        seg = dict(preset.segmentation._asdict(), **seg)
        exp = dict(preset.experiment._asdict(), **exp)
    return ProtocolSpec(
        _build('chirp', ChirpSpec, chirp),
        _build('segmentation', SegmentationSpec, seg),
        _build('experiment', ExperimentConfig, exp),
    )


def truth_from_config(config, seed=None):
    """
    `SubjectTruth` from the ``truth`` section.

    The section either lists the model parameters or names a preset row,
    ``{"exp": "II.3", "model": "M2"}``.
    """
    t = _section(config, 'truth')
    if not t:
        raise ValidationError('truth: section is required')
    if 'exp' in t and 'K_h' not in t:
        params = fixtures.subject_params(t.pop('exp'), t.get('model', 'M2'))
        t.update(params.to_dict())
    if seed is not None:
        t['seed'] = seed
    try:
        return truth_from_json(t)
    except ValidationError as e:
        raise ValidationError('truth: {}'.format(e)) from None


def cmd_simulate(args):
    config = load_config(args.config)
    protocol = protocol_from_config(config)
    truth = truth_from_config(config, args.seed)
    record = simulate_protocol(truth, protocol)
    outdir = _outdir(args)
    save_timeseries(path.join(outdir, 'record.csv'), record)
    save(path.join(outdir, 'truth.json'), {
        'exp': protocol.experiment.exp,
        'truth': truth_to_json(truth),
        'protocol': protocol_to_json(protocol),
    })
    write_manifest(outdir, 'simulate', [args.config],
        ['record.csv', 'truth.json'], protocol_to_json(protocol), truth.seed
    )


def cmd_identify(args):
    config = load_config(args.config)
    protocol = protocol_from_config(config)
    record = load_timeseries(args.csv)
    cfg = protocol.experiment
    frf = estimate_frf(record, protocol.chirp, protocol.segmentation, cfg.meta())
    compensated = compensate_inertia(frf, cfg)
    fits = fit_all(compensated)
    check_settling_gap(protocol.segmentation, fits['M2'].zeta, fits['M2'].omega_n)
    records = [params_to_json(cfg.exp, fits[name]) for name in sorted(fits)]
    outdir = _outdir(args)
    save(path.join(outdir, 'params.json'), records)
    save(path.join(outdir, 'frf.json'), frf_to_json(frf))
    write_manifest(outdir, 'identify', [args.csv, args.config],
        ['frf.json', 'params.json'], protocol_to_json(protocol)
    )


def _load_records(filenames):
    records = []
    for filename in filenames:
        doc = load(filename)
        if isinstance(doc, dict):
            doc = [doc]
        if not isinstance(doc, list):
            raise BadFormat('{!r}: expected a list of parameter records'.format(filename))
        records.extend(doc)
    return records


def _group_fits(records):
    groups = {}
    for record in records:
        if not isinstance(record, dict):
            raise BadFormat('parameter records must be JSON objects')
        (exp, fit) = fit_from_json(record)
        groups.setdefault(exp, {})[fit.params.model] = fit
    return groups


def cmd_ftest(args):
    groups = _group_fits(_load_records(args.params))
    reports = []
    for exp in sorted(groups):
        fits = groups[exp]
        missing = sorted(set(('M1', 'M2', 'M3')) - set(fits))
        if missing:
            raise ValidationError(
                'experiment {!r}: missing model record(s) {}'.format(
                    exp, ', '.join(missing)
                )
            )
        n = (args.n or fits['M3'].n or DEFAULT_N)
        for (comparison, report) in sorted(compare_models(fits, n, args.p).items()):
            reports.append(ftest_to_json(exp, comparison, report))
            log.info('%s %s: F=%.4g (critical %.4g)%s', exp, comparison,
                report.f_stat, report.f_critical,
                (' significant' if report.significant else '')
            )
    outdir = _outdir(args)
    save(path.join(outdir, 'ftest.json'), reports)
    write_manifest(outdir, 'ftest', args.params, ['ftest.json'],
        {'n': args.n, 'p': args.p}
    )


def _regression_rows(filenames):
    if not filenames:
        return dict(
            (model, fixtures.subject_rows(model)) for model in ('M1', 'M2', 'M3')
        )
    rows = {'M1': [], 'M2': [], 'M3': []}
    for record in _load_records(filenames):
        if not isinstance(record, dict):
            raise BadFormat('parameter records must be JSON objects')
        rows.setdefault(record.get('model'), []).append(record)
    return rows


def cmd_regress(args):
    rows = _regression_rows(args.params)
    result = {'source': ('files' if args.params else 'fixture')}
    try:
        for model in ('M2', 'M3'):
            report = regress_ch_kh([(r['K_h'], r['C_h']) for r in rows[model]])
            result[model] = regression_to_json(model, report)
            log.info('%s: C_h = %.4g K_h + %.4g, R^2 = %.4g', model,
                report.c_h, report.d_h, report.r_squared
            )
        viscous = viscous_hypothesis_check(
            [(r['omega_n'], r['zeta']) for r in rows['M1']]
        )
    except (KeyError, TypeError) as e:
        raise BadFormat('bad parameters record: {!r}'.format(e)) from None
    result['viscous'] = viscous_to_json(viscous)
    outdir = _outdir(args)
    save(path.join(outdir, 'regression.json'), result)
    write_manifest(outdir, 'regress', args.params, ['regression.json'],
        {'source': result['source']}
    )


def plant_from_args(args):
    """
    Resolve the plant: flags win over ``--model``/``--regression`` files,
    which win over the config ``plant`` section, which wins over the nominal
    subject.
    """
    values = dict(NOMINAL_PLANT)
    values.update(_section(load_config(args.config), 'plant'))
    if args.regression:
        try:
            values['c_h'] = load(args.regression)['M2']['c_h']
        except (KeyError, TypeError):
            raise BadFormat(
                '{!r}: no M2 regression slope'.format(args.regression)
            ) from None
    if args.model:
        m2 = [r for r in _load_records([args.model])
            if isinstance(r, dict) and r.get('model') == 'M2']
        if not m2:
            raise ValidationError('{!r}: no M2 record'.format(args.model))
        try:
            values.update(K_h=m2[0]['K_h'], c_h=m2[0]['C_h'] / m2[0]['K_h'])
        except (KeyError, TypeError, ZeroDivisionError) as e:
            raise BadFormat('{!r}: bad M2 record: {!r}'.format(args.model, e)) from None
    for name in ('K_h', 'c_h', 'M_h', 'M_e', 'alpha', 'omega_sea', 'zeta_sea'):
        value = getattr(args, name)
        if value is not None:
            values[name] = value
    return control.plant_from_dict(values)


def write_bode_files(outdir, design, per_decade=control.POINTS_PER_DECADE):
    cfg = design.plant
    grid = control.default_grid(cfg, per_decade)
    systems = [
        ('bode-plant.csv', cfg),
        ('bode-controller.csv', design.controller),
        ('bode-cascade.csv', design.cascade),
        ('bode-loop.csv', control.Loop(design.controller, cfg)),
        ('bode-loop-cascade.csv', control.Loop(design.cascade, cfg)),
    ]
    for (name, system) in systems:
        control.save_bode(path.join(outdir, name), control.bode(system, grid))
    return [name for (name, system) in systems]


def cmd_design(args):
    cfg = plant_from_args(args)
    design_section = _section(load_config(args.config), 'design')
    phi = (args.phi if args.phi is not None
        else design_section.get('phi', DEFAULT_PHI))
    design = control.design_controller(cfg, phi,
        f=(args.f if args.f is not None else design_section.get('f')),
        omega_c=(args.omega_c if args.omega_c is not None
            else design_section.get('omega_c')),
        n=(args.n if args.n is not None
            else design_section.get('n', control.DEFAULT_SECTIONS)),
    )
    if design.margin.phase_margin is None or design.margin.phase_margin < phi:
        raise NumericalError(
            'designed loop has margin {!r} deg, below the {!r} deg target'.format(
                design.margin.phase_margin, phi
            )
        )
    doc = control.design_to_json(design)
    if args.sweep:
        (K_lo, K_hi) = args.sweep
        sweep = control.robustness_sweep(design,
            np.linspace(K_lo, K_hi, args.sweep_points),
            cfg.model.c_h, cfg.model.M_h, cfg.M_e, cfg.alpha,
            cfg.omega_sea, cfg.zeta_sea,
        )
        doc['sweep'] = {
            'min_margin': sweep.min_margin,
            'worst_K_h': sweep.worst_K_h,
            'violations': list(sweep.violations),
        }
    outdir = _outdir(args)
    save(path.join(outdir, 'design.json'), doc)
    outputs = write_bode_files(outdir, design)
    write_manifest(outdir, 'design',
        [p for p in (args.config, args.model, args.regression) if p],
        ['design.json'] + outputs, doc
    )


def cmd_bode(args):
    design = control.design_from_json(load(args.design))
    outdir = _outdir(args)
    outputs = write_bode_files(outdir, design, args.per_decade)
    write_manifest(outdir, 'bode', [args.design], outputs,
        {'per_decade': args.per_decade}
    )


def build_parser():
    parser = argparse.ArgumentParser(prog='hystiff',
        description='Identify hysteretic joint stiffness and design augmentation controllers.',
    )
    parser.add_argument('--version', action='version', version=__version__)
    parser.add_argument('-v', '--verbose', action='store_true',
        help='log debug messages'
    )
    parser.add_argument('-q', '--quiet', action='store_true',
        help='log warnings and errors only'
    )
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument('-o', '--outdir', default='.',
            help='output directory (default: current directory)'
        )
        return p

    p = add('simulate', cmd_simulate, 'simulate a subject under a protocol')
    p.add_argument('config', help='JSON config with truth and protocol')
    p.add_argument('--seed', type=int, help='override the noise seed')

    p = add('identify', cmd_identify, 'fit M1, M2 and M3 to a record')
    p.add_argument('csv', help='time series CSV (t,tau_c,theta_e)')
    p.add_argument('config', help='JSON config with the protocol')

    p = add('ftest', cmd_ftest, 'F-test M1 and M2 against M3')
    p.add_argument('params', nargs='+', help='parameter JSON from identify')
    p.add_argument('--n', type=int, help='complex samples per experiment')
    p.add_argument('--p', type=float, default=FALSE_REJECT,
        help='false-rejection probability (default: %(default)s)'
    )

    p = add('regress', cmd_regress, 'regress C_h on K_h')
    p.add_argument('params', nargs='*',
        help='parameter JSON from identify (default: the shipped subject data)'
    )

    p = add('design', cmd_design, 'design a fractional-order controller')
    p.add_argument('--config', help='JSON config with plant and design sections')
    p.add_argument('--model', help='parameter JSON from identify; uses its M2 record')
    p.add_argument('--regression', help='regression JSON; uses its M2 slope as c_h')
    p.add_argument('--K-h', dest='K_h', type=float)
    p.add_argument('--c-h', dest='c_h', type=float)
    p.add_argument('--M-h', dest='M_h', type=float)
    p.add_argument('--M-e', dest='M_e', type=float)
    p.add_argument('--alpha', type=float)
    p.add_argument('--omega-sea', dest='omega_sea', type=float)
    p.add_argument('--zeta-sea', dest='zeta_sea', type=float)
    p.add_argument('--phi', type=float, help='target phase margin in degrees')
    p.add_argument('--f', type=float, help='fractional order')
    p.add_argument('--omega-c', dest='omega_c', type=float, help='crossover in rad/s')
    p.add_argument('--n', type=int, help='lag sections in the cascade')
    p.add_argument('--sweep', nargs=2, type=float, metavar=('K_LO', 'K_HI'),
        help='also sweep K_h over this range'
    )
    p.add_argument('--sweep-points', type=int, default=SWEEP_POINTS)

    p = add('bode', cmd_bode, 'export Bode data of a design')
    p.add_argument('design', help='design JSON')
    p.add_argument('--per-decade', type=int, default=control.POINTS_PER_DECADE)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    else:
        level = logging.INFO
    logging.basicConfig(level=level, format='%(levelname)s: %(message)s')
    try:
        args.func(args)
    except HystiffError as e:
        print('hystiff: error: {}'.format(e), file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print('hystiff: error: {}'.format(e), file=sys.stderr)
        return ValidationError.exit_code
    return 0


if __name__ == '__main__':
    sys.exit(main())
