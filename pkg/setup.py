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
Install `hystiff`.
"""

import sys
if sys.version_info < (3, 8):
    sys.exit('hystiff requires Python 3.8 or newer')

from setuptools import setup, Command
import os

import hystiff


class Test(Command):
    description = 'run unit tests and doc tests'

    user_options = [
        ('skip-all', None, 'skip all tests'),
        ('skip-slow', None, 'skip the Monte Carlo and 200-record tests'),
    ]

    def initialize_options(self):
        self.skip_all = 0
        self.skip_slow = 0

    def finalize_options(self):
        pass

    def run(self):
        if self.skip_all:
            sys.exit(0)
        if self.skip_slow:
            os.environ['HYSTIFF_TEST_SKIP_SLOW'] = 'true'
        from hystiff.tests.run import run_tests
        if not run_tests():
            raise SystemExit('2')


setup(
    name='hystiff',
    description='hysteretic joint stiffness, identified and put to work',
    version=hystiff.__version__,
    license='LGPLv3+',
    packages=['hystiff', 'hystiff.tests'],
    package_data={'hystiff': ['data/*.json']},
    install_requires=['numpy', 'scipy', 'dbase32'],
    entry_points={
        'console_scripts': ['hystiff = hystiff.cli:main'],
    },
    cmdclass={'test': Test},
)
