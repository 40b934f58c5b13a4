# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""roamjam setup script."""

# Standard library imports
import ast
import io
import os

# Third party imports
from setuptools import find_packages, setup

HERE = os.path.abspath(os.path.dirname(__file__))


def get_version():
    """Get roamjam version."""
    with open(os.path.join(HERE, 'roamjam', '__init__.py')) as file_obj:
        lines = file_obj.read().split('\n')
    version_info = [l for l in lines if l.startswith('VERSION_INFO')][0]
    version_info = ast.literal_eval(version_info.split('=')[-1].strip())
    return '.'.join(map(str, version_info))


def get_readme():
    """Get roamjam README."""
    path = os.path.join(HERE, 'README.md')
    with io.open(path, encoding='utf-8') as file_obj:
        readme = file_obj.read()
    return readme


packages = find_packages()
setup(
    name='roamjam',
    version=get_version(),
    description=('Attacker MDP, hop oracles and coexistence MAC simulation '
                 'for mobility-powered attacks on shared spectrum'),
    long_description=get_readme(),
    long_description_content_type='text/markdown',
    license='MIT',
    packages=packages,
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.20',
        'pandas>=1.5',
        'scipy>=1.4',
        'six>=1.10',
    ],
    extras_require={
        'test': [
            'pytest>=3.0',
            'pytest-cov>=2.4',
            'pytest-xdist>=1.15',
            'coverage>=4.2',
        ],
        'dev': [
            'ciocheck',
            'autopep8>=1.2',
            'flake8>=3.0',
            'isort>=4.2',
            'pydocstyle>=1.1',
            'pylint>=1.6',
            'yapf>=0.12',
        ],
    },
    entry_points={
        'console_scripts': [
            'roamjam = roamjam.main:main'
        ]
    },
    include_package_data=True, )
