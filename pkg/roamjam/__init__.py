# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""Mobility-powered MAC attack toolkit: MDP solver, oracles and MAC sim."""

VERSION_INFO = (0, 3, 0, 'dev0')
__version__ = '.'.join([str(i) for i in VERSION_INFO])
