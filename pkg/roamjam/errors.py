# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""Exceptions raised by roamjam."""


class RoamjamError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(RoamjamError):
    """Invalid scenario configuration document or command line."""


class ParameterError(RoamjamError, ValueError):
    """Model or operation parameters outside their valid range."""


class SurfaceError(RoamjamError, ValueError):
    """Malformed attack surface or unknown zone id."""


class ConvergenceError(RoamjamError):
    """An iterative numeric method did not reach its tolerance."""

    def __init__(self, message, iterations=None, residual=None):
        """An iterative numeric method did not reach its tolerance."""
        super(ConvergenceError, self).__init__(message)
        self.iterations = iterations
        self.residual = residual
