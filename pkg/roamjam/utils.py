# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""Utilities module."""

from __future__ import absolute_import, print_function

# Standard library imports
from concurrent.futures import ThreadPoolExecutor
import codecs
import errno
import hashlib
import json
import logging
import os
import uuid

# Third party imports
import numpy as np

logger = logging.getLogger(__name__)

# Sub-seeds are masked to 63 bits so they fit numpy and signed 64-bit storage
SEED_MASK = (1 << 63) - 1


def _rename_over_existing(src, dest):
    try:
        # On Windows, this will throw EEXIST, on Linux it won't.
        os.rename(src, dest)
    except (IOError, OSError) as err:
        if err.errno == errno.EEXIST:
            # Not atomic on Windows, but the backup survives a failed rename.
            backup = "{0}.bak-{1}".format(dest, str(uuid.uuid4()))
            os.rename(dest, backup)
            try:
                os.rename(src, dest)
            except Exception as err:
                os.rename(backup, dest)
                raise err
            finally:
                try:
                    os.remove(backup)
                except Exception:
                    pass
        else:
            raise


def atomic_replace(path, contents, encoding='utf-8'):
    """Write `contents` to `path` through a temporary file and a rename."""
    tmp = "{0}tmp-{1}".format(path, str(uuid.uuid4()))
    try:
        # codecs.open writes bytes, '\n' is never translated
        with codecs.open(tmp, 'w', encoding) as file_obj:
            file_obj.write(contents)
            file_obj.flush()
        _rename_over_existing(tmp, path)
    finally:
        try:
            os.remove(tmp)
        except (IOError, OSError):
            pass


def sha256_file(path):
    """Return the hex SHA-256 digest of a file."""
    digest = hashlib.sha256()
    with open(path, 'rb') as file_obj:
        for chunk in iter(lambda: file_obj.read(65536), b''):
            digest.update(chunk)
    return digest.hexdigest()


def canonical_json(data):
    """Serialize `data` with sorted keys and no insignificant whitespace."""
    return json.dumps(data, sort_keys=True, separators=(',', ':'))


def digest_document(data):
    """Return the SHA-256 digest of the canonical JSON form of `data`."""
    return hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()


def derive_seed(root_seed, component):
    """Derive a stable 63-bit sub-seed for a named run component."""
    text = '{0}:{1}'.format(int(root_seed), component).encode('utf-8')
    value = int(hashlib.sha256(text).hexdigest()[:16], 16) & SEED_MASK
    logger.debug('Derived seed %d for component %r', value, component)
    return value


def cpu_count():
    """Return the cpu count."""
    try:
        import multiprocessing
        count = multiprocessing.cpu_count()
    except Exception:
        logger.warning("Using fallback CPU count")
        count = 4
    return count


def batch_sizes(n_trials, batch_size):
    """Split `n_trials` into full batches plus one remainder batch."""
    if n_trials < 1 or batch_size < 1:
        raise ValueError('n_trials and batch_size must be positive')
    sizes = [batch_size] * (n_trials // batch_size)
    if n_trials % batch_size:
        sizes.append(n_trials % batch_size)
    return sizes


def run_batches(function, n_trials, batch_size, seed, n_jobs=1):
    """
    Run `function(rng, size)` over seeded batches and return the results.

    Batch b draws from a Generator seeded with the b-th child of
    SeedSequence(seed). Results come back in batch order whatever the
    number of worker threads.
    """
    sizes = batch_sizes(int(n_trials), int(batch_size))
    seeds = np.random.SeedSequence(int(seed)).spawn(len(sizes))

    def run_one(batch):
        logger.debug('Batch %d/%d (%d trials)', batch + 1, len(sizes),
                     sizes[batch])
        return function(np.random.default_rng(seeds[batch]), sizes[batch])

    if n_jobs is None or n_jobs < 1:
        n_jobs = cpu_count()
    with ThreadPoolExecutor(max_workers=n_jobs) as executor:
        return list(executor.map(run_one, range(len(sizes))))
