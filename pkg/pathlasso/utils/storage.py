"""
File formats: dataset CSV, truth JSON, selection lists, path tables and
run provenance.
"""
import json
import logging
import os

import numpy as np
import pandas as pd

from pathlasso.models import MediationDataset, TruthRecord
from pathlasso.utils.responses import serialize_data

logger = logging.getLogger(__name__)


class DatasetFormatError(ValueError):
    """An input file is missing, unreadable or not in the expected format."""


def _read_csv(path):
    try:
        return pd.read_csv(path)
    except FileNotFoundError:
        raise DatasetFormatError(f'file not found: {path}')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise DatasetFormatError(f'cannot parse {path}: {exc}')


def read_dataset(path):
    """
    Read a dataset CSV with columns Z, R and any number of mediator columns.

    Mediators are every column other than Z and R, in file order; their
    headers become the column names.

    Returns:
        MediationDataset

    Raises:
        DatasetFormatError: If the file is missing, unparsable, lacks Z or R,
            has no mediator column or holds non-numeric or missing cells
        ValueError: If the values violate dataset invariants
    """
    frame = _read_csv(path)
    missing = [name for name in ('Z', 'R') if name not in frame.columns]
    if missing:
        raise DatasetFormatError(f'{path}: missing column(s) {", ".join(missing)}')
    mediators = [name for name in frame.columns if name not in ('Z', 'R')]
    if not mediators:
        raise DatasetFormatError(f'{path}: no mediator columns')
    try:
        values = frame.apply(pd.to_numeric, errors='raise')
    except (ValueError, TypeError) as exc:
        raise DatasetFormatError(f'{path}: non-numeric value ({exc})')
    if values.isna().any().any():
        raise DatasetFormatError(f'{path}: empty cells')

    logger.debug('read %s: n=%d K=%d', path, len(values), len(mediators))
    return MediationDataset(
        z=values['Z'].to_numpy(dtype=float),
        m=values[mediators].to_numpy(dtype=float),
        r=values['R'].to_numpy(dtype=float),
        column_names=tuple(str(name) for name in mediators),
    )


def write_dataset(dataset, path):
    """Write Z, the mediators and R as a CSV with a header row."""
    frame = pd.DataFrame(dataset.m, columns=list(dataset.column_names))
    frame.insert(0, 'Z', dataset.z)
    frame['R'] = dataset.r
    write_table(frame, path)


def read_truth(path):
    """Read a truth JSON written by write_truth."""
    try:
        with open(path, encoding='utf-8') as handle:
            data = json.load(handle)
    except FileNotFoundError:
        raise DatasetFormatError(f'file not found: {path}')
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f'cannot parse {path}: {exc}')
    try:
        return TruthRecord.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise DatasetFormatError(f'{path}: malformed truth record ({exc})')


def write_truth(truth, path):
    write_json(truth, path)


def read_selected(path):
    """
    Read a selection list: a CSV with a 'mediator' column of 1-based indices.

    Returns:
        list: Sorted mediator indices
    """
    frame = _read_csv(path)
    if 'mediator' not in frame.columns:
        raise DatasetFormatError(f'{path}: missing column mediator')
    try:
        indices = pd.to_numeric(frame['mediator'], errors='raise')
    except (ValueError, TypeError) as exc:
        raise DatasetFormatError(f'{path}: non-numeric mediator index ({exc})')
    return sorted(int(j) for j in indices)


def write_json(data, path):
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(serialize_data(data), handle, indent=2, sort_keys=True)
        handle.write('\n')


def write_table(frame, path):
    frame.to_csv(path, index=False, lineterminator='\n')


def write_config(run_config, output_dir):
    """Store the resolved RunConfig (without runtime-only keys) as config.json."""
    write_json(run_config.provenance(), os.path.join(output_dir, 'config.json'))


def ensure_output_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def fit_row(fit, column_names):
    """One path-table row: tuning, status, objective, C then A, B and AB per mediator."""
    row = {
        'lambda': fit.spec.lam,
        'phi': fit.spec.phi,
        'omega': fit.spec.omega,
        'converged': fit.converged,
        'iterations': fit.iterations,
        'objective': fit.objective,
        'C': fit.coefs.c,
    }
    for prefix, values in (('A', fit.coefs.a), ('B', fit.coefs.b), ('AB', fit.coefs.ab)):
        for name, value in zip(column_names, values):
            row[f'{prefix}_{name}'] = float(value)
    return row


def path_frame(path):
    """PathResult as a table, one row per grid point."""
    return pd.DataFrame([fit_row(fit, path.column_names) for fit in path.fits])


def coefficient_frame(coefs, column_names, extra=None):
    """Per-mediator table of a, b and ab."""
    frame = pd.DataFrame({
        'mediator': np.arange(1, coefs.k + 1),
        'label': list(column_names),
        'a': coefs.a,
        'b': coefs.b,
        'ab': coefs.ab,
    })
    for key, value in (extra or {}).items():
        frame[key] = value
    return frame
