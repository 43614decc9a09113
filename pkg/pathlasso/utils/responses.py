"""
Response formatting utilities for consistent command output.

Every command prints one JSON envelope: results go to stdout, errors to
stderr. The returned integer is the process exit code.
"""
import enum
import json
import logging

import click
import numpy as np

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SERVER_ERROR = 1
EXIT_IO_ERROR = 2
EXIT_VALIDATION_ERROR = 3


def _emit(payload, err=False):
    click.echo(json.dumps(payload, indent=2, sort_keys=True, allow_nan=True), err=err)


def success_response(data, exit_code=EXIT_OK):
    """
    Format successful command output.

    Args:
        data: Response data (dict, list, or model object)
        exit_code: Process exit code (default 0)

    Returns:
        int: Exit code
    """
    _emit({'status': 'success', 'data': serialize_data(data)})
    return exit_code


def error_response(code, message, details=None, exit_code=EXIT_VALIDATION_ERROR):
    """
    Format error output on stderr.

    Args:
        code: Error code string
        message: Human-readable error message
        details: Optional additional error details
        exit_code: Process exit code (default 3)

    Returns:
        int: Exit code
    """
    response = {
        'error': {
            'code': code,
            'message': message
        }
    }

    if details:
        response['error']['details'] = serialize_data(details)

    _emit(response, err=True)
    return exit_code


def warning_response(data, warning_dict, exit_code=EXIT_OK):
    """
    Format output that succeeded with a warning (used for non-convergence).

    Args:
        data: Response data
        warning_dict: Warning information with code, message, and details
        exit_code: Process exit code (default 0)

    Returns:
        int: Exit code
    """
    _emit({
        'status': 'success_with_warning',
        'data': serialize_data(data),
        'warning': serialize_data(warning_dict),
    })
    return exit_code


def exception_response(exc):
    """
    Map an exception raised by a command onto the exit-code contract.

    Read and parse failures exit 2, validation failures exit 3, anything
    else is an internal error and exits 1.
    """
    from pathlasso.utils.storage import DatasetFormatError

    if isinstance(exc, DatasetFormatError):
        return error_response('PARSE_ERROR', str(exc), exit_code=EXIT_IO_ERROR)
    if isinstance(exc, json.JSONDecodeError):
        return error_response('PARSE_ERROR', f'invalid JSON: {exc}', exit_code=EXIT_IO_ERROR)
    if isinstance(exc, OSError):
        return error_response('IO_ERROR', str(exc), exit_code=EXIT_IO_ERROR)
    if isinstance(exc, ValueError):
        return error_response('VALIDATION_ERROR', str(exc), exit_code=EXIT_VALIDATION_ERROR)
    logger.exception('unexpected failure')
    return error_response('SERVER_ERROR', f'Internal error: {exc}', exit_code=EXIT_SERVER_ERROR)


def serialize_data(data):
    """
    Serialize data for JSON output, handling numpy values, sets and enums.

    Args:
        data: Data to serialize (dict, list, model, array, etc.)

    Returns:
        Serialized data suitable for json.dumps
    """
    if data is None:
        return None

    # Handle model objects with to_dict method
    if hasattr(data, 'to_dict'):
        return serialize_data(data.to_dict())

    if isinstance(data, dict):
        return {str(key): serialize_data(value) for key, value in data.items()}

    if isinstance(data, (list, tuple)):
        return [serialize_data(item) for item in data]

    if isinstance(data, (set, frozenset)):
        return sorted(serialize_data(item) for item in data)

    if isinstance(data, np.ndarray):
        return serialize_data(data.tolist())

    if isinstance(data, np.bool_):
        return bool(data)

    if isinstance(data, np.integer):
        return int(data)

    if isinstance(data, np.floating):
        return float(data)

    if isinstance(data, enum.Enum):
        return data.value

    # Return as-is for basic types
    return data
