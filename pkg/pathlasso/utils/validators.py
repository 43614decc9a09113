"""
Validation utilities for input data.
"""
import math

import numpy as np


def validate_enum(value, enum_class, field_name='value', allowed=None):
    """
    Resolve an enum member from a member, its value or its name.

    Args:
        value: Member, value ('0.1lambda') or name ('tenth')
        enum_class: Enum class to resolve against
        field_name: Name of the field for error messages
        allowed: Optional subset of members that are accepted

    Returns:
        Enum: The member

    Raises:
        ValueError: If value names no accepted member
    """
    members = list(allowed) if allowed is not None else list(enum_class)
    for member in members:
        if value is member or value == member.value or value == member.name:
            return member
    choices = [member.value for member in members]
    raise ValueError(f'Invalid value for {field_name}. Must be one of: {choices}')


def validate_required_fields(params, required):
    """
    Check that every required run parameter was given a value.

    Args:
        params: Resolved run parameters
        required: Parameter names that may not be None

    Raises:
        ValueError: Naming the missing parameters
    """
    missing = [name for name in required if params.get(name) is None]
    if missing:
        raise ValueError(f'Missing required parameters: {", ".join(missing)} '
                         f'(set them by flag or in the --config file)')


def validate_positive_integer(value, field_name='value', allow_zero=False):
    """
    Validate that a value is a positive integer.

    Args:
        value: Value to validate
        field_name: Name of the field for error messages
        allow_zero: Whether to allow zero as valid

    Returns:
        int: Validated integer

    Raises:
        ValueError: If value is not a positive integer
    """
    try:
        int_value = int(value)
    except (ValueError, TypeError):
        raise ValueError(f'{field_name} must be an integer')
    if int_value != value and not isinstance(value, str):
        raise ValueError(f'{field_name} must be an integer')
    if allow_zero and int_value < 0:
        raise ValueError(f'{field_name} must be non-negative')
    if not allow_zero and int_value <= 0:
        raise ValueError(f'{field_name} must be a positive integer')
    return int_value


def validate_numeric_range(value, field_name='value', min_val=None, max_val=None,
                           min_inclusive=True, max_inclusive=True):
    """
    Validate that a numeric value is finite and within a range.

    Args:
        value: Value to validate
        field_name: Name of the field for error messages
        min_val: Minimum allowed value
        max_val: Maximum allowed value
        min_inclusive: Whether min_val itself is allowed
        max_inclusive: Whether max_val itself is allowed

    Returns:
        float: Validated numeric value

    Raises:
        ValueError: If value is not a finite number or is outside the range
    """
    try:
        num_value = float(value)
    except (ValueError, TypeError):
        raise ValueError(f'{field_name} must be a number')
    if not math.isfinite(num_value):
        raise ValueError(f'{field_name} must be finite')
    if min_val is not None:
        if min_inclusive and num_value < min_val:
            raise ValueError(f'{field_name} must be at least {min_val}')
        if not min_inclusive and num_value <= min_val:
            raise ValueError(f'{field_name} must be greater than {min_val}')
    if max_val is not None:
        if max_inclusive and num_value > max_val:
            raise ValueError(f'{field_name} must be at most {max_val}')
        if not max_inclusive and num_value >= max_val:
            raise ValueError(f'{field_name} must be less than {max_val}')
    return num_value


def validate_probability(value, field_name='value'):
    """Validate a value strictly inside (0, 1)."""
    return validate_numeric_range(value, field_name, 0.0, 1.0,
                                  min_inclusive=False, max_inclusive=False)


def validate_finite(array, field_name='array', ndim=None):
    """
    Convert to a float array and check every entry is finite.

    Args:
        array: Array-like input
        field_name: Name of the field for error messages
        ndim: Required number of dimensions, if any

    Returns:
        numpy.ndarray: Float64 copy of the input

    Raises:
        ValueError: If entries are non-numeric or non-finite, or ndim differs
    """
    try:
        values = np.array(array, dtype=float)
    except (ValueError, TypeError):
        raise ValueError(f'{field_name} must be numeric')
    if ndim is not None and values.ndim != ndim:
        raise ValueError(f'{field_name} must be {ndim}-dimensional, got shape {values.shape}')
    if not np.all(np.isfinite(values)):
        raise ValueError(f'{field_name} contains non-finite entries')
    return values


def validate_same_length(first, second, first_name='first', second_name='second'):
    """Raise ValueError unless the two sequences have equal length."""
    if len(first) != len(second):
        raise ValueError(f'{first_name} and {second_name} differ in length ({len(first)} vs {len(second)})')
