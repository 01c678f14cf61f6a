"""Numerical geometry of sampled metric measure spaces."""

from ._core import (
    Error,
    SampledSpace,
    ScalarField,
    SetIndicator,
    cheeger,
    circle,
    coarea,
    content,
    distance_to_set,
    explicit_space,
    fat_cantor_interval,
    field_from_values,
    grid_box,
    hausdorff,
    measure,
    perimeter,
    run_config,
    run_suite,
    set_from_indices,
    set_from_mask,
    set_workers,
    space_from_spec,
    suites,
    sup_semigroup,
    verify,
    workers,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
