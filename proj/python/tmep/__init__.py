"""Two-time measurement entropy production statistics for finite quantum systems."""

from ._tmep import (
    AbsoluteContinuityError,
    ConfigError,
    EigensolverError,
    FaithfulnessError,
    Model,
    NumericalIntegrityError,
    ResourceError,
    ShapeError,
    TmepError,
    cf_eval,
    char_function,
    distance_tv,
    distance_w1,
    ep_measure,
    ep_measure_spectral,
    explicit_model,
    fixture_a,
    fixture_d,
    open_system,
    random_model,
    relative_entropy,
    run_cli,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
