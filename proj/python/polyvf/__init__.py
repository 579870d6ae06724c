from ._polyvf import (
    Bracketing,
    Classification,
    MetricGraph,
    Polynomial,
    PolyvfError,
    RealizationResult,
    UncertainClassificationError,
    __version__,
    break_homoclinic,
    can_form_homoclinic,
    check_landing_stability,
    class_dimensions,
    classify,
    enumerate_classes,
    parse_polynomial,
    protective_sector,
    realize,
    render_portrait,
    run_cli,
    sweep,
)
