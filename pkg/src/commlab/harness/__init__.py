from .config import ExperimentConfig, load_config  # noqa: F401
from .runner import Report, run_experiment, verify_experiment  # noqa: F401
from .export import export_csv, export_dot  # noqa: F401
