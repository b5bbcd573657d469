from kg_currents.experiments.fixtures import load_fixture, random_mode_field, random_state
from kg_currents.experiments.suite import EXPERIMENT_REGISTRY, run_experiment

__all__ = ["EXPERIMENT_REGISTRY", "load_fixture", "random_mode_field", "random_state", "run_experiment"]
