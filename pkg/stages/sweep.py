# stages/sweep.py
"""
Parameter studies: run the pipeline once per combination of config
overrides, each variant in its own subdirectory, and collect the error
curves in one summary table.
"""
import copy
import itertools
import json
import logging
import os

from core.errors import ConfigurationError
from core.stage_interface import timed
from data.experiment_config import ExperimentConfig
from data.reports import write_sweep_summary
from stages.manager import run_pipeline

logger = logging.getLogger(__name__)

SWEEP_SUMMARY_CSV = "sweep.csv"


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_override(text):
    """'decay.theta=0.05,0.1' -> ('decay.theta', [0.05, 0.1])."""
    key, sep, values = text.partition("=")
    if not sep or not key or not values:
        raise ConfigurationError(f"sweep: expected key.path=value[,value...], got {text!r}")
    return key.strip(), [_parse_value(v.strip()) for v in values.split(",")]


def _set_path(data, key_path, value):
    *parents, key = key_path.split(".")
    node = data
    for parent in parents:
        child = node.setdefault(parent, {})
        if not isinstance(child, dict):
            raise ConfigurationError(f"{key_path}: '{parent}' is not a config section")
        node = child
    node[key] = value


def _variant_name(assignment):
    return "_".join(f"{key.split('.')[-1]}={value}" for key, value in assignment)


def expand_variants(base, overrides):
    """
    Cartesian product of the overrides applied to the base config document.

    Returns (name, ExperimentConfig) pairs; every variant writes into
    <base output_dir>/<name>.
    """
    if not overrides:
        raise ConfigurationError("sweep: give at least one override")
    keys = [key for key, _ in overrides]
    if len(set(keys)) != len(keys):
        raise ConfigurationError(f"sweep: repeated override keys {keys}")

    document = base.to_dict()
    variants = []
    for values in itertools.product(*(values for _, values in overrides)):
        assignment = list(zip(keys, values))
        data = copy.deepcopy(document)
        for key, value in assignment:
            _set_path(data, key, value)
        name = _variant_name(assignment)
        data["output_dir"] = os.path.join(base.output_dir, name)
        variants.append((name, ExperimentConfig.from_dict(data)))
    return variants


def run_sweep(base, overrides, workers=None):
    """Run every variant; returns {name: error-curve rows} and writes the summary CSV."""
    variants = expand_variants(base, overrides)
    logger.info(f"[sweep] {len(variants)} variants over {[key for key, _ in overrides]}")
    curves = {}
    with timed(f"Sweep of {len(variants)} variants"):
        for name, config in variants:
            logger.info(f"[sweep] Running variant {name}")
            report, _ = run_pipeline(config, workers=workers)
            curves[name] = report.rows()
    os.makedirs(base.output_dir, exist_ok=True)
    write_sweep_summary(os.path.join(base.output_dir, SWEEP_SUMMARY_CSV), curves)
    return curves
