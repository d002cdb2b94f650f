# data/experiment_config.py
"""
Experiment configuration: JSON schema validation, stage fingerprints and
the problem factory.
"""
import copy
import hashlib
import json
import logging
from dataclasses import dataclass

from config import OUTPUT_DIR
from core.errors import ArgumentError, ConfigurationError
from core.fem import QUADRATURE_ORDERS
from core.helmholtz import HELMHOLTZ_DATA, HelmholtzProblem, helmholtz_data
from core.maxwell import MAXWELL_SOURCES, MaxwellProblem
from core.pod import GRAM, SVD
from core.sampling import halton, latin_hypercube
from core.surrogate import TrainConfig
from core.transform import DecaySpec, check_admissibility

logger = logging.getLogger(__name__)

HELMHOLTZ = "helmholtz"
MAXWELL = "maxwell"
PROBLEMS = (HELMHOLTZ, MAXWELL)

# Config sections each persisted artifact depends on
STAGE_SECTIONS = {
    "snapshots": ("problem", "physics", "decay", "mesh", "sampling"),
    "basis": ("problem", "physics", "decay", "mesh", "sampling", "pod"),
    "surrogate": ("problem", "physics", "decay", "mesh", "sampling", "pod", "nn"),
}

_REQUIRED = object()


@dataclass(frozen=True)
class Field:
    types: tuple
    default: object = _REQUIRED
    check: object = None
    nullable: bool = False


def _positive(value):
    return value > 0


def _non_negative(value):
    return value >= 0


def _complex_pair(value):
    return isinstance(value, (int, float)) or (
        isinstance(value, list) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value)
    )


NUMBER = (int, float)
INTEGER = (int,)

SCHEMA = {
    "mesh": {
        "n": Field(INTEGER, check=_positive),
        "quadrature_order": Field(INTEGER, default=2, check=lambda v: v in QUADRATURE_ORDERS),
    },
    "sampling.train": {
        "count": Field(INTEGER, check=_positive),
        "skip": Field(INTEGER, default=0, check=_non_negative),
    },
    "sampling.test": {
        "count": Field(INTEGER, check=_positive),
        "seed": Field(INTEGER, default=1, check=_non_negative),
    },
    "pod": {
        "centered": Field((bool,), default=True),
        "L": Field(INTEGER, default=None, check=_non_negative, nullable=True),
        "tolerance": Field(NUMBER, default=None, check=_positive, nullable=True),
        "method": Field((str,), default=SVD, check=lambda v: v in (SVD, GRAM)),
    },
    "nn": {
        "D": Field(INTEGER, default=2, check=_positive),
        "H": Field(INTEGER, default=30, check=_positive),
        "L_list": Field((list,), check=lambda v: len(v) > 0 and all(isinstance(L, int) and L >= 0 for L in v)),
        "separate": Field((bool,), default=False),
        "standardize": Field((bool,), default=False),
    },
    "nn.train": {
        "learning_rate": Field(NUMBER, default=5e-4, check=_positive),
        "beta1": Field(NUMBER, default=0.8),
        "beta2": Field(NUMBER, default=0.9),
        "epsilon": Field(NUMBER, default=1e-8, check=_positive),
        "epochs": Field(INTEGER, default=4000, check=_positive),
        "batch_size": Field(INTEGER, default=None, check=_positive, nullable=True),
        "seed": Field(INTEGER, default=0, check=_non_negative),
        "lr_decay": Field(NUMBER, default=1.0),
    },
    "bench": {
        "queries": Field(INTEGER, default=100, check=_positive),
        "L": Field(INTEGER, default=None, check=_non_negative, nullable=True),
        "seed": Field(INTEGER, default=7, check=_non_negative),
    },
    "physics.helmholtz": {
        "kappa": Field(NUMBER, check=_positive),
        "data": Field((str,), default="unit", check=lambda v: v in HELMHOLTZ_DATA),
    },
    "physics.maxwell": {
        "omega": Field(NUMBER, check=_positive),
        "mu": Field((int, float, list), default=1.0, check=lambda v: _complex_pair(v) and _as_complex(v) != 0),
        "Lambda": Field((int, float, list), check=_complex_pair),
        "source": Field((str,), default="gaussian", check=lambda v: v in MAXWELL_SOURCES),
    },
}

TOP_LEVEL = ("problem", "physics", "decay", "mesh", "sampling", "pod", "nn", "bench", "output_dir")


def _validate_section(data, path, fields):
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: expected an object, got {type(data).__name__}")
    unknown = sorted(set(data) - set(fields))
    if unknown:
        raise ConfigurationError(f"{path}: unknown key(s) {unknown}")

    result = {}
    for key, spec in fields.items():
        key_path = f"{path}.{key}"
        if key not in data:
            if spec.default is _REQUIRED:
                raise ConfigurationError(f"{key_path}: missing required key")
            result[key] = copy.deepcopy(spec.default)
            continue
        value = data[key]
        if value is None:
            if not spec.nullable:
                raise ConfigurationError(f"{key_path}: must not be null")
            result[key] = None
            continue
        # bool is an int subclass; only accept it where asked for
        if isinstance(value, bool) and bool not in spec.types:
            raise ConfigurationError(f"{key_path}: expected {_type_names(spec.types)}, got bool")
        if not isinstance(value, spec.types):
            raise ConfigurationError(f"{key_path}: expected {_type_names(spec.types)}, got {type(value).__name__}")
        if spec.check is not None and not spec.check(value):
            raise ConfigurationError(f"{key_path}: value {value!r} is out of range")
        result[key] = float(value) if spec.types is NUMBER else value
    return result


def _type_names(types):
    return " or ".join(t.__name__ for t in types)


def _as_complex(value):
    return complex(*value) if isinstance(value, list) else complex(value)


@dataclass
class ExperimentConfig:
    problem: str
    physics: dict
    decay: dict
    mesh: dict
    sampling: dict
    pod: dict
    nn: dict
    bench: dict
    output_dir: str

    @classmethod
    def from_dict(cls, data):
        """Validate a whole configuration document; errors name the offending key path."""
        if not isinstance(data, dict):
            raise ConfigurationError("config: expected a JSON object at top level")
        unknown = sorted(set(data) - set(TOP_LEVEL))
        if unknown:
            raise ConfigurationError(f"config: unknown key(s) {unknown}")
        for key in ("problem", "physics", "decay", "mesh", "sampling", "nn"):
            if key not in data:
                raise ConfigurationError(f"{key}: missing required key")

        problem = data["problem"]
        if problem not in PROBLEMS:
            raise ConfigurationError(f"problem: expected one of {PROBLEMS}, got {problem!r}")

        if not isinstance(data["decay"], dict):
            raise ConfigurationError("decay: expected an object")
        sampling = data["sampling"]
        if not isinstance(sampling, dict) or set(sampling) != {"train", "test"}:
            raise ConfigurationError("sampling: expected exactly the keys ['test', 'train']")

        nn_data = dict(data["nn"]) if isinstance(data["nn"], dict) else data["nn"]
        train_data = nn_data.pop("train", {}) if isinstance(nn_data, dict) else {}
        nn = _validate_section(nn_data, "nn", SCHEMA["nn"])
        nn["train"] = _validate_section(train_data, "nn.train", SCHEMA["nn.train"])
        nn["L_list"] = sorted(set(nn["L_list"]))

        config = cls(
            problem=problem,
            physics=_validate_section(data["physics"], "physics", SCHEMA[f"physics.{problem}"]),
            decay=dict(data["decay"]),
            mesh=_validate_section(data["mesh"], "mesh", SCHEMA["mesh"]),
            sampling={
                "train": _validate_section(sampling["train"], "sampling.train", SCHEMA["sampling.train"]),
                "test": _validate_section(sampling["test"], "sampling.test", SCHEMA["sampling.test"]),
            },
            pod=_validate_section(data.get("pod", {}), "pod", SCHEMA["pod"]),
            nn=nn,
            bench=_validate_section(data.get("bench", {}), "bench", SCHEMA["bench"]),
            output_dir=data.get("output_dir", OUTPUT_DIR),
        )
        config._check_consistency()
        return config

    def _check_consistency(self):
        try:
            spec = self.decay_spec()
        except (ArgumentError, TypeError) as e:
            raise ConfigurationError(f"decay: {e}") from e
        self.decay = spec.to_dict()
        try:
            self.train_config()
        except ArgumentError as e:
            raise ConfigurationError(f"nn.train: {e}") from e
        if not isinstance(self.output_dir, str) or not self.output_dir:
            raise ConfigurationError("output_dir: expected a non-empty string")

        if self.pod["L"] is not None and self.pod["tolerance"] is not None:
            raise ConfigurationError("pod: give either L or tolerance, not both")
        if self.pod["L"] is not None and max(self.nn["L_list"]) > self.pod["L"]:
            raise ConfigurationError(
                f"nn.L_list: largest entry {max(self.nn['L_list'])} exceeds pod.L={self.pod['L']}"
            )
        bench_L = self.bench["L"]
        if bench_L is not None and bench_L not in self.nn["L_list"]:
            raise ConfigurationError(f"bench.L: {bench_L} is not one of nn.L_list {self.nn['L_list']}")
        if self.pod["centered"] and self.sampling["train"]["count"] < 2:
            logger.warning("Centered POD of a single training snapshot yields an empty basis")
        check_admissibility(spec)

    @classmethod
    def load(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except OSError as e:
            raise ConfigurationError(f"Cannot read config {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Config {path} is not valid JSON: {e}") from e
        logger.info(f"Loaded experiment config from {path}")
        return cls.from_dict(data)

    def to_dict(self):
        return {
            "problem": self.problem,
            "physics": copy.deepcopy(self.physics),
            "decay": copy.deepcopy(self.decay),
            "mesh": copy.deepcopy(self.mesh),
            "sampling": copy.deepcopy(self.sampling),
            "pod": copy.deepcopy(self.pod),
            "nn": copy.deepcopy(self.nn),
            "bench": copy.deepcopy(self.bench),
            "output_dir": self.output_dir,
        }

    def save(self, path):
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_dict(), handle, indent=2, sort_keys=True)

    def fingerprint(self, stage):
        """SHA-256 over the canonical JSON of the sections the stage depends on."""
        if stage not in STAGE_SECTIONS:
            raise ArgumentError(f"Unknown stage '{stage}' for fingerprinting")
        document = self.to_dict()
        relevant = {section: document[section] for section in STAGE_SECTIONS[stage]}
        canonical = json.dumps(relevant, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def decay_spec(self):
        return DecaySpec.from_dict(self.decay)

    def train_config(self):
        return TrainConfig(**self.nn["train"])

    @property
    def J(self):
        return self.decay["J"]

    @property
    def L_list(self):
        return list(self.nn["L_list"])

    def train_set(self):
        train = self.sampling["train"]
        return halton(train["count"], self.J, train["skip"])

    def test_set(self):
        test = self.sampling["test"]
        return latin_hypercube(test["count"], self.J, test["seed"])

    def build_problem(self):
        spec = self.decay_spec()
        n = self.mesh["n"]
        order = self.mesh["quadrature_order"]
        if self.problem == HELMHOLTZ:
            kappa = self.physics["kappa"]
            f, g = helmholtz_data(self.physics["data"], kappa)
            return HelmholtzProblem(kappa, spec, n, f=f, g=g, volume_order=order, boundary_order=order)
        return MaxwellProblem(
            self.physics["omega"],
            _as_complex(self.physics["mu"]),
            _as_complex(self.physics["Lambda"]),
            spec,
            n,
            Jsrc=MAXWELL_SOURCES[self.physics["source"]],
            order=order,
        )
