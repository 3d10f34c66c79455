import json
import logging
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

__all__ = ["ConfigError", "PipelineConfig", "Layer", "layer", "ConfigMeta", "LayeredConfig", "PipelineSettings",
           "ENV_VARS"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    """
    Every tunable of the pipeline.

    :param det_iou: IoU threshold for plate NMS
    :param char_conf: confidence threshold for grid decoding
    :param char_iou: IoU threshold for character NMS
    :param min_plate_px: plates narrower or shorter than this are rejected as unrecognizable
    :param batch_sizes: batch sizes the benchmark sweeps, strictly increasing
    :param heuristics_enabled: apply format correction; if False strings are only checked
    :param jobs: worker threads per batch
    :param plate_format: name of the plate format used for correction and validation
    """
    det_iou: float = 0.5
    char_conf: float = 0.25
    char_iou: float = 0.5
    min_plate_px: int = 50
    batch_sizes: Tuple[int, ...] = (1, 2, 4, 8, 16, 32)
    heuristics_enabled: bool = True
    jobs: int = 1
    plate_format: str = "sg"

    def __post_init__(self):
        for name in ("det_iou", "char_conf", "char_iou"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ConfigError(f"{name} must be on (0, 1], got {value}")
        if self.min_plate_px < 1:
            raise ConfigError(f"min_plate_px must be at least 1, got {self.min_plate_px}")
        if not self.batch_sizes:
            raise ConfigError("batch_sizes cannot be empty")
        if any(size < 1 for size in self.batch_sizes):
            raise ConfigError(f"batch_sizes must all be at least 1, got {list(self.batch_sizes)}")
        if any(a >= b for a, b in zip(self.batch_sizes, self.batch_sizes[1:])):
            raise ConfigError(f"batch_sizes must be strictly increasing, got {list(self.batch_sizes)}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be at least 1, got {self.jobs}")

    def to_dict(self) -> Dict[str, Any]:
        values = asdict(self)
        values["batch_sizes"] = list(self.batch_sizes)
        return values


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}

ENV_VARS = {
    "ALPR_DET_IOU": "det_iou",
    "ALPR_CHAR_CONF": "char_conf",
    "ALPR_CHAR_IOU": "char_iou",
    "ALPR_MIN_PLATE_PX": "min_plate_px",
    "ALPR_BATCH_SIZES": "batch_sizes",
    "ALPR_NO_HEURISTICS": "heuristics_enabled",
    "ALPR_JOBS": "jobs",
    "ALPR_PLATE_FORMAT": "plate_format",
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def _flag(text: str, origin: str) -> bool:
    lowered = text.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ConfigError(f"{origin}: expected a boolean, got {text!r}")


def _coerce(name: str, value: Any, origin: str) -> Any:
    """
    Converts a value from a config file, the environment or a flag to the type of the PipelineConfig field it sets.
    """
    kind = _FIELD_TYPES[name]
    try:
        if name == "batch_sizes":
            if isinstance(value, str):
                value = [part for part in value.replace(" ", "").split(",") if part]
            if not isinstance(value, (list, tuple)) or any(isinstance(v, (bool, float)) for v in value):
                raise TypeError
            return tuple(int(v) for v in value)
        if kind is bool:
            return _flag(value, origin) if isinstance(value, str) else _strict(value, bool)
        if kind is int:
            return int(value) if isinstance(value, str) else _strict(value, int)
        if kind is float:
            if isinstance(value, str):
                return float(value)
            return float(_strict(value, (int, float)))
        return _strict(value, str)
    except (TypeError, ValueError):
        raise ConfigError(f"{origin}: invalid value {value!r} for {name}") from None


def _strict(value: Any, kinds) -> Any:
    kinds = kinds if isinstance(kinds, tuple) else (kinds,)
    if isinstance(value, bool) and bool not in kinds:
        raise TypeError
    if not isinstance(value, kinds):
        raise TypeError
    return value


class Layer:
    def __init__(self, values_getter, name: str):
        """
        A class used by a LayeredConfig's resolve() method. You shouldn't have to instantiate this.
        """
        self.values_getter = values_getter
        self.name = name


def layer(name: Optional[str] = None):
    """
    Converts a method into a Layer for a LayeredConfig. The method must take in no parameters and return a mapping of
    PipelineConfig field names to the values that layer sets.

    :param name: how the layer is reported in logs; defaults to the method name
    """

    def decorator(func):
        return Layer(func, name or func.__name__)

    return decorator


class ConfigMeta(type):
    """
    This metaclass collects the layer() methods of a LayeredConfig into __layers__, in declaration order, so that
    resolve() can apply each source of config values (defaults, file, environment, flags) over the ones before it. A
    subclass that redefines a layer method moves that layer after the inherited ones; redefining it as a plain method
    drops the layer. Don't instantiate this directly.
    """

    def __new__(mcs, *args, **kwargs):
        layers = {}

        new_cls = super().__new__(mcs, *args, **kwargs)
        for base in reversed(new_cls.__mro__):
            for elem, value in base.__dict__.items():
                if elem in layers:
                    del layers[elem]

                is_static_method = isinstance(value, staticmethod)
                if is_static_method:
                    value = value.__func__
                if isinstance(value, Layer):
                    if is_static_method:
                        raise TypeError(f"Layer method {elem} cannot be a staticmethod")
                    layers[elem] = value

        new_cls.__layers__ = list(layers.values())

        return new_cls


class LayeredConfig(metaclass=ConfigMeta):
    """
    A LayeredConfig uses methods decorated with the layer() decorator to build a PipelineConfig that can be retrieved
    with resolve(). Layer methods should fit the following format:
    ::
        import configs.config as config
        @config.layer()
        def example_layer(self) -> Dict[str, Any]:
            return {"det_iou": 0.4}

    The layering order is determined by the placement of the method in the class declaration: a later defined method
    overrides the fields set by earlier ones.
    """

    def resolve(self) -> PipelineConfig:
        if not hasattr(self, "config"):
            values: Dict[str, Any] = {}
            self.sources: Dict[str, str] = {}
            for l in self.__layers__:
                for name, value in l.values_getter(self).items():
                    if name not in _FIELD_TYPES:
                        raise ConfigError(f"{l.name}: unknown config field {name!r}")
                    values[name] = _coerce(name, value, l.name)
                    self.sources[name] = l.name
            self.config = PipelineConfig(**values)
            logging.debug(f"Resolved config {self.config.to_dict()} from {self.sources}")

        return self.config


class PipelineSettings(LayeredConfig):
    """
    Defaults, then a JSON config file, then ALPR_* environment variables, then command-line flags.

    :param config_path: a JSON object whose keys are PipelineConfig field names
    :param environ: the environment to read; os.environ if None
    :param flags: flag values by field name; None values are treated as unset
    """

    def __init__(self, config_path: Optional[Union[str, Path]] = None, environ: Optional[Mapping[str, str]] = None,
                 flags: Optional[Mapping[str, Any]] = None):
        self.config_path = config_path
        self.environ = os.environ if environ is None else environ
        self.flags = flags or {}

    @layer()
    def defaults(self) -> Dict[str, Any]:
        return {}

    @layer()
    def config_file(self) -> Dict[str, Any]:
        if self.config_path is None:
            return {}
        try:
            payload = json.loads(Path(self.config_path).read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"Cannot read config file {self.config_path} ({e.strerror or e})") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config file {self.config_path} is not valid JSON: {e}") from e
        if not isinstance(payload, dict):
            raise ConfigError(f"Config file {self.config_path} must hold a JSON object")
        return payload

    @layer()
    def environment(self) -> Dict[str, Any]:
        values = {}
        for var, name in ENV_VARS.items():
            if var not in self.environ:
                continue
            text = self.environ[var]
            if var == "ALPR_NO_HEURISTICS":
                values[name] = not _flag(text, var)
            else:
                values[name] = text
        return values

    @layer("flags")
    def command_line(self) -> Dict[str, Any]:
        return {name: value for name, value in self.flags.items() if value is not None}
