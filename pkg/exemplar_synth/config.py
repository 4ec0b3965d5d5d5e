"""Experiment configuration: schema, flat text format, overrides and validation.

A config document is UTF-8 text with one `dotted.key = value` pair per line.
Tuples are comma separated, booleans are `true`/`false` and an empty value
means `None`. Blank lines and lines starting with `#` are ignored.
"""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import typing
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type, TypeVar, Union

from .exceptions import ConfigurationError, InvalidConfigError
from .types import SPATIAL_MULTIPLE, LabelKind
from .utils.pyutils import dicttree_flatten, dicttree_merge, dicttree_unflatten

if typing.TYPE_CHECKING:
    from .utils.typing import PathLike

__all__ = [
    "DiscriminatorConfig",
    "EvalConfig",
    "GeneratorConfig",
    "LossWeights",
    "PerceptualConfig",
    "PhaseIterations",
    "SamplerConfig",
    "ToyCorpusSpec",
    "TrainConfig",
    "Violation",
    "apply_overrides",
    "config_from_text",
    "config_hash",
    "config_to_text",
    "default_config",
    "load_config",
    "save_config",
    "toy_config",
    "validate_config",
]

_D = TypeVar("_D")

TOY_SHAPES = ("circle", "square", "triangle")
NORMALIZATIONS = ("instance", "none")

#: Sections left out of the config hash. They only steer evaluation.
UNHASHED_SECTIONS = ("eval",)


@dataclasses.dataclass(frozen=True)
class LossWeights:
    """Relative importance of the generator objective terms.

    Attributes
    ----------
        lambda1:
            Weight of the adversarial style-consistency term
        lambda2:
            Weight of the adaptive semantic consistency term
        lambda_fm:
            Weight of the optional discriminator feature-matching term
        scadv_enabled:
            Master switch for the adversarial style-consistency term. The
            schedule can only turn it off further, never on.
        adaptive:
            Use w_i = 1/M_i on style-inconsistent samples. When false every
            sample uses w_i = 1.

    """

    lambda1: float = 10.0
    lambda2: float = 10.0
    lambda_fm: float = 0.0
    scadv_enabled: bool = True
    adaptive: bool = True


@dataclasses.dataclass(frozen=True)
class PhaseIterations:
    n_warmup: int = 250_000
    n_scadv: int = 250_000
    n_decay: int = 500_000

    @property
    def total(self) -> int:
        return self.n_warmup + self.n_scadv + self.n_decay


@dataclasses.dataclass(frozen=True)
class GeneratorConfig:
    base_width: int = 64
    n_blocks: int = 9


@dataclasses.dataclass(frozen=True)
class DiscriminatorConfig:
    base_width: int = 64
    normalization: str = "instance"


@dataclasses.dataclass(frozen=True)
class PerceptualConfig:
    """Perceptual extractor used by the semantic loss, FID and the patch probe.

    Attributes
    ----------
        layers:
            Ordered VGG-16 tap names
        weights_path:
            Pretrained weights in the checkpoint binary layout. When `None` a
            seeded random frozen backbone is used.
        seed:
            Seed of the random backbone

    """

    layers: Tuple[str, ...] = ("relu1_2", "relu2_2", "relu3_3", "relu4_3", "relu5_3")
    weights_path: Optional[str] = None
    seed: int = 0


@dataclasses.dataclass(frozen=True)
class SamplerConfig:
    """Pair sampling parameters.

    Attributes
    ----------
        T:
            Temporal window: maximum frame gap of a same-video consistent pair
        guidance_per_label:
            Exemplars drawn per training label map
        n_consistent:
            Consistent pairs written by `sample-pairs`
        n_inconsistent:
            Inconsistent pairs written by `sample-pairs`
        seed:
            Sampler seed

    """

    T: int = 10
    guidance_per_label: int = 30
    n_consistent: int = 10_000
    n_inconsistent: int = 10_000
    seed: int = 0


@dataclasses.dataclass(frozen=True)
class ToyCorpusSpec:
    """Parameters of the synthetic shapes-with-palettes corpus.

    The corpus bytes are a pure function of these fields.
    """

    n_styles: int = 4
    n_images_per_style: int = 200
    image_size: Tuple[int, int] = (64, 64)
    shapes: Tuple[str, ...] = TOY_SHAPES
    seed: int = 0
    noise_std: float = 0.02
    n_holdout_per_style: int = 0


@dataclasses.dataclass(frozen=True)
class EvalConfig:
    n_triples: int = 100
    fid_layer: int = -1
    patch_size: int = 32


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    """Complete, replayable description of an experiment."""

    image_size: Tuple[int, int] = (256, 256)
    label_channels: int = 1
    label_kind: LabelKind = LabelKind.SKETCH
    phases: PhaseIterations = dataclasses.field(default_factory=PhaseIterations)
    base_lr: float = 2e-4
    betas: Tuple[float, float] = (0.5, 0.999)
    batch_size: int = 1
    seed: int = 0
    loss_weights: LossWeights = dataclasses.field(default_factory=LossWeights)
    generator: GeneratorConfig = dataclasses.field(default_factory=GeneratorConfig)
    discriminator: DiscriminatorConfig = dataclasses.field(
        default_factory=DiscriminatorConfig,
    )
    perceptual: PerceptualConfig = dataclasses.field(default_factory=PerceptualConfig)
    sampler: SamplerConfig = dataclasses.field(default_factory=SamplerConfig)
    toy: ToyCorpusSpec = dataclasses.field(default_factory=ToyCorpusSpec)
    eval: EvalConfig = dataclasses.field(default_factory=EvalConfig)
    checkpoint_every: int = 10_000
    sample_every: int = 5_000
    probe_count: int = 4


def default_config() -> TrainConfig:
    """Full-scale configuration: 256×256, 250K/250K/500K iterations."""
    return TrainConfig()


def toy_config() -> TrainConfig:
    """Desk-scale configuration for the synthetic shapes corpus."""
    return TrainConfig(
        image_size=(64, 64),
        label_channels=1,
        label_kind=LabelKind.TOY_MASK,
        phases=PhaseIterations(n_warmup=2_000, n_scadv=2_000, n_decay=4_000),
        generator=GeneratorConfig(base_width=16, n_blocks=6),
        discriminator=DiscriminatorConfig(base_width=32),
        sampler=SamplerConfig(guidance_per_label=5, n_consistent=4_000, n_inconsistent=4_000),
        toy=ToyCorpusSpec(n_holdout_per_style=25),
        # 100 triples cannot fit a 512-d Gaussian; relu1_2 has 64 channels
        eval=EvalConfig(fid_layer=0),
        checkpoint_every=1_000,
        sample_every=500,
    )


# Text format


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, (tuple, list)):
        return ",".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _as_tree(config: Any) -> Dict[str, Any]:
    tree = {}
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        tree[f.name] = _as_tree(value) if dataclasses.is_dataclass(value) else value
    return tree


def config_to_text(config: TrainConfig) -> str:
    flat = dicttree_flatten(_as_tree(config))
    return "".join(f"{key} = {_format_value(value)}\n" for key, value in flat.items())


def _coerce(hint: Any, raw: str, key: str) -> Any:
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)

    if origin is Union:
        inner = [a for a in args if a is not type(None)]
        if raw.strip() == "":
            return None
        return _coerce(inner[0], raw, key)

    if origin in {tuple, Tuple}:
        parts = [p.strip() for p in raw.split(",")] if raw.strip() else []
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_coerce(args[0], p, key) for p in parts)
        if len(parts) != len(args):
            raise ConfigurationError(f"{key}: expected {len(args)} comma separated values")
        return tuple(_coerce(a, p, key) for a, p in zip(args, parts))

    value = raw.strip()
    try:
        if hint is bool:
            if value.lower() not in {"true", "false"}:
                raise ValueError(value)
            return value.lower() == "true"
        if isinstance(hint, type) and issubclass(hint, enum.Enum):
            return hint(value)
        if hint in {int, float, str}:
            return hint(value)
    except ValueError as e:
        raise ConfigurationError(f"{key}: cannot read {value!r} as {hint}") from e

    raise ConfigurationError(f"{key}: unsupported field type {hint}")  # pragma: no cover


def _build(cls: Type[_D], tree: Dict[str, Any], prefix: str = "") -> _D:
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}  # type: ignore

    unknown = sorted(set(tree) - names)
    if unknown:
        keys = ", ".join(f"{prefix}{k}" for k in unknown)
        raise ConfigurationError(
            f"Unknown config key(s): {keys}",
            suggestion="See docs/guide/config.md for the list of keys",
        )

    kwargs = {}
    for name, value in tree.items():
        hint = hints[name]
        key = f"{prefix}{name}"
        if dataclasses.is_dataclass(hint):
            if not isinstance(value, dict):
                raise ConfigurationError(f"{key} is a section, not a value")
            kwargs[name] = _build(hint, value, f"{key}.")  # type: ignore
        elif isinstance(value, dict):
            raise ConfigurationError(f"{key} is a value, not a section")
        elif isinstance(value, str):
            kwargs[name] = _coerce(hint, value, key)
        else:
            kwargs[name] = value

    return cls(**kwargs)


def _parse_lines(lines: Sequence[str], source: str) -> List[Tuple[str, str]]:
    items = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue

        key, sep, value = stripped.partition("=")
        if not sep or not key.strip():
            raise ConfigurationError(f"{source}:{lineno}: expected `key = value`, got {stripped!r}")
        items.append((key.strip(), value.strip()))

    return items


def _from_items(base: TrainConfig, items: Sequence[Tuple[str, str]]) -> TrainConfig:
    try:
        overrides = dicttree_unflatten(items)
    except KeyError as e:
        raise ConfigurationError(f"Invalid config key: {e.args[0]}") from e

    return _build(TrainConfig, dicttree_merge(_as_tree(base), overrides))


def config_from_text(text: str, *, source: str = "<config>") -> TrainConfig:
    """Parse a config document. Keys it does not mention keep their defaults."""
    return _from_items(default_config(), _parse_lines(text.splitlines(), source))


def apply_overrides(config: TrainConfig, overrides: Sequence[str]) -> TrainConfig:
    """Apply `dotted.key=value` overrides, e.g. from `--set` flags."""
    return _from_items(config, _parse_lines(overrides, "--set"))


def load_config(path: PathLike) -> TrainConfig:
    path = Path(path)
    return config_from_text(path.read_text(encoding="utf-8"), source=str(path))


def save_config(config: TrainConfig, path: PathLike):
    Path(path).write_text(config_to_text(config), encoding="utf-8")


def config_hash(config: TrainConfig) -> str:
    lines = [
        line
        for line in config_to_text(config).splitlines(keepends=True)
        if not line.startswith(tuple(f"{s}." for s in UNHASHED_SECTIONS))
    ]
    return hashlib.sha256("".join(lines).encode("utf-8")).hexdigest()[:16]


# Validation


@dataclasses.dataclass(frozen=True)
class Violation:
    field: str
    rule: str


def _check_size(violations: List[Violation], field: str, size: Tuple[int, int]):
    for name, dim in zip(("height", "width"), size):
        if dim <= 0:
            violations.append(Violation(field, f"{name} {dim} must be positive"))
        elif dim % SPATIAL_MULTIPLE:
            violations.append(
                Violation(field, f"{name} {dim} not divisible by {SPATIAL_MULTIPLE}"),
            )


def validate_config(config: TrainConfig) -> List[Violation]:
    """List every broken invariant of `config`; empty when it is valid."""
    from .losses.perceptual import VGG16_TAPS

    v: List[Violation] = []

    def require(ok: bool, field: str, rule: str):
        if not ok:
            v.append(Violation(field, rule))

    _check_size(v, "image_size", config.image_size)
    require(config.label_channels >= 1, "label_channels", "must be at least 1")
    require(
        config.label_kind is not LabelKind.TOY_MASK or config.label_channels == 1,
        "label_channels",
        "toy-mask labels have exactly 1 channel",
    )
    require(config.base_lr > 0, "base_lr", "base_lr must be positive")
    for i, beta in enumerate(config.betas):
        require(0 <= beta < 1, "betas", f"beta{i + 1} must lie in [0, 1)")
    require(config.batch_size >= 1, "batch_size", "must be at least 1")
    for field, seed in (
        ("seed", config.seed),
        ("sampler.seed", config.sampler.seed),
        ("toy.seed", config.toy.seed),
        ("perceptual.seed", config.perceptual.seed),
    ):
        require(seed >= 0, field, "must be nonnegative")

    phases = config.phases
    require(phases.n_warmup >= 0, "phases.n_warmup", "must be nonnegative")
    require(phases.n_scadv >= 0, "phases.n_scadv", "must be nonnegative")
    require(phases.n_decay > 0, "phases.n_decay", "must be positive")

    for f in dataclasses.fields(LossWeights):
        value = getattr(config.loss_weights, f.name)
        if not isinstance(value, bool):
            require(value >= 0, f"loss_weights.{f.name}", "must be nonnegative")

    require(config.generator.base_width >= 1, "generator.base_width", "must be at least 1")
    require(config.generator.n_blocks >= 0, "generator.n_blocks", "must be nonnegative")
    require(
        config.discriminator.base_width >= 1,
        "discriminator.base_width",
        "must be at least 1",
    )
    require(
        config.discriminator.normalization in NORMALIZATIONS,
        "discriminator.normalization",
        f"must be one of {', '.join(NORMALIZATIONS)}",
    )

    layers = config.perceptual.layers
    require(bool(layers), "perceptual.layers", "needs at least one tap")
    for layer in layers:
        require(layer in VGG16_TAPS, "perceptual.layers", f"unknown tap {layer!r}")
    require(
        -len(layers) <= config.eval.fid_layer < len(layers),
        "eval.fid_layer",
        "must index perceptual.layers",
    )

    sampler = config.sampler
    require(sampler.T >= 1, "sampler.T", "must be at least 1")
    require(sampler.guidance_per_label >= 1, "sampler.guidance_per_label", "must be at least 1")
    require(sampler.n_consistent >= 0, "sampler.n_consistent", "must be nonnegative")
    require(sampler.n_inconsistent >= 0, "sampler.n_inconsistent", "must be nonnegative")

    toy = config.toy
    require(toy.n_styles >= 2, "toy.n_styles", "must be at least 2")
    require(toy.n_images_per_style >= 1, "toy.n_images_per_style", "must be at least 1")
    _check_size(v, "toy.image_size", toy.image_size)
    require(bool(toy.shapes), "toy.shapes", "needs at least one shape")
    for shape in toy.shapes:
        require(shape in TOY_SHAPES, "toy.shapes", f"unknown shape {shape!r}")
    require(toy.noise_std >= 0, "toy.noise_std", "must be nonnegative")
    require(toy.n_holdout_per_style >= 0, "toy.n_holdout_per_style", "must be nonnegative")

    require(config.eval.n_triples >= 1, "eval.n_triples", "must be at least 1")
    require(
        1 <= config.eval.patch_size <= min(config.image_size),
        "eval.patch_size",
        "must fit inside the image",
    )
    require(config.checkpoint_every >= 1, "checkpoint_every", "must be at least 1")
    require(config.sample_every >= 1, "sample_every", "must be at least 1")
    require(config.probe_count >= 0, "probe_count", "must be nonnegative")

    return v


def ensure_valid(config: TrainConfig) -> TrainConfig:
    violations = validate_config(config)
    if violations:
        raise InvalidConfigError(violations)
    return config
