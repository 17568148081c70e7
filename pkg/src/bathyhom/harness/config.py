"""INI experiment configuration.

Sections and keys (all optional except where noted)::

    [experiment]    name, solvers (required), x_min, x_max, t_end,
                    snapshot_times, output_dir
    [bathymetry]    kind (required), levels, b0, amplitude, phase, samples,
                    period, y0, eta0, resolution
    [initial]       kind (gaussian | traveling_wave), amplitude, width,
                    center, speed
    [physics]       g, delta
    [homogenized]   nx, cfl, dealias, x_min, x_max
    [spectral2d]    nx, ny, cfl, dealias
    [fv2d]          nx, ny, cfl, limiter, bc_x, switch_time (number or auto)

Lists are comma or whitespace separated.  Piecewise-constant levels are
written ``y_start:b`` in increasing ``y_start``.
"""
import configparser
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from bathyhom.bathymetry import G, BathymetryProfile
from bathyhom.errors import ConfigError

SOLVERS = ("homogenized", "spectral2d", "fv2d")

_KEYS = {
    "experiment": {"name", "solvers", "x_min", "x_max", "t_end", "snapshot_times",
                   "output_dir"},
    "bathymetry": {"kind", "levels", "b0", "amplitude", "phase", "samples", "period",
                   "y0", "eta0", "resolution"},
    "initial": {"kind", "amplitude", "width", "center", "speed"},
    "physics": {"g", "delta"},
    "homogenized": {"nx", "cfl", "dealias", "x_min", "x_max"},
    "spectral2d": {"nx", "ny", "cfl", "dealias"},
    "fv2d": {"nx", "ny", "cfl", "limiter", "bc_x", "switch_time"},
}


def _floats(text):
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"expected a list of numbers, got {text!r}") from exc


@dataclass
class BathymetrySpec:
    kind: str
    levels: list = None
    b0: float = -1.0
    amplitude: float = 0.0
    phase: float = 0.0
    samples: list = None
    period: float = 1.0
    y0: float = -0.5
    eta0: float = 0.0
    resolution: int = 4096

    def build(self):
        try:
            if self.kind == "piecewise_constant":
                if not self.levels:
                    raise ConfigError("piecewise_constant bathymetry needs levels")
                return BathymetryProfile.piecewise_constant(self.levels, self.period, self.eta0)
            if self.kind == "sinusoidal":
                return BathymetryProfile.sinusoidal(self.b0, self.amplitude, self.phase,
                                                    self.period, self.eta0, self.y0,
                                                    self.resolution)
            if self.kind == "tabulated":
                if not self.samples:
                    raise ConfigError("tabulated bathymetry needs samples")
                return BathymetryProfile.tabulated(self.samples, self.y0, self.period,
                                                   self.eta0)
            if self.kind == "flat":
                return BathymetryProfile.flat(self.b0, self.period, self.eta0, self.y0)
        except ValueError as exc:
            raise ConfigError(f"invalid bathymetry: {exc}") from exc
        raise ConfigError(f"unknown bathymetry kind {self.kind!r}")


@dataclass
class InitialSpec:
    kind: str = "gaussian"
    amplitude: float = 0.05
    width: float = 5.0
    center: float = 0.0
    speed: float = None


@dataclass
class HomogenizedSpec:
    nx: int = 4096
    cfl: float = 0.5
    dealias: bool = True
    x_min: float = None
    x_max: float = None


@dataclass
class Spectral2DSpec:
    nx: int = 2048
    ny: int = 16
    cfl: float = 0.5
    dealias: bool = True


@dataclass
class FV2DSpec:
    nx: int = 2000
    ny: int = 64
    cfl: float = 0.45
    limiter: str = "minmod"
    bc_x: str = "reflecting_then_periodic"
    switch_time: float = None


@dataclass
class ExperimentConfig:
    name: str
    solvers: tuple
    bathymetry: BathymetrySpec
    x_min: float = -200.0
    x_max: float = 200.0
    t_end: float = 30.0
    snapshot_times: tuple = ()
    output_dir: str = None
    initial: InitialSpec = field(default_factory=InitialSpec)
    g: float = G
    delta: float = 1.0
    homogenized: HomogenizedSpec = field(default_factory=HomogenizedSpec)
    spectral2d: Spectral2DSpec = field(default_factory=Spectral2DSpec)
    fv2d: FV2DSpec = field(default_factory=FV2DSpec)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not self.solvers:
            raise ConfigError("no solver selected")
        for s in self.solvers:
            if s not in SOLVERS:
                raise ConfigError(f"unknown solver {s!r}; choose from {', '.join(SOLVERS)}")
        if not self.x_max > self.x_min:
            raise ConfigError("x_max must exceed x_min")
        if self.t_end < 0:
            raise ConfigError("t_end must be non-negative")
        if any(t < 0 or t > self.t_end for t in self.snapshot_times):
            raise ConfigError("snapshot times must lie in [0, t_end]")
        if self.initial.kind not in ("gaussian", "traveling_wave"):
            raise ConfigError(f"unknown initial condition {self.initial.kind!r}")
        if self.initial.kind == "traveling_wave" and self.initial.speed is None:
            raise ConfigError("traveling_wave initial data needs a speed")
        if "spectral2d" in self.solvers and not self.profile().is_smooth:
            raise ConfigError(
                "spectral2d needs smooth bathymetry; use fv2d for piecewise-constant profiles")

    def profile(self):
        return self.bathymetry.build()

    @property
    def times(self):
        """Snapshot times including ``0`` and ``t_end``."""
        return tuple(sorted({0.0, float(self.t_end), *map(float, self.snapshot_times)}))

    def homogenized_domain(self):
        h = self.homogenized
        return (self.x_min if h.x_min is None else h.x_min,
                self.x_max if h.x_max is None else h.x_max)


def _get(section, key, conv, default):
    if key not in section:
        return default
    raw = section[key].strip()
    try:
        return conv(raw)
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"[{section.name}] {key}: cannot parse {raw!r}") from exc


def _bool(text):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _levels(text):
    out = []
    for item in text.replace(",", " ").split():
        y, _, b = item.partition(":")
        out.append((float(y), float(b)))
    return out


def _optional_float(text):
    return None if text.lower() in ("", "auto", "none") else float(text)


def parse_config(text, source="<string>"):
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    for name in cp.sections():
        if name not in _KEYS:
            raise ConfigError(f"{source}: unknown section [{name}]")
        extra = set(cp[name]) - _KEYS[name]
        if extra:
            raise ConfigError(f"{source}: unknown keys in [{name}]: {', '.join(sorted(extra))}")
    for required in ("experiment", "bathymetry"):
        if required not in cp:
            raise ConfigError(f"{source}: missing section [{required}]")
    ex, ba = cp["experiment"], cp["bathymetry"]
    if "solvers" not in ex or "kind" not in ba:
        raise ConfigError(f"{source}: [experiment] solvers and [bathymetry] kind are required")

    bathy = BathymetrySpec(
        kind=ba["kind"].strip(),
        levels=_get(ba, "levels", _levels, None),
        b0=_get(ba, "b0", float, -1.0),
        amplitude=_get(ba, "amplitude", float, 0.0),
        phase=_get(ba, "phase", float, 0.0),
        samples=_get(ba, "samples", _floats, None),
        period=_get(ba, "period", float, 1.0),
        y0=_get(ba, "y0", float, -0.5),
        eta0=_get(ba, "eta0", float, 0.0),
        resolution=_get(ba, "resolution", int, 4096))

    kw = {}
    if "initial" in cp:
        s = cp["initial"]
        kw["initial"] = InitialSpec(
            kind=_get(s, "kind", str, "gaussian"),
            amplitude=_get(s, "amplitude", float, 0.05),
            width=_get(s, "width", float, 5.0),
            center=_get(s, "center", float, 0.0),
            speed=_get(s, "speed", _optional_float, None))
    if "physics" in cp:
        kw["g"] = _get(cp["physics"], "g", float, G)
        kw["delta"] = _get(cp["physics"], "delta", float, 1.0)
    if "homogenized" in cp:
        s = cp["homogenized"]
        kw["homogenized"] = HomogenizedSpec(
            nx=_get(s, "nx", int, 4096), cfl=_get(s, "cfl", float, 0.5),
            dealias=_get(s, "dealias", _bool, True),
            x_min=_get(s, "x_min", float, None), x_max=_get(s, "x_max", float, None))
    if "spectral2d" in cp:
        s = cp["spectral2d"]
        kw["spectral2d"] = Spectral2DSpec(
            nx=_get(s, "nx", int, 2048), ny=_get(s, "ny", int, 16),
            cfl=_get(s, "cfl", float, 0.5), dealias=_get(s, "dealias", _bool, True))
    if "fv2d" in cp:
        s = cp["fv2d"]
        kw["fv2d"] = FV2DSpec(
            nx=_get(s, "nx", int, 2000), ny=_get(s, "ny", int, 64),
            cfl=_get(s, "cfl", float, 0.45), limiter=_get(s, "limiter", str, "minmod"),
            bc_x=_get(s, "bc_x", str, "reflecting_then_periodic"),
            switch_time=_get(s, "switch_time", _optional_float, None))

    return ExperimentConfig(
        name=ex.get("name", Path(source).stem).strip(),
        solvers=tuple(v for v in ex["solvers"].replace(",", " ").split()),
        bathymetry=bathy,
        x_min=_get(ex, "x_min", float, -200.0),
        x_max=_get(ex, "x_max", float, 200.0),
        t_end=_get(ex, "t_end", float, 30.0),
        snapshot_times=tuple(_get(ex, "snapshot_times", _floats, [])),
        output_dir=_get(ex, "output_dir", str, None),
        **kw)


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, source=str(path))


def bundled_config_path(name):
    """Path of a configuration shipped with the package, e.g. ``"pwc_desk"``."""
    stem = name[:-4] if name.endswith(".cfg") else name
    ref = resources.files("bathyhom") / "configs" / f"{stem}.cfg"
    if not ref.is_file():
        raise ConfigError(f"no bundled config named {name!r}")
    return Path(str(ref))


def load_bundled_config(name):
    return load_config(bundled_config_path(name))
