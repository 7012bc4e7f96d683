"""Scenario files: parsing, execution, and tabular output.

A scenario is a TOML document with a ``[transition]`` table, one or more
``[[drives]]`` tables, and one or more ``[[outputs]]`` requests.  Keys carry
explicit units (``w0_um``, ``omega_rad_per_s``, ``E0_V_per_m``); angles are
accepted in degrees or radians through the ``_deg``/``_rad`` key suffix.
Execution is deterministic: identical inputs produce byte-identical tables.
"""

from __future__ import annotations

import cmath
import copy
import csv
import io
import json
import math
import re
from dataclasses import dataclass
from typing import Any, Optional, Union

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import __version__ as _version
from . import constants
from .angular import HalfInt, SphDirection
from .beams import (
    BeamSpec,
    ConvergenceError,
    HermiteGaussMode,
    LaguerreGaussMode,
    PlaneWaveMode,
    VectorMode,
    beam_coupling_integral,
    radial_donut_mode,
)
from .coupling import (
    OptimizationResult,
    PlaneWaveDrive,
    TransitionSpec,
    optimize_geometry,
    plane_wave_coupling,
    rabi_frequency,
    selectivity,
)
from .frames import CVec3, bilinear_dot, helicity_frame, k_hat
from .polarization import (
    JonesVector,
    PolarizationError,
    WavePlate,
    apply_waveplate,
    beta_vector,
    jones_to_cvec,
    named_polarization,
)
from .vsh import vsh_grid

__all__ = [
    "ScenarioError",
    "InfeasibleError",
    "Scenario",
    "DriveConfig",
    "OutputRequest",
    "ResultTable",
    "parse_scenario",
    "scenario_to_toml",
    "run_scenario",
    "emit",
]


class ScenarioError(ValueError):
    """Scenario document rejected; the message names the offending key path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class InfeasibleError(RuntimeError):
    """Requested optimization objective has no feasible geometry."""


@dataclass(frozen=True)
class DriveConfig:
    """One drive as written in the scenario file.

    ``kind`` is "plane_wave" or "beam".  Angles are stored in radians; the
    polarization is kept as the raw unit vector after any wave plates
    (None for vector-mode beams, whose terms carry their own Jones weights).
    """

    kind: str
    E0: float
    k_theta: float
    k_phi: float
    polarization: Optional[CVec3]
    phase: float = 0.0
    # beam-only fields
    mode: Any = None
    w0: float = 0.0
    k_mag: float = 0.0
    offset: tuple[float, float] = (0.0, 0.0)

    def k_direction(self) -> SphDirection:
        return SphDirection(self.k_theta, self.k_phi)


@dataclass(frozen=True)
class OutputRequest:
    kind: str
    # scan
    parameter: str = ""
    start: float = 0.0
    stop: float = 0.0
    steps: int = 0
    quantity: str = "rabi"
    # vsh_grid
    K: int = 0
    p: int = 0
    lambda_type: int = 1
    n_theta: int = 0
    n_phi: int = 0
    # optimize
    objective: str = "max_coupling"


@dataclass(frozen=True)
class Scenario:
    transition: Optional[TransitionSpec]
    drives: tuple[DriveConfig, ...]
    outputs: tuple[OutputRequest, ...]
    raw: dict


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list]
    metadata: dict

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("table must be rectangular")


_ANGLE_SUFFIXES = (("_deg", math.pi / 180.0), ("_rad", 1.0))


class _Reader:
    """Typed key access over a parsed TOML table with path-tracked errors."""

    def __init__(self, table: dict, path: str):
        self.table = dict(table)
        self.path = path
        self.seen: set[str] = set()

    def _raw(self, key, default=None, required=False):
        self.seen.add(key)
        if key in self.table:
            return self.table[key]
        if required:
            raise ScenarioError(f"{self.path}.{key}", "missing required key")
        return default

    def number(self, key, default=None, required=False) -> Optional[float]:
        val = self._raw(key, default, required)
        if val is None:
            return None
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ScenarioError(f"{self.path}.{key}", f"expected a number, got {val!r}")
        return float(val)

    def integer(self, key, default=None, required=False) -> Optional[int]:
        val = self._raw(key, default, required)
        if val is None:
            return None
        if isinstance(val, bool) or not isinstance(val, int):
            raise ScenarioError(f"{self.path}.{key}", f"expected an integer, got {val!r}")
        return val

    def string(self, key, default=None, required=False) -> Optional[str]:
        val = self._raw(key, default, required)
        if val is None:
            return None
        if not isinstance(val, str):
            raise ScenarioError(f"{self.path}.{key}", f"expected a string, got {val!r}")
        return val

    def halfint(self, key, default=None, required=False) -> Optional[HalfInt]:
        val = self._raw(key, default, required)
        if val is None:
            return None
        try:
            return HalfInt.of(val)
        except (ValueError, TypeError) as exc:
            raise ScenarioError(f"{self.path}.{key}", str(exc)) from None

    def angle(self, stem: str, default=None, required=False) -> Optional[float]:
        """Read ``stem_deg`` or ``stem_rad`` (exactly one may be present)."""
        present = [s for s, _ in _ANGLE_SUFFIXES if stem + s in self.table]
        if len(present) > 1:
            raise ScenarioError(f"{self.path}.{stem}", "give the angle in degrees or radians, not both")
        if not present:
            if required:
                raise ScenarioError(f"{self.path}.{stem}_deg", "missing required angle")
            return default
        suffix = present[0]
        scale = dict(_ANGLE_SUFFIXES)[suffix]
        return self.number(stem + suffix, required=True) * scale

    def finish(self):
        unknown = set(self.table) - self.seen
        if unknown:
            key = sorted(unknown)[0]
            raise ScenarioError(f"{self.path}.{key}", "unknown key")


def _parse_complex_pair(val, path: str) -> complex:
    if (
        not isinstance(val, list)
        or len(val) != 2
        or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in val)
    ):
        raise ScenarioError(path, "expected [re, im]")
    return complex(val[0], val[1])


def _parse_polarization(reader: _Reader, k_dir: SphDirection) -> CVec3:
    frame = helicity_frame(k_dir)
    named = reader.string("polarization")
    jones_raw = reader._raw("jones")
    cvec_raw = reader._raw("cvec")
    given = [x for x in (named, jones_raw, cvec_raw) if x is not None]
    if len(given) != 1:
        raise ScenarioError(
            f"{reader.path}.polarization",
            "give exactly one of polarization / jones / cvec",
        )
    try:
        if named is not None:
            eps = named_polarization(named, k_dir)
        elif jones_raw is not None:
            if not isinstance(jones_raw, list) or len(jones_raw) != 2:
                raise ScenarioError(f"{reader.path}.jones", "expected [[re,im],[re,im]]")
            jones = JonesVector(
                _parse_complex_pair(jones_raw[0], f"{reader.path}.jones[0]"),
                _parse_complex_pair(jones_raw[1], f"{reader.path}.jones[1]"),
            )
            eps = jones_to_cvec(jones.normalized(), frame)
        else:
            if not isinstance(cvec_raw, list) or len(cvec_raw) != 3:
                raise ScenarioError(f"{reader.path}.cvec", "expected three [re,im] pairs")
            eps = CVec3(
                _parse_complex_pair(cvec_raw[0], f"{reader.path}.cvec[0]"),
                _parse_complex_pair(cvec_raw[1], f"{reader.path}.cvec[1]"),
                _parse_complex_pair(cvec_raw[2], f"{reader.path}.cvec[2]"),
            )
            if eps.norm == 0.0:
                raise ScenarioError(f"{reader.path}.cvec", "polarization vector is zero")
            eps = eps.unit()
            if abs(bilinear_dot(eps, frame.e_zero)) > 1e-10:
                raise ScenarioError(f"{reader.path}.cvec", "polarization not transverse to k")
    except PolarizationError as exc:
        raise ScenarioError(f"{reader.path}.polarization", str(exc)) from None

    plates_raw = reader._raw("waveplates", default=[])
    if plates_raw:
        if not isinstance(plates_raw, list):
            raise ScenarioError(f"{reader.path}.waveplates", "expected an array of tables")
        jones = JonesVector(
            bilinear_dot(eps, frame.e_xp), bilinear_dot(eps, frame.e_yp)
        )
        for idx, plate_raw in enumerate(plates_raw):
            pr = _Reader(plate_raw, f"{reader.path}.waveplates[{idx}]")
            kind = pr.string("kind", required=True)
            angle = pr.angle("angle", required=True)
            pr.finish()
            try:
                jones = apply_waveplate(jones, WavePlate(kind, angle))
            except ValueError as exc:
                raise ScenarioError(f"{pr.path}.kind", str(exc)) from None
        eps = jones_to_cvec(jones.normalized(), frame)
    return eps


def _parse_mode(reader: _Reader):
    name = reader.string("mode", required=True).lower()
    if name in ("gaussian", "hg00"):
        return HermiteGaussMode(0, 0)
    if name == "plane_wave":
        return PlaneWaveMode()
    if name == "hg":
        return HermiteGaussMode(reader.integer("m", required=True), reader.integer("n", required=True))
    if name == "lg":
        return LaguerreGaussMode(reader.integer("n", required=True), reader.integer("l", required=True))
    if name == "donut":
        return radial_donut_mode()
    raise ScenarioError(f"{reader.path}.mode", f"unknown mode {name!r}")


def _parse_drive(raw: dict, path: str) -> DriveConfig:
    reader = _Reader(raw, path)
    kind = reader.string("kind", required=True)
    if kind not in ("plane_wave", "beam"):
        raise ScenarioError(f"{path}.kind", f"unknown drive kind {kind!r}")
    e0 = reader.number("E0_V_per_m", default=1.0)
    if e0 < 0:
        raise ScenarioError(f"{path}.E0_V_per_m", "amplitude must be nonnegative")
    theta = reader.angle("k_theta", required=True)
    phi = reader.angle("k_phi", default=0.0)
    phase = reader.angle("phase", default=0.0)
    if not 0.0 <= theta <= math.pi:
        raise ScenarioError(f"{path}.k_theta", "polar angle must lie in [0, pi]")
    k_dir = SphDirection(theta, phi)

    if kind == "plane_wave":
        eps = _parse_polarization(reader, k_dir)
        reader.finish()
        return DriveConfig(kind=kind, E0=e0, k_theta=theta, k_phi=k_dir.phi, polarization=eps, phase=phase)

    mode = _parse_mode(reader)
    if isinstance(mode, VectorMode):
        for key in ("polarization", "jones", "cvec", "waveplates"):
            if key in reader.table:
                raise ScenarioError(f"{path}.{key}", "vector modes carry polarization in their terms")
        eps = None
    else:
        eps = _parse_polarization(reader, k_dir)
    w0_um = reader.number("w0_um", required=True)
    if w0_um <= 0:
        raise ScenarioError(f"{path}.w0_um", "waist must be positive")
    wavelength = reader.number("wavelength_nm")
    k_mag = reader.number("k_rad_per_m")
    if (wavelength is None) == (k_mag is None):
        raise ScenarioError(f"{path}.wavelength_nm", "give exactly one of wavelength_nm / k_rad_per_m")
    if wavelength is not None:
        if wavelength <= 0:
            raise ScenarioError(f"{path}.wavelength_nm", "wavelength must be positive")
        k_mag = 2.0 * math.pi / (wavelength * 1e-9)
    offset_raw = reader._raw("offset_um", default=[0.0, 0.0])
    if (
        not isinstance(offset_raw, list)
        or len(offset_raw) != 2
        or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in offset_raw)
    ):
        raise ScenarioError(f"{path}.offset_um", "expected [x_um, y_um]")
    reader.finish()
    return DriveConfig(
        kind=kind,
        E0=e0,
        k_theta=theta,
        k_phi=k_dir.phi,
        polarization=eps,
        phase=phase,
        mode=mode,
        w0=w0_um * 1e-6,
        k_mag=k_mag,
        offset=(offset_raw[0] * 1e-6, offset_raw[1] * 1e-6),
    )


_OUTPUT_KINDS = ("rabi", "coupling", "selectivity", "scan", "vsh_grid", "optimize")
_SCAN_QUANTITIES = ("rabi", "coupling", "selectivity")
_PATH_TOKEN = re.compile(r"([A-Za-z_][A-Za-z_0-9]*)|\[(\d+)\]")


def _resolve_path(raw: dict, dotted: str, path: str):
    """Walk a dotted/indexed path like drives[0].k_theta_deg through the raw
    document; returns (container, final key)."""
    tokens: list[Union[str, int]] = []
    pos = 0
    text = dotted
    while pos < len(text):
        if text[pos] == ".":
            pos += 1
            continue
        match = _PATH_TOKEN.match(text, pos)
        if not match:
            raise ScenarioError(path, f"malformed parameter path {dotted!r}")
        tokens.append(match.group(1) if match.group(1) else int(match.group(2)))
        pos = match.end()
    if not tokens:
        raise ScenarioError(path, "empty parameter path")
    node = raw
    for token in tokens[:-1]:
        try:
            node = node[token]
        except (KeyError, IndexError, TypeError):
            raise ScenarioError(path, f"parameter path {dotted!r} does not exist") from None
    last = tokens[-1]
    try:
        value = node[last]
    except (KeyError, IndexError, TypeError):
        raise ScenarioError(path, f"parameter path {dotted!r} does not exist") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(path, f"parameter path {dotted!r} is not numeric")
    return node, last


def _parse_output(raw: dict, path: str, doc: dict) -> OutputRequest:
    reader = _Reader(raw, path)
    kind = reader.string("kind", required=True)
    if kind not in _OUTPUT_KINDS:
        raise ScenarioError(f"{path}.kind", f"unknown output kind {kind!r}")
    if kind == "scan":
        parameter = reader.string("parameter", required=True)
        _resolve_path(doc, parameter, f"{path}.parameter")
        start = reader.number("start", required=True)
        stop = reader.number("stop", required=True)
        steps = reader.integer("steps", required=True)
        if steps < 2:
            raise ScenarioError(f"{path}.steps", "a scan needs at least 2 steps")
        quantity = reader.string("quantity", default="rabi")
        if quantity not in _SCAN_QUANTITIES:
            raise ScenarioError(f"{path}.quantity", f"unknown scan quantity {quantity!r}")
        reader.finish()
        return OutputRequest(
            kind=kind, parameter=parameter, start=start, stop=stop, steps=steps, quantity=quantity
        )
    if kind == "vsh_grid":
        K = reader.integer("K", required=True)
        p = reader.integer("p", required=True)
        lam = reader.integer("lambda", default=1)
        n_theta = reader.integer("n_theta", required=True)
        n_phi = reader.integer("n_phi", required=True)
        if K < 1 or abs(p) > K:
            raise ScenarioError(f"{path}.p", "need K >= 1 and |p| <= K")
        if lam not in (0, 1):
            raise ScenarioError(f"{path}.lambda", "lambda must be 0 or 1")
        if n_theta < 2 or n_phi < 2:
            raise ScenarioError(f"{path}.n_theta", "grid needs at least 2 points per axis")
        reader.finish()
        return OutputRequest(kind=kind, K=K, p=p, lambda_type=lam, n_theta=n_theta, n_phi=n_phi)
    if kind == "optimize":
        objective = reader.string("objective", default="max_coupling")
        if objective not in ("max_coupling", "max_coupling_zero_selectivity"):
            raise ScenarioError(f"{path}.objective", f"unknown objective {objective!r}")
        reader.finish()
        return OutputRequest(kind=kind, objective=objective)
    reader.finish()
    return OutputRequest(kind=kind)


def _parse_transition(raw: dict, path: str) -> TransitionSpec:
    reader = _Reader(raw, path)
    k = reader.integer("multipole", required=True)
    character = reader.string("character", default="E")
    j_e = reader.halfint("J_e", required=True)
    j_g = reader.halfint("J_g", required=True)
    m_e = reader.halfint("M_e", required=True)
    m_g = reader.halfint("M_g", required=True)
    einstein = reader.number("einstein_A_per_s", required=True)
    omega = reader.number("omega_rad_per_s", required=True)
    s_sign = reader.integer("s_J_sign", default=1)
    i = reader.halfint("I")
    f_e = reader.halfint("F_e")
    f_g = reader.halfint("F_g")
    reader.finish()
    try:
        return TransitionSpec(
            K=k,
            character=character,
            j_e=j_e,
            j_g=j_g,
            m_e=m_e,
            m_g=m_g,
            einstein_a=einstein,
            omega=omega,
            s_j_sign=s_sign,
            i=i,
            f_e=f_e,
            f_g=f_g,
        )
    except ValueError as exc:
        raise ScenarioError(path, str(exc)) from None


def _build_scenario(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("<root>", "document must be a table")
    known = {"transition", "drives", "outputs"}
    unknown = set(doc) - known
    if unknown:
        raise ScenarioError(sorted(unknown)[0], "unknown key")

    transition = None
    if "transition" in doc:
        transition = _parse_transition(doc["transition"], "transition")

    drives_raw = doc.get("drives", [])
    if not isinstance(drives_raw, list):
        raise ScenarioError("drives", "expected an array of tables")
    drives = tuple(
        _parse_drive(d, f"drives[{i}]") for i, d in enumerate(drives_raw)
    )

    outputs_raw = doc.get("outputs", [])
    if not isinstance(outputs_raw, list):
        raise ScenarioError("outputs", "expected an array of tables")
    if not outputs_raw:
        raise ScenarioError("outputs", "at least one output request is required")
    outputs = tuple(
        _parse_output(o, f"outputs[{i}]", doc) for i, o in enumerate(outputs_raw)
    )

    needs_transition = [o.kind for o in outputs if o.kind in ("rabi", "coupling", "selectivity", "scan", "optimize")]
    if needs_transition and transition is None:
        raise ScenarioError("transition", f"output '{needs_transition[0]}' requires a transition")
    needs_drives = [o.kind for o in outputs if o.kind in ("rabi", "coupling", "selectivity") or (o.kind == "scan")]
    if needs_drives and not drives:
        raise ScenarioError("drives", f"output '{needs_drives[0]}' requires at least one drive")
    return Scenario(transition=transition, drives=drives, outputs=outputs, raw=doc)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document.

    Syntax errors carry the line/column from the TOML parser; semantic
    errors name the offending key path.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError("<syntax>", str(exc)) from None
    return _build_scenario(doc)


def _toml_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, list):
        return "[" + ", ".join(_toml_scalar(v) for v in value) + "]"
    if isinstance(value, dict):
        inner = ", ".join(f"{k} = {_toml_scalar(v)}" for k, v in value.items())
        return "{" + inner + "}"
    raise TypeError(f"cannot serialize {value!r}")


def scenario_to_toml(scenario: Scenario) -> str:
    """Canonical TOML serialization of a parsed scenario.

    Round-trips: parsing the output reproduces an equal Scenario (angles are
    emitted in radians, polarizations as raw vectors).
    """
    lines: list[str] = []
    tr = scenario.transition
    if tr is not None:
        lines.append("[transition]")
        lines.append(f"multipole = {tr.K}")
        lines.append(f'character = "{tr.character}"')
        for key, val in (
            ("J_e", tr.j_e),
            ("J_g", tr.j_g),
            ("M_e", tr.m_e),
            ("M_g", tr.m_g),
        ):
            lines.append(f'{key} = "{val}"')
        lines.append(f"einstein_A_per_s = {repr(tr.einstein_a)}")
        lines.append(f"omega_rad_per_s = {repr(tr.omega)}")
        lines.append(f"s_J_sign = {tr.s_j_sign}")
        if tr.is_hyperfine:
            lines.append(f'I = "{tr.i}"')
            lines.append(f'F_e = "{tr.f_e}"')
            lines.append(f'F_g = "{tr.f_g}"')
        lines.append("")

    for drive in scenario.drives:
        lines.append("[[drives]]")
        lines.append(f'kind = "{drive.kind}"')
        lines.append(f"E0_V_per_m = {repr(drive.E0)}")
        lines.append(f"k_theta_rad = {repr(drive.k_theta)}")
        lines.append(f"k_phi_rad = {repr(drive.k_phi)}")
        lines.append(f"phase_rad = {repr(drive.phase)}")
        eps = drive.polarization
        if eps is not None:
            pairs = [[eps.x.real, eps.x.imag], [eps.y.real, eps.y.imag], [eps.z.real, eps.z.imag]]
            lines.append(f"cvec = {_toml_scalar(pairs)}")
        if drive.kind == "beam":
            mode = drive.mode
            if isinstance(mode, PlaneWaveMode):
                lines.append('mode = "plane_wave"')
            elif isinstance(mode, VectorMode):
                lines.append('mode = "donut"')
            elif isinstance(mode, LaguerreGaussMode):
                lines.append('mode = "lg"')
                lines.append(f"n = {mode.n}")
                lines.append(f"l = {mode.ell}")
            else:
                lines.append('mode = "hg"')
                lines.append(f"m = {mode.m}")
                lines.append(f"n = {mode.n}")
            lines.append(f"w0_um = {repr(drive.w0 * 1e6)}")
            lines.append(f"k_rad_per_m = {repr(drive.k_mag)}")
            lines.append(f"offset_um = {_toml_scalar([drive.offset[0] * 1e6, drive.offset[1] * 1e6])}")
        lines.append("")

    for out in scenario.outputs:
        lines.append("[[outputs]]")
        lines.append(f'kind = "{out.kind}"')
        if out.kind == "scan":
            lines.append(f'parameter = "{out.parameter}"')
            lines.append(f"start = {repr(out.start)}")
            lines.append(f"stop = {repr(out.stop)}")
            lines.append(f"steps = {out.steps}")
            lines.append(f'quantity = "{out.quantity}"')
        elif out.kind == "vsh_grid":
            lines.append(f"K = {out.K}")
            lines.append(f"p = {out.p}")
            lines.append(f"lambda = {out.lambda_type}")
            lines.append(f"n_theta = {out.n_theta}")
            lines.append(f"n_phi = {out.n_phi}")
        elif out.kind == "optimize":
            lines.append(f'objective = "{out.objective}"')
        lines.append("")
    return "\n".join(lines)


def _drive_geometric(
    drive: DriveConfig,
    spec: TransitionSpec,
    tol: float,
    reproject: bool,
    delta_m: Optional[int] = None,
) -> complex:
    """E0- and phase-weighted geometric amplitude of one drive.

    For magnetic transitions the polarization is replaced by k x eps (per
    vector-mode term: Jones (jx, jy) -> (-jy, jx)) and the amplitude is
    interpreted as c * B0.
    """
    if delta_m is None:
        delta_m = spec.delta_m
    k_dir = drive.k_direction()
    magnetic = spec.character == "M"
    if drive.kind == "plane_wave":
        eps = beta_vector(k_dir, drive.polarization) if magnetic else drive.polarization
        geo = plane_wave_coupling(spec.K, delta_m, k_dir, eps)
    else:
        frame = helicity_frame(k_dir)
        mode = drive.mode
        jones = None
        if isinstance(mode, VectorMode):
            if magnetic:
                mode = VectorMode(
                    terms=tuple(
                        (JonesVector(-j.jy, j.jx), m) for j, m in mode.terms
                    )
                )
        else:
            eps = beta_vector(k_dir, drive.polarization) if magnetic else drive.polarization
            jones = JonesVector(
                bilinear_dot(eps, frame.e_xp), bilinear_dot(eps, frame.e_yp)
            ).normalized()
        beam = BeamSpec(
            mode=mode,
            w0=drive.w0,
            k_mag=drive.k_mag,
            k_dir=k_dir,
            jones=jones,
            offset=drive.offset,
        )
        geo = beam_coupling_integral(beam, spec.K, delta_m, tol=tol, reproject=reproject)
    return drive.E0 * geo * cmath.exp(1j * drive.phase)


def _quantity_row(scenario: Scenario, quantity: str, tol: float, reproject: bool) -> list:
    spec = scenario.transition
    if quantity == "selectivity":
        total = 0.0
        for p in range(-spec.K, spec.K + 1):
            if p == spec.delta_m:
                continue
            geo_p = sum(
                _drive_geometric(d, spec, tol, reproject, delta_m=p) for d in scenario.drives
            )
            total += abs(geo_p)
        return [total]
    geo = sum(_drive_geometric(d, spec, tol, reproject) for d in scenario.drives)
    if quantity == "coupling":
        return [geo, abs(geo)]
    omega = rabi_frequency(spec, geo, 1.0)
    return [geo, omega, abs(omega)]


_QUANTITY_COLUMNS = {
    "rabi": ["coupling", "rabi_rad_per_s", "rabi_abs_rad_per_s"],
    "coupling": ["coupling", "coupling_abs"],
    "selectivity": ["selectivity"],
}


def _scan_point(args) -> list:
    raw, request, value, tol, reproject = args
    doc = copy.deepcopy(raw)
    node, last = _resolve_path(doc, request.parameter, "outputs.scan.parameter")
    node[last] = value
    point = _build_scenario(doc)
    return [value] + _quantity_row(point, request.quantity, tol, reproject)


def run_scenario(
    scenario: Scenario,
    tol: float = 1e-9,
    reproject: bool = False,
    threads: int = 1,
) -> ResultTable:
    """Execute every output request; one row per request (per scan point).

    Columns are the union over requests; cells that do not apply are empty
    strings.  Reruns with identical inputs are bit-identical; scan points
    are dispatched to a thread pool but assembled in input order.
    """
    blocks: list[tuple[list[str], list[list]]] = []
    for index, request in enumerate(scenario.outputs):
        label = f"{request.kind}[{index}]"
        if request.kind in ("rabi", "coupling", "selectivity"):
            row = _quantity_row(scenario, request.kind, tol, reproject)
            blocks.append((["request"] + _QUANTITY_COLUMNS[request.kind], [[label] + row]))
        elif request.kind == "scan":
            values = [
                request.start + (request.stop - request.start) * i / (request.steps - 1)
                for i in range(request.steps)
            ]
            jobs = [(scenario.raw, request, v, tol, reproject) for v in values]
            if threads > 1:
                from concurrent.futures import ThreadPoolExecutor

                with ThreadPoolExecutor(max_workers=threads) as pool:
                    rows = list(pool.map(_scan_point, jobs))
            else:
                rows = [_scan_point(job) for job in jobs]
            cols = ["request", request.parameter] + _QUANTITY_COLUMNS[request.quantity]
            blocks.append((cols, [[label] + row for row in rows]))
        elif request.kind == "vsh_grid":
            records = vsh_grid(request.K, request.p, request.lambda_type, request.n_theta, request.n_phi)
            cols = ["request", "theta", "phi", "ex", "ey", "ez", "W"]
            rows = [
                [label, d.theta, d.phi, v.x, v.y, v.z, w]
                for d, v, w in records
            ]
            blocks.append((cols, rows))
        else:  # optimize
            result = optimize_geometry(scenario.transition.K, scenario.transition.delta_m, request.objective)
            if not result.feasible:
                raise InfeasibleError(
                    f"objective {request.objective!r} has no feasible geometry "
                    f"(best residual selectivity {result.selectivity:.3e})"
                )
            cols = [
                "request",
                "theta_k_rad",
                "phi_k_rad",
                "jones_x",
                "jones_y",
                "coupling_abs",
                "selectivity",
            ]
            rows = [[
                label,
                result.k_dir.theta,
                result.k_dir.phi,
                result.jones.jx,
                result.jones.jy,
                result.value,
                result.selectivity,
            ]]
            blocks.append((cols, rows))

    columns: list[str] = []
    for cols, _ in blocks:
        for col in cols:
            if col not in columns:
                columns.append(col)
    rows_out: list[list] = []
    for cols, rows in blocks:
        idx = [columns.index(c) for c in cols]
        for row in rows:
            full = [""] * len(columns)
            for c, value in zip(idx, row):
                full[c] = value
            rows_out.append(full)

    metadata = {
        "tool": "rabigeom",
        "version": _version,
        "constants": constants.CONSTANTS_VERSION,
        "quadrature_tolerance": tol,
        "reproject_polarization": reproject,
    }
    return ResultTable(columns=columns, rows=rows_out, metadata=metadata)


def _format_number(value: float) -> str:
    return f"{value:.17g}"


def _split_complex_columns(table: ResultTable) -> tuple[list[str], list[list]]:
    has_complex = [
        any(isinstance(row[i], complex) for row in table.rows) for i in range(len(table.columns))
    ]
    columns: list[str] = []
    for name, is_c in zip(table.columns, has_complex):
        if is_c:
            columns.extend([name + "_re", name + "_im"])
        else:
            columns.append(name)
    rows: list[list] = []
    for row in table.rows:
        out: list = []
        for value, is_c in zip(row, has_complex):
            if is_c:
                c = complex(value) if not isinstance(value, str) else None
                if c is None:
                    out.extend(["", ""])
                else:
                    out.extend([c.real, c.imag])
            else:
                out.append(value)
        rows.append(out)
    return columns, rows


def emit(table: ResultTable, fmt: str) -> bytes:
    """Serialize a table as CSV or JSON-lines.

    CSV: header row, RFC-4180 quoting, complex values split into paired
    _re/_im columns, floats with 17 significant digits.  JSON-lines: a
    leading metadata object followed by one object per row.
    """
    if fmt == "csv":
        columns, rows = _split_complex_columns(table)
        buf = io.StringIO()
        writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(columns)
        for row in rows:
            writer.writerow(
                [_format_number(v) if isinstance(v, float) else v for v in row]
            )
        return buf.getvalue().encode()
    if fmt == "jsonl":
        columns, rows = _split_complex_columns(table)
        lines = [json.dumps({"metadata": table.metadata}, sort_keys=True)]
        for row in rows:
            lines.append(json.dumps(dict(zip(columns, row)), sort_keys=False))
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}")
