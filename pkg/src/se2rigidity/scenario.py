"""Scenario documents, built-in demos and the analysis/estimation runners.

Scenario files are YAML. Agent ids are 1-based in files and 0-based
everywhere else. Attitudes are read in ``angle_unit`` (``deg`` by default)
and kept in that unit on the ``Scenario`` so that writing it back out is
lossless.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from . import svgplot
from .estimator import (
    EstimatorConfig,
    EstimatorError,
    TrajectoryTrace,
    integrate,
    perturb_truth,
    true_state,
)
from .framework import DegenerateEdgeError, Se2Framework, bearing_rigidity_function
from .graph import GraphError, new_graph
from .rigidity import DEFAULT_TOL, RigidityReport, analyze

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2

DEFAULT_CONVERGENCE_TOL = 1e-3


class ScenarioError(ValueError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


@dataclass
class Agent:
    id: int
    x: float
    y: float
    psi: float = 0.0


@dataclass
class Gains:
    k_e: float = 5.0
    k1: float = 100.0
    k2: float = 100.0
    k3: float = 100.0


@dataclass
class SimSettings:
    dt: float = 1e-3
    t_final: float = 10.0
    integrator: str = "rk4"
    perturbation_magnitude: float = 0.1
    seed: int = 0
    record_stride: int = 1
    convergence_tol: float = DEFAULT_CONVERGENCE_TOL


@dataclass
class AnalysisSettings:
    rank_tolerance: float = DEFAULT_TOL


@dataclass
class Scenario:
    name: str
    agents: list
    edges: list
    iota: int
    kappa: int
    angle_unit: str = "deg"
    gains: Gains = field(default_factory=Gains)
    sim: SimSettings = field(default_factory=SimSettings)
    analysis: AnalysisSettings = field(default_factory=AnalysisSettings)

    def __post_init__(self):
        validate(self)

    @property
    def n(self) -> int:
        return len(self.agents)

    def _index(self):
        return {a.id: a.id - 1 for a in self.agents}

    def graph(self):
        return new_graph(self.n, [(h - 1, t - 1) for h, t in self.edges])

    def framework(self) -> Se2Framework:
        agents = sorted(self.agents, key=lambda a: a.id)
        p = np.array([[a.x, a.y] for a in agents], dtype=float)
        psi = np.array([a.psi for a in agents], dtype=float)
        if self.angle_unit == "deg":
            psi = np.deg2rad(psi)
        return Se2Framework(self.graph(), p, psi)

    def estimator_config(self) -> EstimatorConfig:
        return EstimatorConfig(
            iota=self.iota - 1,
            kappa=self.kappa - 1,
            k_e=self.gains.k_e,
            k1=self.gains.k1,
            k2=self.gains.k2,
            k3=self.gains.k3,
            dt=self.sim.dt,
            t_final=self.sim.t_final,
            integrator=self.sim.integrator,
            record_stride=self.sim.record_stride,
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "angle_unit": self.angle_unit,
            "agents": [asdict(a) for a in self.agents],
            "edges": [list(e) for e in self.edges],
            "iota": self.iota,
            "kappa": self.kappa,
            "gains": asdict(self.gains),
            "sim": asdict(self.sim),
            "analysis": asdict(self.analysis),
        }


def validate(s: Scenario):
    if not s.agents:
        raise ScenarioError("at least one agent is required", "agents")
    ids = [a.id for a in s.agents]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise ScenarioError(f"duplicate agent id(s) {dup}", "agents")
    if sorted(ids) != list(range(1, len(ids) + 1)):
        raise ScenarioError(f"agent ids must be 1..{len(ids)}, got {sorted(ids)}", "agents")
    for a in s.agents:
        for name in ("x", "y", "psi"):
            if not math.isfinite(getattr(a, name)):
                raise ScenarioError(f"agent {a.id}: {name} must be finite", "agents")
    if s.angle_unit not in ("deg", "rad"):
        raise ScenarioError("must be 'deg' or 'rad'", "angle_unit")
    for k, e in enumerate(s.edges):
        if len(e) != 2:
            raise ScenarioError(f"edge {k + 1} must be a [head, tail] pair", "edges")
    try:
        s.graph()
    except GraphError as exc:
        raise ScenarioError(f"{exc} (0-based indices)", "edges") from exc
    for name in ("iota", "kappa"):
        v = getattr(s, name)
        if v not in ids:
            raise ScenarioError(f"unknown agent id {v}", name)
    if s.iota == s.kappa:
        raise ScenarioError("iota and kappa must name different agents", "kappa")
    for name, v in asdict(s.gains).items():
        if not v >= 0:
            raise ScenarioError("gain must be nonnegative", f"gains.{name}")
    if not s.sim.dt > 0:
        raise ScenarioError("must be positive", "sim.dt")
    if not s.sim.t_final >= s.sim.dt:
        raise ScenarioError("must be >= sim.dt", "sim.t_final")
    if s.sim.integrator not in ("rk4", "euler"):
        raise ScenarioError("must be 'rk4' or 'euler'", "sim.integrator")
    if not s.sim.perturbation_magnitude >= 0:
        raise ScenarioError("must be nonnegative", "sim.perturbation_magnitude")
    if s.sim.record_stride < 1:
        raise ScenarioError("must be >= 1", "sim.record_stride")
    if not s.analysis.rank_tolerance > 0:
        raise ScenarioError("must be positive", "analysis.rank_tolerance")


# ---------------------------------------------------------------- file I/O


def _section(cls, data, prefix):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ScenarioError("must be a mapping", prefix)
    known = set(cls.__dataclass_fields__)
    extra = set(data) - known
    if extra:
        raise ScenarioError(f"unknown key(s) {sorted(extra)}", prefix)
    types = {k: type(getattr(cls(), k)) for k in known}
    out = {}
    for k, v in data.items():
        want = types[k]
        try:
            if want is int:
                if isinstance(v, bool) or not float(v).is_integer():
                    raise TypeError
                out[k] = int(v)
            elif want is float:
                out[k] = float(v)
            else:
                out[k] = str(v)
        except (TypeError, ValueError):
            raise ScenarioError(f"expected {want.__name__}, got {v!r}", f"{prefix}.{k}") from None
    return cls(**out)


def scenario_from_dict(doc) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("top level must be a mapping")
    known = {"name", "angle_unit", "agents", "edges", "iota", "kappa", "gains", "sim", "analysis"}
    extra = set(doc) - known
    if extra:
        raise ScenarioError(f"unknown key(s) {sorted(extra)}")
    for key in ("agents", "edges", "iota", "kappa"):
        if key not in doc:
            raise ScenarioError("missing required field", key)
    agents = []
    if not isinstance(doc["agents"], list):
        raise ScenarioError("must be a list", "agents")
    for k, a in enumerate(doc["agents"]):
        if not isinstance(a, dict) or not {"id", "x", "y"} <= set(a):
            raise ScenarioError(f"entry {k + 1} needs id, x, y (and optional psi)", "agents")
        try:
            agents.append(Agent(int(a["id"]), float(a["x"]), float(a["y"]), float(a.get("psi", 0.0))))
        except (TypeError, ValueError):
            raise ScenarioError(f"entry {k + 1} has a non-numeric value", "agents") from None
    if not isinstance(doc["edges"], list):
        raise ScenarioError("must be a list of [head, tail] pairs", "edges")
    edges = []
    for k, e in enumerate(doc["edges"]):
        if not isinstance(e, (list, tuple)) or len(e) != 2:
            raise ScenarioError(f"entry {k + 1} must be a [head, tail] pair", "edges")
        try:
            edges.append((int(e[0]), int(e[1])))
        except (TypeError, ValueError):
            raise ScenarioError(f"entry {k + 1} has a non-integer id", "edges") from None
    try:
        iota, kappa = int(doc["iota"]), int(doc["kappa"])
    except (TypeError, ValueError):
        raise ScenarioError("iota and kappa must be agent ids", "iota") from None
    return Scenario(
        name=str(doc.get("name", "scenario")),
        agents=agents,
        edges=edges,
        iota=iota,
        kappa=kappa,
        angle_unit=str(doc.get("angle_unit", "deg")),
        gains=_section(Gains, doc.get("gains"), "gains"),
        sim=_section(SimSettings, doc.get("sim"), "sim"),
        analysis=_section(AnalysisSettings, doc.get("analysis"), "analysis"),
    )


def load_scenario(path) -> Scenario:
    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ScenarioError(f"YAML parse error: {getattr(exc, 'problem', exc)}", line=line) from None
    return scenario_from_dict(doc)


def dump_scenario(s: Scenario) -> str:
    return yaml.safe_dump(s.to_dict(), sort_keys=False, default_flow_style=None)


def write_scenario(s: Scenario, path):
    Path(path).write_text(dump_scenario(s))


# ---------------------------------------------------------------- demos

# Perturbed regular hexagon, radius ~1. Attitudes in degrees.
_DEMO_AGENTS = [
    Agent(1, 1.0, 0.0, 10.0),
    Agent(2, 0.6261, 0.9242, -35.0),
    Agent(3, -0.5186, 0.8193, 80.0),
    Agent(4, -1.0492, 0.0420, 150.0),
    Agent(5, -0.4339, -0.8593, -120.0),
    Agent(6, 0.6286, -0.8954, 45.0),
]
_RING = [(i, i % 6 + 1) for i in range(1, 7)] + [(i % 6 + 1, i) for i in range(1, 7)]
_TRIANGLES = [(1, 3), (3, 5), (5, 1), (2, 4), (4, 6), (6, 2)]

DEMOS = ("rigid", "roto_flexible")


def builtin_demo(which: str) -> Scenario:
    """The two 6-agent case studies.

    ``rigid``: bidirectional ring plus both inscribed triangles in both
    directions (24 edges). ``roto_flexible``: the bidirectional ring with
    agent 6's measurements dropped, so agent 6 can spin freely and the ring
    can flex.
    """
    key = which.replace("-", "_")
    if key == "rigid":
        edges = _RING + _TRIANGLES + [(t, h) for h, t in _TRIANGLES]
    elif key == "roto_flexible":
        edges = [e for e in _RING if e[0] != 6]
    else:
        raise ValueError(f"unknown demo {which!r}; choose from {DEMOS}")
    return Scenario(
        name=f"demo-{key.replace('_', '-')}",
        agents=[replace(a) for a in _DEMO_AGENTS],
        edges=list(edges),
        iota=1,
        kappa=4,
    )


# ---------------------------------------------------------------- runners


def report_document(s: Scenario, report: RigidityReport) -> dict:
    d = report.to_dict()
    d["zero_out_degree_vertices"] = [v + 1 for v in report.zero_out_degree_vertices]
    return {"scenario": s.name, "rigid": report.rigid, "report": d}


def run_analysis(s: Scenario):
    """Returns ``(report, text, document, exit_code)``.

    Degenerate geometry raises ``DegenerateEdgeError``; the CLI maps it to
    exit code 1.
    """
    report = analyze(s.framework(), s.analysis.rank_tolerance)
    text = f"scenario: {s.name}\n" + report.summary() + "\n"
    doc = report_document(s, report)
    return report, text, doc, EXIT_OK if report.rigid else EXIT_NEGATIVE


def csv_header(n: int, m: int) -> list:
    cols = ["t", "J", "e_p"] + [f"e_{k}" for k in range(1, m + 1)]
    for i in range(1, n + 1):
        cols += [f"xi_{i}x", f"xi_{i}y"]
    return cols + [f"theta_{i}" for i in range(1, n + 1)]


def _fmt(x: float) -> str:
    return np.format_float_positional(float(x), unique=True, trim="-")


def write_csv(trace: TrajectoryTrace, path, n=None, m=None):
    n = trace.theta_hat.shape[1] if n is None else n
    m = trace.bearing_errors.shape[1] if m is None else m
    lines = [",".join(csv_header(n, m))]
    for k in range(len(trace)):
        row = [trace.times[k], trace.cost[k], trace.cumulative_position_error[k]]
        row += list(trace.bearing_errors[k]) + list(trace.xi_hat[k]) + list(trace.theta_hat[k])
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> dict:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [list(map(float, line.split(","))) for line in fh if line.strip()]
    data = np.array(rows).reshape(-1, len(header))
    return {h: data[:, i] for i, h in enumerate(header)}


@dataclass
class EstimationResult:
    trace: TrajectoryTrace
    report: RigidityReport
    converged: bool
    exit_code: int
    files: dict
    error: str = None


def run_estimation(
    s: Scenario, out_dir, seed=None, dt=None, t_final=None, plots=True
) -> EstimationResult:
    """Simulate the estimator on ``s`` and write ``trace.csv``, ``report.txt`` and plots.

    Exit code 0 when ``e_p(t_final) <= sim.convergence_tol``, 2 otherwise,
    1 if integration aborted (the partial trace is still written).
    """
    sim = replace(
        s.sim,
        seed=s.sim.seed if seed is None else seed,
        dt=s.sim.dt if dt is None else dt,
        t_final=s.sim.t_final if t_final is None else t_final,
    )
    s = replace(s, sim=sim)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    f = s.framework()
    report = analyze(f, s.analysis.rank_tolerance)
    cfg = s.estimator_config()
    truth = true_state(f, cfg.iota, cfg.kappa)
    s0 = perturb_truth(f, cfg.iota, cfg.kappa, sim.perturbation_magnitude, sim.seed)
    measured = bearing_rigidity_function(f)
    files = {"trace": out / "trace.csv", "report": out / "report.txt"}
    error = None
    try:
        trace = integrate(s0, measured, cfg, f.graph, truth=truth)
    except EstimatorError as exc:
        trace = exc.trace if exc.trace is not None else TrajectoryTrace.empty(f.n, f.graph.n_edges)
        error = str(exc)
    write_csv(trace, files["trace"], f.n, f.graph.n_edges)

    if error is not None:
        converged, code = False, EXIT_ERROR
    else:
        final_ep = float(trace.cumulative_position_error[-1])
        converged = final_ep <= sim.convergence_tol
        code = EXIT_OK if converged else EXIT_NEGATIVE

    lines = [f"scenario: {s.name}", report.summary(), ""]
    lines += [
        f"gains: k_e={cfg.k_e:g} k1={cfg.k1:g} k2={cfg.k2:g} k3={cfg.k3:g}",
        f"integrator: {cfg.integrator}  dt={cfg.dt:g}  t_final={cfg.t_final:g}",
        f"reference agent iota={cfg.iota + 1}  scale agent kappa={cfg.kappa + 1}",
        f"initial perturbation: {sim.perturbation_magnitude:g} (seed {sim.seed})",
    ]
    if len(trace):
        lines += [
            f"samples: {len(trace)}",
            f"final t: {trace.times[-1]:.6g}",
            f"final J: {trace.cost[-1]:.6e}",
            f"final e_p: {trace.cumulative_position_error[-1]:.6e}",
            f"final max |e|: {np.max(np.abs(trace.bearing_errors[-1]), initial=0.0):.6e}",
        ]
    if error is not None:
        lines.append(f"ABORTED: {error}")
    else:
        lines.append(
            f"estimate {'converged' if converged else 'did not converge'}"
            f" (e_p tolerance {sim.convergence_tol:g})"
        )
    files["report"].write_text("\n".join(lines) + "\n")
    (out / "report.json").write_text(
        json.dumps(
            {
                **report_document(s, report),
                "converged": converged,
                "final_e_p": float(trace.cumulative_position_error[-1]) if len(trace) else None,
                "error": error,
            },
            indent=2,
        )
        + "\n"
    )
    files["report_json"] = out / "report.json"

    if plots and len(trace):
        files.update(_write_plots(trace, truth, f, out))
    return EstimationResult(trace, report, converged, code, files, error)


def _write_plots(trace: TrajectoryTrace, truth, f: Se2Framework, out: Path) -> dict:
    m = trace.bearing_errors.shape[1]
    n = f.n
    e_svg = svgplot.line_plot(
        trace.times,
        [trace.bearing_errors[:, k] for k in range(m)],
        title="bearing error e(t)",
        xlabel="t [s]",
        ylabel="e [rad]",
    )
    ep_svg = svgplot.line_plot(
        trace.times,
        [trace.cumulative_position_error],
        title="cumulative position error e_p(t)",
        xlabel="t [s]",
        ylabel="e_p",
        logy=True,
    )
    # headings of each estimated body frame, as seen from iota's frame
    xi0 = trace.xi_hat[0].reshape(n, 2)
    xi1 = trace.xi_hat[-1].reshape(n, 2)
    traj_svg = svgplot.trajectory_plot(
        paths=[trace.xi_hat[:, 2 * i : 2 * i + 2] for i in range(n)],
        truth=truth.xi,
        truth_heading=-truth.theta_hat,
        start=xi0,
        start_heading=-trace.theta_hat[0],
        end=xi1,
        end_heading=-trace.theta_hat[-1],
        title="estimated unscaled positions",
    )
    files = {"e_plot": out / "e.svg", "ep_plot": out / "ep.svg", "traj_plot": out / "traj.svg"}
    files["e_plot"].write_text(e_svg)
    files["ep_plot"].write_text(ep_svg)
    files["traj_plot"].write_text(traj_svg)
    return files


__all__ = [
    "Agent", "Gains", "SimSettings", "AnalysisSettings", "Scenario", "ScenarioError",
    "load_scenario", "write_scenario", "dump_scenario", "scenario_from_dict",
    "builtin_demo", "run_analysis", "run_estimation", "write_csv", "read_csv",
    "EXIT_OK", "EXIT_ERROR", "EXIT_NEGATIVE", "DegenerateEdgeError",
]
