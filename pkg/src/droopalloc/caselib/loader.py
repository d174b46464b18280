"""Reading, validating and writing case documents."""
from dataclasses import fields

import jsonschema
import numpy as np
import yaml

from ..devices import SlackParams, default_params, model_for
from ..errors import CaseValidationError, InvalidArgumentError
from ..network import (DeviceSpec, Disturbance, LineAdmittance, NetworkCase,
                       OptimizationSettings, SimulationSettings)
from ..numerics.lyapunov import is_spd
from .schema import CASE_SCHEMA, SCHEMA_VERSION

_VALIDATOR = jsonschema.Draft202012Validator(CASE_SCHEMA)


def _path(err):
    parts = []
    for p in err.absolute_path:
        parts.append(f"[{p}]" if isinstance(p, int) else (f".{p}" if parts else str(p)))
    return "".join(parts) or "<root>"


def validate_document(doc):
    if not isinstance(doc, dict):
        raise CaseValidationError("<root>", "case document must be a mapping")
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        e = errors[0]
        raise CaseValidationError(_path(e), e.message)


def parse_text(text):
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise CaseValidationError("<root>", f"not a readable document: {exc}") from None
    validate_document(doc)
    return doc


def case_from_document(doc):
    """Build a validated :class:`NetworkCase` from a parsed document."""
    validate_document(doc)
    devices = []
    for i, d in enumerate(doc["devices"]):
        overrides = dict(d.get("params", {}))
        for key in ("p_star", "q_star"):
            if key in d:
                overrides[key] = d[key]
        try:
            params = default_params(d["kind"], **{k: float(v) for k, v in overrides.items()})
        except InvalidArgumentError as exc:
            raise CaseValidationError(f"devices[{i}].params", str(exc)) from None
        devices.append(DeviceSpec(int(d["bus"]), d["kind"], params))
    lines = tuple(LineAdmittance(int(ln["from"]), int(ln["to"]),
                                 complex(float(ln["conductance"]), float(ln["susceptance"])))
                  for ln in doc["lines"])
    n_unified = sum(d.kind == "unified" for d in devices)
    opt_doc = doc.get("optimization")
    if opt_doc is not None and n_unified == 0:
        raise CaseValidationError("optimization", "optimization block needs at least one unified device")
    opt_doc = opt_doc or {}
    bounds = opt_doc.get("bounds", {})
    weights = opt_doc.get("weights", {})
    n_states = sum(model_for(d.kind).n for d in devices)
    mats = {}
    for key in ("Q", "S"):
        if key in weights:
            M = np.asarray(weights[key], dtype=float)
            if M.shape != (n_states, n_states):
                raise CaseValidationError(f"optimization.weights.{key}",
                                          f"expected a {n_states}x{n_states} matrix, got {M.shape}")
            if not is_spd(M):
                raise CaseValidationError(f"optimization.weights.{key}",
                                          "matrix must be symmetric positive-definite")
            mats[key] = tuple(map(tuple, M.tolist()))
    defaults = OptimizationSettings()
    opt = OptimizationSettings(
        kp_lower=tuple(float(v) for v in bounds.get("lower", [0.0] * n_unified)),
        kp_upper=tuple(float(v) for v in bounds.get("upper", [1200.0] * n_unified)),
        epsilon=float(opt_doc.get("epsilon", defaults.epsilon)),
        starts=int(opt_doc.get("starts", defaults.starts)),
        max_outer=int(opt_doc.get("max_outer", defaults.max_outer)),
        seed=int(opt_doc.get("seed", defaults.seed)),
        Q=mats.get("Q"), S=mats.get("S"))
    sim_doc = doc.get("simulation", {})
    sd = SimulationSettings()
    dist = Disturbance(**{k: v for k, v in sim_doc.get("disturbance", {}).items()})
    sim = SimulationSettings(horizon=float(sim_doc.get("horizon", sd.horizon)),
                             tol=float(sim_doc.get("tol", sd.tol)),
                             h_min=float(sim_doc.get("h_min", sd.h_min)),
                             h_max=float(sim_doc.get("h_max", sd.h_max)),
                             disturbance=dist)
    slack = SlackParams(**{k: float(v) for k, v in doc.get("slack", {}).items()})
    case = NetworkCase(n_buses=int(doc["buses"]["count"]), slack_bus=int(doc["buses"]["slack"]),
                       lines=lines, devices=tuple(devices), slack=slack,
                       optimization=opt, simulation=sim, name=doc.get("name", ""))
    case.validate()
    if dist.bus not in {d.bus for d in devices} and devices:
        raise CaseValidationError("simulation.disturbance.bus", f"bus {dist.bus} has no device")
    if devices:
        target = next((d for d in devices if d.bus == dist.bus), None)
        if target and dist.param not in {f.name for f in fields(target.params)}:
            raise CaseValidationError("simulation.disturbance.param",
                                      f"unknown parameter {dist.param!r} for a {target.kind} device")
    return case


def load_case(text):
    """Parse case text into a validated :class:`NetworkCase`."""
    return case_from_document(parse_text(text))


def load_case_file(path):
    with open(path, encoding="utf-8") as fh:
        return load_case(fh.read())


def document_from_case(case):
    """Inverse of :func:`case_from_document`, listing only non-default parameters."""
    devs = []
    for d in case.devices:
        defaults = default_params(d.kind)
        entry = {"bus": d.bus, "kind": d.kind, "p_star": d.params.p_star, "q_star": d.params.q_star}
        over = {f.name: getattr(d.params, f.name) for f in fields(d.params)
                if f.name not in ("p_star", "q_star")
                and getattr(d.params, f.name) != getattr(defaults, f.name)}
        if over:
            entry["params"] = over
        devs.append(entry)
    opt = case.optimization
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": case.name,
        "buses": {"count": case.n_buses, "slack": case.slack_bus},
        "slack": {"v_D": case.slack.v_D, "v_Q": case.slack.v_Q},
        "lines": [{"from": ln.from_bus, "to": ln.to_bus, "conductance": ln.y.real,
                   "susceptance": ln.y.imag} for ln in case.lines],
        "devices": devs,
        "simulation": {
            "horizon": case.simulation.horizon, "tol": case.simulation.tol,
            "h_min": case.simulation.h_min, "h_max": case.simulation.h_max,
            "disturbance": {"bus": case.simulation.disturbance.bus,
                            "param": case.simulation.disturbance.param,
                            "delta": case.simulation.disturbance.delta,
                            "time": case.simulation.disturbance.time},
        },
    }
    if case.unified_devices():
        block = {"bounds": {"lower": list(opt.kp_lower), "upper": list(opt.kp_upper)},
                 "epsilon": opt.epsilon, "starts": opt.starts, "max_outer": opt.max_outer,
                 "seed": opt.seed}
        w = {k: [list(r) for r in getattr(opt, k)] for k in ("Q", "S") if getattr(opt, k) is not None}
        if w:
            block["weights"] = w
        doc["optimization"] = block
    return doc


def serialize(case_or_doc):
    """Canonical YAML text: sorted keys, shortest round-tripping floats."""
    doc = case_or_doc if isinstance(case_or_doc, dict) else document_from_case(case_or_doc)
    return yaml.safe_dump(doc, sort_keys=True, default_flow_style=None, width=100,
                          allow_unicode=True)
