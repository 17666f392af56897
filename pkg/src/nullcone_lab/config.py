"""Scenario configuration: a small indented key-tree text format.

The same format serves config files and the self-describing headers of the
binary containers: ``key: value`` lines, two-space indentation for nesting,
comma-separated scalars for lists.  Parsing and printing round-trip
deterministically, and the manifest records a hash of the canonical dump.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .errors import ConfigError

__all__ = ["ScenarioConfig", "parse_keytree", "dump_keytree", "config_hash"]


def _scalar(text):
    t = text.strip()
    if t.lower() in ("true", "false"):
        return t.lower() == "true"
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        pass
    return t


def parse_keytree(text):
    """Parse the indented key: value format into nested dicts."""
    root: dict = {}
    stack = [(-1, root)]
    for ln, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip(" "))
        if indent % 2:
            raise ConfigError(f"line {ln}: odd indentation")
        if ":" not in raw:
            raise ConfigError(f"line {ln}: expected 'key: value'")
        key, _, val = raw.strip().partition(":")
        key = key.strip()
        val = val.strip()
        while stack and indent <= stack[-1][0]:
            stack.pop()
        parent = stack[-1][1]
        if not val:
            child: dict = {}
            parent[key] = child
            stack.append((indent, child))
        elif "," in val:
            parent[key] = [_scalar(v) for v in val.split(",") if v.strip()]
        else:
            parent[key] = _scalar(val)
    return root


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_keytree(tree, indent=0):
    lines = []
    for key in sorted(tree):
        val = tree[key]
        pad = " " * indent
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.append(dump_keytree(val, indent + 2))
        elif isinstance(val, (list, tuple)):
            lines.append(f"{pad}{key}: " + ",".join(_fmt(v) for v in val))
        else:
            lines.append(f"{pad}{key}: {_fmt(val)}")
    return "\n".join(lines)


def config_hash(tree):
    return hashlib.sha256(dump_keytree(tree).encode()).hexdigest()[:16]


_DEFAULTS = {
    "metric": {"preset": "minkowski", "params": {}},
    "lambdas": [16.0, 32.0, 64.0, 128.0, 256.0],
    "grid": {"n_omega": 16, "dt": 2e-3, "s0": 1e-3, "du_factor": 4.0},
    "t_star": 0.5,
    "u_values": [0.0],
    "analysis_times": [0.3, 0.45],
    "checks": ["transport", "elliptic", "commutation", "mass_aspect",
               "comparisons"],
    "tolerances": {"identity": 1e-5, "transport": 1e-4},
    "synthetic": {"gamma": 1.0, "amplitude": 1e-2, "seed": 7},
    "seed": 0,
    "jobs": 1,
    "out": "out",
}

_KNOWN_CHECKS = {"transport", "elliptic", "commutation", "mass_aspect",
                 "comparisons", "curvature", "energy"}


def _merge(defaults, override, path=""):
    out = {}
    for k, v in defaults.items():
        if k in override:
            ov = override[k]
            if isinstance(v, dict):
                if not isinstance(ov, dict):
                    raise ConfigError(f"{path}{k}: expected a section")
                out[k] = _merge(v, ov, path=f"{path}{k}.")
            else:
                out[k] = ov if not isinstance(ov, dict) else ov
        else:
            out[k] = v
    unknown = set(override) - set(defaults)
    if unknown and path != "metric.params.":
        raise ConfigError(f"unknown config keys: {sorted(path + k for k in unknown)}")
    return out


@dataclass
class ScenarioConfig:
    tree: dict = field(default_factory=dict)

    @classmethod
    def defaults(cls):
        import copy

        return cls(copy.deepcopy(_DEFAULTS))

    @classmethod
    def from_text(cls, text):
        parsed = parse_keytree(text)
        import copy

        defaults = copy.deepcopy(_DEFAULTS)
        # metric params are provider-specific, pass them through unchecked
        params = parsed.get("metric", {}).pop("params", None) if "metric" in parsed else None
        merged = _merge(defaults, parsed)
        if params is not None:
            merged["metric"]["params"] = params
        cfg = cls(merged)
        cfg.validate()
        return cfg

    def validate(self):
        t = self.tree
        if not isinstance(t["u_values"], list):
            t["u_values"] = [t["u_values"]]
        if not isinstance(t["analysis_times"], list):
            t["analysis_times"] = [t["analysis_times"]]
        if not isinstance(t["checks"], list):
            t["checks"] = [t["checks"]]
        if not isinstance(t["lambdas"], list):
            t["lambdas"] = [t["lambdas"]]
        bad = set(t["checks"]) - _KNOWN_CHECKS
        if bad:
            raise ConfigError(f"unknown checks: {sorted(bad)}")
        for name, tol in t["tolerances"].items():
            if not tol > 0:
                raise ConfigError(f"tolerance {name} must be positive")
        if max(t["analysis_times"]) > t["t_star"]:
            raise ConfigError("analysis_times exceed t_star")
        return self

    def dump(self):
        return dump_keytree(self.tree) + "\n"

    def hash(self):
        return config_hash(self.tree)

    def provider(self):
        from .spacetime.providers import get_preset

        m = self.tree["metric"]
        name = m.get("preset", "minkowski")
        params = dict(m.get("params", {}))
        if name == "synthetic":
            params = dict(self.tree["synthetic"])
        return get_preset(name, **params)
