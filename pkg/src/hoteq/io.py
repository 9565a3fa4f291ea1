"""JSON instance and result files (format version 1)."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .core import FiniteSet, HoteqError, Instance, Interval, Voters, parse_rational, render

FORMAT_VERSION = 1


class FormatError(HoteqError):
    """Malformed instance or result document; the message names the field."""


def _rat(value, where: str):
    if not isinstance(value, str):
        raise FormatError(f"{where}: expected a rational string, got {value!r}")
    try:
        return parse_rational(value, strict=True)
    except HoteqError as exc:
        raise FormatError(f"{where}: {exc}") from None


def _get(doc: dict, key: str, where: str):
    if not isinstance(doc, dict):
        raise FormatError(f"{where}: expected an object")
    if key not in doc:
        raise FormatError(f"{where}.{key}: missing")
    return doc[key]


def _loads(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def instance_from_dict(doc) -> tuple:
    """Return ``(instance, extras)``; extras holds optional profile and delta."""
    version = _get(doc, "version", "instance")
    if version != FORMAT_VERSION:
        raise FormatError(f"instance.version: unsupported version {version!r}")
    m = _get(doc, "m", "instance")
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise FormatError(f"instance.m: expected a positive integer, got {m!r}")
    space_doc = _get(doc, "space", "instance")
    kind = _get(space_doc, "type", "instance.space")
    if kind == "finite":
        raw = _get(space_doc, "positions", "instance.space")
        if not isinstance(raw, list):
            raise FormatError("instance.space.positions: expected a list")
        pts = [_rat(p, f"instance.space.positions[{i}]") for i, p in enumerate(raw)]
        try:
            space = FiniteSet(tuple(pts))
        except HoteqError as exc:
            raise FormatError(f"instance.space.positions: {exc}") from None
    elif kind == "interval":
        R = _rat(_get(space_doc, "R", "instance.space"), "instance.space.R")
        try:
            space = Interval(R)
        except HoteqError as exc:
            raise FormatError(f"instance.space.R: {exc}") from None
    else:
        raise FormatError(f"instance.space.type: unknown space type {kind!r}")

    vdoc = _get(doc, "voters", "instance")
    if not isinstance(vdoc, dict):
        raise FormatError("instance.voters: expected an object")
    atoms, density = [], []
    for i, a in enumerate(vdoc.get("atoms", [])):
        where = f"instance.voters.atoms[{i}]"
        atoms.append((_rat(_get(a, "pos", where), where + ".pos"),
                      _rat(_get(a, "weight", where), where + ".weight")))
    for i, d in enumerate(vdoc.get("density", [])):
        where = f"instance.voters.density[{i}]"
        density.append((_rat(_get(d, "x", where), where + ".x"),
                        _rat(_get(d, "f", where), where + ".f")))
    try:
        voters = Voters(tuple(atoms), tuple(density))
    except HoteqError as exc:
        raise FormatError(f"instance.voters: {exc}") from None
    M = doc.get("M")
    M = None if M is None else _rat(M, "instance.M")
    try:
        inst = Instance(space, voters, m, M)
    except HoteqError as exc:
        raise FormatError(f"instance: {exc}") from None

    extras = {}
    if "profile" in doc:
        raw = doc["profile"]
        if not isinstance(raw, list):
            raise FormatError("instance.profile: expected a list")
        extras["profile"] = tuple(_rat(p, f"instance.profile[{i}]") for i, p in enumerate(raw))
    if "delta" in doc:
        extras["delta"] = _rat(doc["delta"], "instance.delta")
    return inst, extras


def instance_to_dict(inst: Instance, profile=None, delta=None) -> dict:
    if isinstance(inst.space, FiniteSet):
        space = {"type": "finite", "positions": [render(p) for p in inst.space.positions]}
    else:
        space = {"type": "interval", "R": render(inst.space.R)}
    voters = {}
    if inst.voters.atoms:
        voters["atoms"] = [{"pos": render(p), "weight": render(w)} for p, w in inst.voters.atoms]
    if inst.voters.density:
        voters["density"] = [{"x": render(x), "f": render(f)} for x, f in inst.voters.density]
    doc = {"version": FORMAT_VERSION, "m": inst.m, "space": space, "voters": voters}
    if inst.M is not None:
        doc["M"] = render(inst.M)
    if profile is not None:
        doc["profile"] = [render(p) for p in profile]
    if delta is not None:
        doc["delta"] = render(delta)
    return doc


def fixture_names() -> list:
    root = resources.files("hoteq") / "fixtures"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def read_fixture(name: str) -> str:
    if not name.endswith(".json"):
        name += ".json"
    path = resources.files("hoteq") / "fixtures" / name
    if not path.is_file():
        raise FormatError(f"no shipped fixture named {name!r}")
    return path.read_text()


def load_instance(source) -> tuple:
    """Load from a path, or from a shipped fixture name such as ``fig1.json``."""
    path = Path(source)
    if path.is_file():
        text = path.read_text()
    else:
        try:
            text = read_fixture(str(source))
        except FormatError:
            raise FormatError(f"{source}: no such file or shipped fixture") from None
    return instance_from_dict(_loads(text, str(source)))


def loads_instance(text: str) -> tuple:
    return instance_from_dict(_loads(text, "<string>"))


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


# -- results ----------------------------------------------------------------------

RESULT_STATUSES = ("equilibrium", "eps_equilibrium", "none", "error")


def make_result(command: str, status: str, **fields) -> dict:
    if status not in RESULT_STATUSES:
        raise ValueError(f"unknown status {status!r}")
    doc = {"version": FORMAT_VERSION, "command": command, "status": status}
    for key, value in fields.items():
        if value is not None:
            doc[key] = value
    return doc


def parse_result(text: str) -> dict:
    """Parse a result document and check its rational fields."""
    doc = _loads(text, "<result>")
    if _get(doc, "version", "result") != FORMAT_VERSION:
        raise FormatError("result.version: unsupported version")
    if _get(doc, "status", "result") not in RESULT_STATUSES:
        raise FormatError(f"result.status: unknown status {doc['status']!r}")
    for key in ("profile", "utilities"):
        if key in doc:
            doc[key] = [_rat(x, f"result.{key}[{i}]") for i, x in enumerate(doc[key])]
    return doc
