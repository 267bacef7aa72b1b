"""File formats and bundled fixtures.

Two line-oriented, human-editable text formats with explicit versions:

Hospital instance (``.hospital``)::

    version 1
    horizon_weeks 52
    resource OT kind=operating_room beds=19 weekly_hours=50
    group CARD published_ub=2420.72
    subtype CARD surgical mix=58.2 ot_hours=3.16 icu_hours=19.85 \
        ward_hours=171.85 wards=3C

Each ``subtype`` row expands into up to three activities: a theatre
activity eligible on every operating-room resource, an intensive-care
activity eligible on every ICU resource, and a ward-stay activity
eligible on the listed wards. A slot with zero hours produces no
activity. Mixes are raw weights; they are renormalized on load (with a
warning when they do not already sum to one).

Archive (``.archive``)::

    version 1
    k 3
    count 30
    labels obj1 obj2 obj3
    generator alg=prcecm01 points=2000 threads=4 stage=50 proximity=0.0 seed=42
    25.0 5.0 87.0
    ...

Coordinates are written with ``repr`` so a save/load round trip is exact
(well beyond the 12 significant digits the format guarantees).
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .archive import Archive
from .cam import Activity, Group, HospitalInstance, InstanceError, Resource, Subtype

CASE_STUDY_FIXTURE = "case_study.hospital"
DEMO30_FIXTURE = "demo30.archive"


class ParseError(ValueError):
    """Schema violation in an instance file (carries line/field context)."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.line_no = line_no


class FormatError(ValueError):
    """Malformed archive file."""


def fixture_path(name: str) -> Path:
    return Path(str(importlib.resources.files("casemix") / "fixtures" / name))


# ---------------------------------------------------------------------------
# hospital instance files
# ---------------------------------------------------------------------------

def _parse_fields(path, line_no, tokens, spec, record):
    """Parse ``key=value`` tokens against {key: (required, converter)}."""
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(path, line_no, f"{record}: expected key=value, got {tok!r}")
        key, _, raw = tok.partition("=")
        if key not in spec:
            raise ParseError(path, line_no, f"{record}: unknown field {key!r}")
        if key in out:
            raise ParseError(path, line_no, f"{record}: duplicate field {key!r}")
        try:
            out[key] = spec[key][1](raw)
        except ValueError:
            raise ParseError(path, line_no, f"{record}: bad value for field {key!r}: {raw!r}")
    for key, (required, _) in spec.items():
        if required and key not in out:
            raise ParseError(path, line_no, f"{record}: missing field {key!r}")
    return out


def load_instance(path) -> tuple[HospitalInstance, list[str]]:
    """Parse and validate an instance file; returns (instance, warnings)."""
    path = Path(path)
    lines = path.read_text().splitlines()

    horizon = None
    resources: list[Resource] = []
    groups: list[Group] = []
    raw_subtypes: list[tuple[int, dict]] = []
    group_of: dict[str, Group] = {}
    version_seen = False

    res_spec = {
        "kind": (False, str),
        "beds": (False, int),
        "weekly_hours": (False, float),
    }
    grp_spec = {"published_ub": (False, float)}
    sub_spec = {
        "mix": (True, float),
        "ot_hours": (False, float),
        "icu_hours": (False, float),
        "ward_hours": (False, float),
        "wards": (False, lambda s: tuple(w for w in s.split(",") if w)),
    }

    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        kind, args = tokens[0], tokens[1:]
        if not version_seen:
            if kind != "version":
                raise ParseError(path, line_no, "file must start with a version line")
            if args != ["1"]:
                raise ParseError(path, line_no, f"unsupported instance schema version {args}")
            version_seen = True
            continue
        if kind == "horizon_weeks":
            if len(args) != 1:
                raise ParseError(path, line_no, "horizon_weeks takes one value")
            try:
                horizon = float(args[0])
            except ValueError:
                raise ParseError(path, line_no, f"bad horizon value {args[0]!r}")
        elif kind == "resource":
            if not args:
                raise ParseError(path, line_no, "resource needs an identifier")
            fields = _parse_fields(path, line_no, args[1:], res_spec, f"resource {args[0]}")
            resources.append(Resource(
                id=args[0],
                kind=fields.get("kind", "other"),
                beds=fields.get("beds", 1),
                weekly_hours=fields.get("weekly_hours", 168.0),
            ))
        elif kind == "group":
            if not args:
                raise ParseError(path, line_no, "group needs an identifier")
            fields = _parse_fields(path, line_no, args[1:], grp_spec, f"group {args[0]}")
            grp = Group(id=args[0], published_ub=fields.get("published_ub"))
            groups.append(grp)
            group_of[grp.id] = grp
        elif kind == "subtype":
            if len(args) < 2:
                raise ParseError(path, line_no, "subtype needs group and subtype identifiers")
            fields = _parse_fields(path, line_no, args[2:], sub_spec,
                                   f"subtype {args[0]}/{args[1]}")
            fields["group"] = args[0]
            fields["name"] = args[1]
            raw_subtypes.append((line_no, fields))
        else:
            raise ParseError(path, line_no, f"unknown record type {kind!r}")

    if not version_seen:
        raise ParseError(path, 1, "empty instance file")
    if horizon is None:
        raise ParseError(path, len(lines) or 1, "missing horizon_weeks record")

    theatre_ids = tuple(r.id for r in resources if r.kind == "operating_room")
    icu_ids = tuple(r.id for r in resources if r.kind == "icu")
    known = {r.id for r in resources}

    for line_no, fields in raw_subtypes:
        gid = fields["group"]
        if gid not in group_of:
            raise ParseError(path, line_no, f"subtype references unknown group {gid!r}")
        activities: list[Activity] = []
        if fields.get("ot_hours", 0.0) > 0:
            if not theatre_ids:
                raise ParseError(path, line_no,
                                 "ot_hours given but no operating_room resource exists")
            activities.append(Activity("theatre", fields["ot_hours"], theatre_ids))
        if fields.get("icu_hours", 0.0) > 0:
            if not icu_ids:
                raise ParseError(path, line_no, "icu_hours given but no icu resource exists")
            activities.append(Activity("intensive_care", fields["icu_hours"], icu_ids))
        if fields.get("ward_hours", 0.0) > 0:
            wards = fields.get("wards", ())
            if not wards:
                raise ParseError(path, line_no, "ward_hours given without a wards list")
            for w in wards:
                if w not in known:
                    raise ParseError(path, line_no, f"unknown ward {w!r}")
            activities.append(Activity("ward_stay", fields["ward_hours"], wards))
        if not activities:
            raise ParseError(path, line_no, "subtype defines no positive-hours activity")
        group_of[gid].subtypes.append(Subtype(fields["name"], activities))
        group_of[gid].mix.append(fields["mix"])

    instance = HospitalInstance(groups=groups, resources=resources, horizon_weeks=horizon)
    try:
        warnings = instance.validate()
    except InstanceError as exc:
        raise ParseError(path, len(lines) or 1, str(exc))
    return instance, warnings


def save_instance(instance: HospitalInstance, path) -> None:
    path = Path(path)
    out = ["# casemix hospital instance", "version 1",
           f"horizon_weeks {instance.horizon_weeks!r}", ""]
    for r in instance.resources:
        out.append(f"resource {r.id} kind={r.kind} beds={r.beds} weekly_hours={r.weekly_hours!r}")
    for g in instance.groups:
        ub = f" published_ub={g.published_ub!r}" if g.published_ub is not None else ""
        out.append("")
        out.append(f"group {g.id}{ub}")
        for p, mu in zip(g.subtypes, g.mix):
            hours = {"theatre": 0.0, "intensive_care": 0.0, "ward_stay": 0.0}
            wards: tuple[str, ...] = ()
            for a in p.activities:
                if a.id not in hours:
                    raise InstanceError(
                        f"cannot serialize bespoke activity {a.id!r}; "
                        "the file schema covers theatre/intensive_care/ward_stay activities"
                    )
                hours[a.id] = a.hours
                if a.id == "ward_stay":
                    wards = a.resources
            fields = [f"mix={mu!r}"]
            if hours["theatre"] > 0:
                fields.append(f"ot_hours={hours['theatre']!r}")
            if hours["intensive_care"] > 0:
                fields.append(f"icu_hours={hours['intensive_care']!r}")
            if hours["ward_stay"] > 0:
                fields.append(f"ward_hours={hours['ward_stay']!r}")
                fields.append(f"wards={','.join(wards)}")
            out.append(f"subtype {g.id} {p.id} " + " ".join(fields))
    path.write_text("\n".join(out) + "\n")


def load_case_study() -> tuple[HospitalInstance, list[str]]:
    return load_instance(fixture_path(CASE_STUDY_FIXTURE))


# ---------------------------------------------------------------------------
# archive files
# ---------------------------------------------------------------------------

def save_archive(archive: Archive, path) -> None:
    path = Path(path)
    lines = ["# casemix archive", "version 1", f"k {archive.k}",
             f"count {len(archive)}", "labels " + " ".join(archive.labels)]
    prov = archive.provenance
    if prov:
        lines.append(
            "generator alg={algorithm} points={points} threads={threads} "
            "stage={stage} proximity={proximity!r} seed={seed}".format(**prov)
        )
    else:
        lines.append("generator none")
    for pt in archive.points_array():
        lines.append(" ".join(repr(float(v)) for v in pt))
    path.write_text("\n".join(lines) + "\n")


def load_archive(path) -> Archive:
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    header = {}
    idx = 0
    for want in ("version", "k", "count", "labels", "generator"):
        if idx >= len(lines):
            raise FormatError(f"{path}: truncated header (missing {want})")
        key, _, rest = lines[idx].partition(" ")
        if key != want:
            raise FormatError(f"{path}: expected {want!r} line, found {key!r}")
        header[key] = rest.strip()
        idx += 1
    if header["version"] != "1":
        raise FormatError(f"{path}: unsupported archive version {header['version']!r}")
    try:
        k = int(header["k"])
        count = int(header["count"])
    except ValueError:
        raise FormatError(f"{path}: non-integer k/count in header")
    labels = header["labels"].split()
    if len(labels) != k:
        raise FormatError(f"{path}: {len(labels)} labels for k={k}")

    provenance = None
    if header["generator"] != "none":
        provenance = {}
        conv = {"alg": ("algorithm", str), "points": ("points", int),
                "threads": ("threads", int), "stage": ("stage", int),
                "proximity": ("proximity", float), "seed": ("seed", int)}
        for tok in header["generator"].split():
            key, _, raw = tok.partition("=")
            if key not in conv:
                raise FormatError(f"{path}: unknown generator field {key!r}")
            name, fn = conv[key]
            try:
                provenance[name] = fn(raw)
            except ValueError:
                raise FormatError(f"{path}: bad generator field {tok!r}")

    body = lines[idx:]
    if len(body) != count:
        raise FormatError(f"{path}: header promises {count} points, file has {len(body)}")
    points = np.zeros((count, k))
    for i, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != k:
            raise FormatError(f"{path}: point {i} has {len(parts)} coordinates, expected {k}")
        try:
            points[i] = [float(v) for v in parts]
        except ValueError:
            raise FormatError(f"{path}: point {i} has a non-numeric coordinate")
        if not np.all(np.isfinite(points[i])):
            raise FormatError(f"{path}: point {i} has a non-finite coordinate")
    archive = Archive.make(points, k=k, labels=labels)
    archive.provenance = provenance
    return archive


def load_demo30() -> Archive:
    return load_archive(fixture_path(DEMO30_FIXTURE))


# ---------------------------------------------------------------------------
# run manifests
# ---------------------------------------------------------------------------

@dataclass
class RunManifest:
    """What a generation run consumed and produced, for later bookkeeping."""

    instance_path: str
    config: dict
    outputs: list[str]
    started: str = ""
    finished: str = ""
    tool_version: str = ""

    @staticmethod
    def now() -> str:
        return datetime.now(timezone.utc).isoformat(timespec="seconds")

    def write(self, path) -> None:
        lines = ["# casemix run manifest", "version 1",
                 f"instance {self.instance_path}"]
        lines += [f"config {key} {value}" for key, value in self.config.items()]
        lines += [f"output {out}" for out in self.outputs]
        lines += [f"started {self.started}", f"finished {self.finished}",
                  f"tool_version {self.tool_version}"]
        Path(path).write_text("\n".join(lines) + "\n")
