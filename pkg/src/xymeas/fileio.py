"""Plain-text artifact files: counts, probability tables, measurement dumps, reports.

One line-oriented format serves every artifact. A document starts with
header lines ``key: value`` and continues with sections, each introduced by
``[name]`` and holding whitespace-separated token rows:

    schema: xymeas-counts/1
    command: simulate
    mode: pair
    ...
    [counts]
    +1 +1 +1 +1 62503

Floats are serialized with 17 significant digits so they round-trip
losslessly; outcome signs are written ``+1`` / ``-1``. Schema identifiers:

* ``xymeas-counts/1``: eigenstate or pair run counts plus the run parameters.
* ``xymeas-probs/1``: exact single-qubit outcome probability table, with an
  optional ``state`` label naming the input.
* ``xymeas-povm/1``: visibilities plus the four operators entry by entry.
* ``xymeas-report/1``: estimation or reconstruction results.
* ``xymeas-manifest/1``: command, timestamp, tool version, artifact names,
  and the full parameter echo of the run that produced them.

Result files never contain timestamps (identical runs are byte-identical);
the manifest, written next to each result file, carries the timestamp and
is referenced from the result's ``manifest`` header key.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__ as _tool_version
from .povm import OUTCOMES4, OUTCOMES16, VisibilityTriple
from .simulate import ExperimentConfig, OutcomeCounts4, PairCounts16

SCHEMA_COUNTS = "xymeas-counts/1"
SCHEMA_PROBS = "xymeas-probs/1"
SCHEMA_POVM = "xymeas-povm/1"
SCHEMA_REPORT = "xymeas-report/1"
SCHEMA_MANIFEST = "xymeas-manifest/1"

STATE_LABELS = ("Z+", "Z-", "X+", "X-", "Y+", "Y-", "mixed")


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def fmt_sign(v: int) -> str:
    return "+1" if v == +1 else "-1"


def parse_sign(token: str) -> int:
    if token in ("+1", "1"):
        return +1
    if token == "-1":
        return -1
    raise ValueError(f"expected +1 or -1, got {token!r}")


def fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def parse_bool(token: str) -> bool:
    if token == "true":
        return True
    if token == "false":
        return False
    raise ValueError(f"expected true or false, got {token!r}")


@dataclass
class Document:
    """Parsed or to-be-written artifact file."""

    header: dict[str, str] = field(default_factory=dict)
    sections: dict[str, list[tuple[str, ...]]] = field(default_factory=dict)

    def require(self, key: str) -> str:
        if key not in self.header:
            raise ValueError(f"missing header key {key!r}")
        return self.header[key]

    def section(self, name: str) -> list[tuple[str, ...]]:
        if name not in self.sections:
            raise ValueError(f"missing section [{name}]")
        return self.sections[name]

    def section_value(self, name: str, key: str) -> str:
        for row in self.section(name):
            if row and row[0] == key:
                return row[1]
        raise ValueError(f"missing entry {key!r} in section [{name}]")


def write_document(path: str | Path, doc: Document) -> None:
    lines = [f"{key}: {value}" for key, value in doc.header.items()]
    for name, rows in doc.sections.items():
        lines.append(f"[{name}]")
        lines.extend(" ".join(row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_document(path: str | Path) -> Document:
    doc = Document()
    current: list[tuple[str, ...]] | None = None
    for lineno, raw in enumerate(Path(path).read_text(encoding="ascii").splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1]
            current = doc.sections.setdefault(name, [])
        elif current is None:
            key, sep, value = line.partition(":")
            if not sep:
                raise ValueError(f"{path}:{lineno}: malformed header line {raw!r}")
            doc.header[key.strip()] = value.strip()
        else:
            current.append(tuple(line.split()))
    if "schema" not in doc.header:
        raise ValueError(f"{path}: missing schema header")
    return doc


def expect_schema(doc: Document, schema: str, path: str | Path) -> None:
    found = doc.require("schema")
    if found != schema:
        raise ValueError(f"{path}: expected schema {schema}, found {found}")


# -- manifests ---------------------------------------------------------------


def write_manifest(
    path: str | Path,
    command: str,
    parameters: dict[str, str],
    artifacts: list[str],
    timestamp: int | None = None,
) -> None:
    doc = Document(
        header={
            "schema": SCHEMA_MANIFEST,
            "command": command,
            "timestamp_utc": str(int(time.time()) if timestamp is None else timestamp),
            "tool_version": _tool_version,
        },
        sections={
            "artifacts": [(name,) for name in artifacts],
            "parameters": [(key, value) for key, value in parameters.items()],
        },
    )
    write_document(path, doc)


# -- counts ------------------------------------------------------------------


def _config_header(config: ExperimentConfig) -> dict[str, str]:
    return {
        "vx": fmt_float(config.visibilities.vx),
        "vy": fmt_float(config.visibilities.vy),
        "vz": fmt_float(config.visibilities.vz),
        "shots": str(config.shots),
        "seed": str(config.seed),
        "randomize_flips": fmt_bool(config.randomize_flips),
    }


def write_eigenstate_counts(
    path: str | Path, counts: OutcomeCounts4, config: ExperimentConfig, manifest_name: str
) -> None:
    header = {
        "schema": SCHEMA_COUNTS,
        "command": "simulate",
        "manifest": manifest_name,
        "mode": "eigenstate",
        "axis": counts.input_axis,
        "value": fmt_sign(counts.input_value),
    }
    header.update(_config_header(config))
    rows = [
        (fmt_sign(x), fmt_sign(y), str(counts.counts[(x, y)])) for x, y in OUTCOMES4
    ]
    write_document(path, Document(header=header, sections={"counts": rows}))


def write_pair_counts(
    path: str | Path, counts: PairCounts16, config: ExperimentConfig, manifest_name: str
) -> None:
    header = {
        "schema": SCHEMA_COUNTS,
        "command": "simulate",
        "manifest": manifest_name,
        "mode": "pair",
    }
    header.update(_config_header(config))
    header["werner_p"] = fmt_float(config.werner_p)
    rows = [
        (
            fmt_sign(x1),
            fmt_sign(y1),
            fmt_sign(x2),
            fmt_sign(y2),
            str(counts.counts[(x1, y1, x2, y2)]),
        )
        for x1, y1, x2, y2 in OUTCOMES16
    ]
    write_document(path, Document(header=header, sections={"counts": rows}))


@dataclass(frozen=True)
class CountsArtifact:
    """A counts file plus the run parameters recorded with it."""

    mode: str  # "eigenstate" or "pair"
    eigenstate_counts: OutcomeCounts4 | None
    pair_counts: PairCounts16 | None
    visibilities: VisibilityTriple | None
    werner_p: float | None
    path: str


def read_counts_file(path: str | Path) -> CountsArtifact:
    doc = read_document(path)
    expect_schema(doc, SCHEMA_COUNTS, path)
    mode = doc.require("mode")
    visibilities = None
    if all(k in doc.header for k in ("vx", "vy", "vz")):
        visibilities = VisibilityTriple(
            float(doc.header["vx"]), float(doc.header["vy"]), float(doc.header["vz"])
        )
    if mode == "eigenstate":
        rows = doc.section("counts")
        counts = {}
        for row in rows:
            if len(row) != 3:
                raise ValueError(f"{path}: malformed eigenstate counts row {row!r}")
            counts[(parse_sign(row[0]), parse_sign(row[1]))] = int(row[2])
        obj = OutcomeCounts4(
            counts=counts,
            total=sum(counts.values()),
            input_axis=doc.require("axis"),
            input_value=parse_sign(doc.require("value")),
        )
        return CountsArtifact(
            mode=mode,
            eigenstate_counts=obj,
            pair_counts=None,
            visibilities=visibilities,
            werner_p=None,
            path=str(path),
        )
    if mode == "pair":
        rows = doc.section("counts")
        counts = {}
        for row in rows:
            if len(row) != 5:
                raise ValueError(f"{path}: malformed pair counts row {row!r}")
            key = tuple(parse_sign(t) for t in row[:4])
            counts[key] = int(row[4])
        obj = PairCounts16(counts=counts, total=sum(counts.values()))
        werner_p = float(doc.header["werner_p"]) if "werner_p" in doc.header else None
        return CountsArtifact(
            mode=mode,
            eigenstate_counts=None,
            pair_counts=obj,
            visibilities=visibilities,
            werner_p=werner_p,
            path=str(path),
        )
    raise ValueError(f"{path}: unknown counts mode {mode!r}")


# -- exact probability tables --------------------------------------------------


def write_probs_file(
    path: str | Path,
    probs: dict[tuple[int, int], float],
    state: str | None = None,
    manifest_name: str | None = None,
) -> None:
    header = {"schema": SCHEMA_PROBS}
    if manifest_name is not None:
        header["manifest"] = manifest_name
    if state is not None:
        if state not in STATE_LABELS:
            raise ValueError(f"unknown state label {state!r}, expected one of {STATE_LABELS}")
        header["state"] = state
    rows = [(fmt_sign(x), fmt_sign(y), fmt_float(probs[(x, y)])) for x, y in OUTCOMES4]
    write_document(path, Document(header=header, sections={"probs": rows}))


def read_probs_file(path: str | Path) -> tuple[dict[tuple[int, int], float], str | None]:
    doc = read_document(path)
    expect_schema(doc, SCHEMA_PROBS, path)
    probs = {}
    for row in doc.section("probs"):
        if len(row) != 3:
            raise ValueError(f"{path}: malformed probability row {row!r}")
        probs[(parse_sign(row[0]), parse_sign(row[1]))] = float(row[2])
    if set(probs) != set(OUTCOMES4):
        raise ValueError(f"{path}: probability table must cover the four outcomes")
    return probs, doc.header.get("state")


def named_state_density(label: str):
    """Density matrix of a state label used in probability files."""
    from .qubit import density, eigenstate, identity

    if label == "mixed":
        return identity(2) / 2.0
    if label in STATE_LABELS:
        return density(eigenstate(label[0], +1 if label[1] == "+" else -1))
    raise ValueError(f"unknown state label {label!r}")


# -- measurement dumps ---------------------------------------------------------


def write_povm_file(path: str | Path, povm, manifest_name: str) -> None:
    v = povm.visibilities
    header = {
        "schema": SCHEMA_POVM,
        "command": "build-povm",
        "manifest": manifest_name,
        "vx": fmt_float(v.vx),
        "vy": fmt_float(v.vy),
        "vz": fmt_float(v.vz),
    }
    rows = []
    for x, y in OUTCOMES4:
        el = povm.elements[(x, y)]
        for i in range(2):
            for j in range(2):
                rows.append(
                    (
                        fmt_sign(x),
                        fmt_sign(y),
                        str(i),
                        str(j),
                        fmt_float(el[i, j].real),
                        fmt_float(el[i, j].imag),
                    )
                )
    write_document(path, Document(header=header, sections={"elements": rows}))


def read_povm_file(path: str | Path):
    import numpy as np

    doc = read_document(path)
    expect_schema(doc, SCHEMA_POVM, path)
    v = VisibilityTriple(
        float(doc.require("vx")), float(doc.require("vy")), float(doc.require("vz"))
    )
    elements = {o: np.zeros((2, 2), dtype=complex) for o in OUTCOMES4}
    for row in doc.section("elements"):
        if len(row) != 6:
            raise ValueError(f"{path}: malformed element row {row!r}")
        x, y = parse_sign(row[0]), parse_sign(row[1])
        i, j = int(row[2]), int(row[3])
        elements[(x, y)][i, j] = complex(float(row[4]), float(row[5]))
    return v, elements
