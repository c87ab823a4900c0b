"""Reading strict-order election files and serialising library objects.

The input format follows PrefLib's ``.soc`` convention::

    # DATA TYPE: soc
    # NUMBER ALTERNATIVES: 3
    # ALTERNATIVE NAME 1: Alice
    2: 1,2,3
    1: 3,2,1

Alternatives are 1-based in files and 0-based in memory. CSV numbers are
written with 17 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, ParseError
from .plurality import PluralityMatrix
from .prefcore import AlternativeSet, ExactProfile, Profile, RankMarginalProfile, SampledProfile

_META = re.compile(r"#\s*([^:]+?)\s*:\s*(.*)$")
_ALT_NAME = re.compile(r"ALTERNATIVE NAME\s+(\d+)", re.IGNORECASE)


def fmt(x) -> str:
    """17-significant-digit text for floats, plain text otherwise."""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


@dataclass(frozen=True)
class ElectionFile:
    metadata: dict
    names: tuple
    ballots: tuple  # (count, ranking) pairs, 0-based


def read_election(text: str) -> ElectionFile:
    """Parse ``.soc`` text into metadata and ballots, validating every line."""
    metadata: dict = {}
    names: dict = {}
    ballots = []
    m = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            hit = _META.match(line)
            if hit:
                key, value = hit.group(1).strip(), hit.group(2).strip()
                metadata[key] = value
                alt = _ALT_NAME.fullmatch(key)
                if alt:
                    names[int(alt.group(1))] = value
                elif key.upper() == "NUMBER ALTERNATIVES":
                    m = _int(value, lineno, "alternative count")
                elif key.upper() == "DATA TYPE" and value.lower() != "soc":
                    raise ParseError(f"data type {value!r} is not supported; only complete strict orders (soc)", lineno)
            continue
        if "{" in line or "}" in line:
            raise ParseError("ballot contains a tie", lineno)
        if ":" not in line:
            raise ParseError("expected 'count: i1,i2,...'", lineno)
        head, tail = line.split(":", 1)
        count = _count(head.strip(), lineno)
        items = [t.strip() for t in tail.split(",")]
        if any(not t for t in items):
            raise ParseError("empty alternative in ballot", lineno)
        order = [_int(t, lineno, "alternative") - 1 for t in items]
        if len(set(order)) != len(order):
            raise ParseError("ballot lists an alternative twice", lineno)
        if m is None:
            m = len(order)
        if any(not 0 <= x < m for x in order):
            raise ParseError(f"alternative out of range 1..{m}", lineno)
        if len(order) != m:
            raise ParseError(f"incomplete ballot: {len(order)} of {m} alternatives", lineno)
        ballots.append((count, tuple(order)))
    if not ballots:
        raise ParseError("no ballots found (empty profile)")
    labels = tuple(names.get(i + 1, str(i + 1)) for i in range(m)) if names else None
    return ElectionFile(metadata, labels, tuple(ballots))


def _int(text, lineno, what) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"invalid {what} {text!r}", lineno) from None


def _count(text, lineno):
    try:
        value = int(text)
    except ValueError:
        try:
            value = float(text)
        except ValueError:
            raise ParseError(f"invalid ballot count {text!r}", lineno) from None
    if not value > 0:
        raise ParseError("ballot count must be positive", lineno)
    return value


def parse_soc(text: str) -> SampledProfile:
    """Sampled profile with one row per ballot line, weighted by its count."""
    election = read_election(text)
    rankings = np.array([r for _, r in election.ballots], dtype=np.int64)
    weights = np.array([c for c, _ in election.ballots], dtype=float)
    alts = AlternativeSet(election.names) if election.names else None
    return SampledProfile(rankings, weights, alts)


def write_soc(profile: SampledProfile) -> str:
    m = profile.m
    lines = ["# DATA TYPE: soc", f"# NUMBER ALTERNATIVES: {m}"]
    lines += [f"# ALTERNATIVE NAME {i + 1}: {profile.alternatives.label(i)}" for i in range(m)]
    for w, r in zip(profile.weights, profile.rankings):
        count = int(w) if float(w).is_integer() else fmt(float(w))
        lines.append(f"{count}: " + ",".join(str(int(x) + 1) for x in r))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON / CSV


def profile_to_dict(profile: Profile) -> dict:
    labels = list(profile.alternatives.labels)
    if isinstance(profile, RankMarginalProfile):
        return {"kind": "rank_marginal", "labels": labels, "focal": profile.focal, "w": profile.w.tolist()}
    if isinstance(profile, ExactProfile):
        return {"kind": "exact", "labels": labels, "rankings": profile.rankings.tolist(), "probs": profile.probs.tolist()}
    return {"kind": "sampled", "labels": labels, "rankings": profile.rankings.tolist(), "weights": profile.weights.tolist()}


def profile_from_dict(d: dict) -> Profile:
    alts = AlternativeSet(tuple(d["labels"])) if d.get("labels") else None
    kind = d.get("kind")
    if kind == "rank_marginal":
        return RankMarginalProfile(int(d["focal"]), d["w"], alts)
    if kind == "exact":
        return ExactProfile(np.array(d["rankings"]), np.array(d["probs"]), alts)
    if kind == "sampled":
        return SampledProfile(np.array(d["rankings"]), np.array(d["weights"]), alts)
    raise ParseError(f"unknown profile kind {kind!r}")


def matrix_to_dicts(matrix: PluralityMatrix) -> list[dict]:
    out = []
    for k in matrix.degrees:
        entries = [
            {"set": list(S), "alt": a, "p": p, "count": c}
            for S, a, p, c in matrix.entries(k)
        ]
        out.append({"m": matrix.m, "degree": k, "entries": entries})
    return out


def matrix_from_dicts(blocks, provenance: str | None = None) -> PluralityMatrix:
    if isinstance(blocks, dict):
        blocks = [blocks]
    if not blocks:
        raise ParseError("no matrix blocks")
    m = int(blocks[0]["m"])
    slices: dict = {}
    counts: dict = {}
    have_counts = True
    for block in blocks:
        k = int(block["degree"])
        for e in block["entries"]:
            S = tuple(int(x) for x in e["set"])
            if len(S) != k:
                raise ParseError(f"entry set {S} does not have degree {k}")
            j = S.index(int(e["alt"]))
            slices.setdefault(k, {}).setdefault(S, np.zeros(k))[j] = float(e["p"])
            if e.get("count") is None:
                have_counts = False
            else:
                counts.setdefault(k, {}).setdefault(S, np.zeros(k))[j] = float(e["count"])
    prov = provenance or ("empirical" if have_counts else "exact")
    return PluralityMatrix(m, slices, counts if have_counts else None, prov)


def matrix_to_csv(matrix: PluralityMatrix) -> str:
    rows = [
        {"set": " ".join(map(str, S)), "alt": a, "p": p, "count": "" if c is None else c}
        for k in matrix.degrees
        for S, a, p, c in matrix.entries(k)
    ]
    return rows_to_csv(rows, ["set", "alt", "p", "count"])


def matrix_from_csv(text: str, m: int | None = None) -> PluralityMatrix:
    blocks: dict = {}
    top = 0
    for row in csv.DictReader(io.StringIO(text)):
        S = [int(x) for x in row["set"].split()]
        top = max(top, *S)
        entry = {"set": S, "alt": int(row["alt"]), "p": float(row["p"]), "count": float(row["count"]) if row["count"] else None}
        blocks.setdefault(len(S), []).append(entry)
    m = top + 1 if m is None else m
    return matrix_from_dicts([{"m": m, "degree": k, "entries": e} for k, e in sorted(blocks.items())])


def witness_from_dict(d: dict):
    from .hierarchy import WitnessPair, solve_matching

    w = tuple(Fraction(x) for x in d["w_exact"])
    wp = tuple(Fraction(x) for x in d["w_prime_exact"])
    return WitnessPair(int(d["d"]), w, wp, solve_matching(int(d["d"])), Fraction(d["t"]))


def rows_to_csv(rows: list[dict], columns=None) -> str:
    if columns is None:
        columns = list(dict.fromkeys(k for row in rows for k in row))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: fmt(row.get(c, "")) for c in columns})
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating, Fraction)):
        x = float(x)
        return None if math.isnan(x) else x
    return x


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False)


def _as_plain(entity):
    """Dictionary or list-of-rows form of any exportable object."""
    if isinstance(entity, Profile):
        return profile_to_dict(entity)
    if isinstance(entity, PluralityMatrix):
        blocks = matrix_to_dicts(entity)
        return blocks[0] if len(blocks) == 1 else blocks
    if hasattr(entity, "as_dict"):
        return entity.as_dict()
    if isinstance(entity, (list, tuple)):
        return [e.as_dict() if hasattr(e, "as_dict") else e for e in entity]
    if isinstance(entity, dict):
        return entity
    raise DomainError(f"cannot export {type(entity).__name__}")


def export(entity, format: str = "json") -> str:  # noqa: A002 - public keyword
    """Serialise ``entity`` as ``json`` or ``csv`` text."""
    if format == "json":
        return to_json(_as_plain(entity)) + "\n"
    if format != "csv":
        raise DomainError(f"unknown format {format!r}")
    if isinstance(entity, PluralityMatrix):
        return matrix_to_csv(entity)
    if isinstance(entity, SampledProfile):
        return write_soc(entity)
    plain = _as_plain(entity)
    rows = plain if isinstance(plain, list) else [plain]
    rows = [{k: (json.dumps(_jsonable(v)) if isinstance(v, (list, dict)) else v) for k, v in r.items()} for r in rows]
    return rows_to_csv(rows)


def parse(text: str, kind: str, format: str = "json"):  # noqa: A002
    """Inverse of :func:`export` for profiles, matrices and witnesses."""
    if kind == "profile":
        return parse_soc(text) if format == "csv" else profile_from_dict(json.loads(text))
    if kind == "matrix":
        return matrix_from_csv(text) if format == "csv" else matrix_from_dicts(json.loads(text))
    if kind == "witness":
        return witness_from_dict(json.loads(text))
    raise DomainError(f"unknown kind {kind!r}")
