"""Versioned JSON and CSV serialization.

Every emitted file carries ``"format": "np-ratelab/v1"``.  Distribution
masses travel as decimal strings with 17 significant digits, which round-trip
binary doubles exactly; other numbers use Python's shortest round-trip float
representation.  Serialization is canonical (sorted keys, fixed separators)
so identical values produce identical bytes.
"""

from __future__ import annotations

import json
from typing import Any, TextIO

from .space import Distribution, FiniteSpace, Hypothesis, HypothesisClass

FORMAT = "np-ratelab/v1"


def fmt17(x: float) -> str:
    return format(float(x), ".17g")


def dumps_canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def distribution_to_json(d: Distribution) -> list[str]:
    return [fmt17(x) for x in d.mass]


def distribution_from_json(masses: list[str | float]) -> Distribution:
    return Distribution(tuple(float(x) for x in masses))


def instance_to_json_dict(
    space: FiniteSpace,
    hclass: HypothesisClass,
    distributions: dict[str, Distribution] | None = None,
) -> dict:
    out: dict[str, Any] = {
        "format": FORMAT,
        "atoms": list(space.atoms),
        "hypotheses": [list(h.bits()) for h in hclass],
    }
    if distributions:
        out["distributions"] = {
            name: distribution_to_json(d) for name, d in distributions.items()
        }
    return out


def instance_from_json_dict(
    d: dict,
) -> tuple[FiniteSpace, HypothesisClass, dict[str, Distribution]]:
    if d.get("format") != FORMAT:
        raise ValueError(f"unsupported format {d.get('format')!r}; expected {FORMAT}")
    space = FiniteSpace(tuple(str(a) for a in d["atoms"]))
    hclass = HypothesisClass(
        tuple(Hypothesis.from_bits([int(b) for b in bits]) for bits in d["hypotheses"])
    )
    if hclass.m != space.m:
        raise ValueError("hypothesis bit arrays do not match the atom count")
    dists = {
        name: distribution_from_json(masses)
        for name, masses in d.get("distributions", {}).items()
    }
    for dist in dists.values():
        if dist.m != space.m:
            raise ValueError("distribution length does not match the atom count")
    return space, hclass, dists


def mass_file_to_distribution(d: dict) -> Distribution:
    if d.get("format") != FORMAT:
        raise ValueError(f"unsupported format {d.get('format')!r}; expected {FORMAT}")
    return distribution_from_json(d["mass"])


def distribution_to_mass_file(dist: Distribution) -> dict:
    return {"format": FORMAT, "mass": distribution_to_json(dist)}


def write_rate_csv(fh: TextIO, per_n) -> None:
    fh.write("n,mean_score,stderr,feasibility_freq\n")
    for p in per_n:
        fh.write(
            f"{p.n},{fmt17(p.mean_score)},{fmt17(p.stderr)},{fmt17(p.feasibility_freq)}\n"
        )
