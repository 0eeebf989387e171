"""Regenerate the bundled toy corpus (src/pubcomm/data/toy.wos and
toy_researcher.wos). Output is a pure function of SEED."""
from __future__ import annotations

from pathlib import Path

import numpy as np

SEED = 2012
N_RECORDS = 200
OUT = Path(__file__).resolve().parents[1] / "src" / "pubcomm" / "data"

AREAS = [
    ("CATALYTIC ALLYLATION", "J CATAL CHEM", ("allylic", "substitution", "palladium", "ligand")),
    ("ASYMMETRIC HYDROGENATION", "ORG SYNTH LETT", ("asymmetric", "hydrogenation", "rhodium", "phosphine")),
    ("NANOPARTICLE CATALYSTS", "NANO MATER CATAL", ("nanoparticle", "support", "gold", "oxidation")),
    ("MECHANISM STUDIES", "J PHYS ORG CHEM", ("kinetic", "isotope", "mechanism", "computational")),
    ("FLOW CHEMISTRY", "CHEM ENG PROCESS", ("continuous", "flow", "reactor", "scale")),
]
AREA_WEIGHTS = np.array([0.30, 0.25, 0.20, 0.15, 0.10])

COUNTRIES = {
    "US": "USA", "CA": "Canada", "DE": "Germany", "GB": "England", "FR": "France",
    "CH": "Switzerland", "CN": "Peoples R China", "JP": "Japan", "KR": "South Korea", "IN": "India",
}
SURNAMES = [
    "SMITH", "MULLER", "WANG", "LI", "ZHANG", "KIM", "LEE", "TANAKA", "SATO", "DUBOIS", "MARTIN",
    "BROWN", "JONES", "SCHMIDT", "FISCHER", "CHEN", "LIU", "PARK", "SUZUKI", "ROSSI", "GARCIA",
    "PATEL", "SINGH", "NGUYEN", "WILSON", "TAYLOR", "WEBER", "MEYER", "YAMAMOTO", "CHOI",
]
INITIALS = "ABCDEFGHJKLMNPRSTW"

# (country, main area, secondary area or None, members)
GROUPS = [
    ("US", 0, None, 6), ("DE", 0, 3, 5), ("CN", 0, None, 6), ("JP", 1, None, 5),
    ("US", 1, 3, 6), ("FR", 1, None, 4), ("KR", 2, None, 5), ("CN", 2, 4, 5),
    ("GB", 3, None, 4), ("CH", 3, 1, 4), ("CA", 4, None, 4), ("IN", 4, 2, 4),
]

# sustained inter-group collaborations (symmetric)
PARTNERS = {0: 4, 4: 0, 1: 9, 9: 1, 2: 7, 7: 2, 3: 6, 6: 3}


def main() -> None:
    rng = np.random.default_rng(SEED)
    groups = []
    used = set()
    for gi, (country, main, second, size) in enumerate(GROUPS):
        members = []
        while len(members) < size:
            name = f"{SURNAMES[rng.integers(len(SURNAMES))]}, {INITIALS[rng.integers(len(INITIALS))]}"
            if name not in used:
                used.add(name)
                members.append(name)
        groups.append({"country": country, "main": main, "second": second, "members": members})

    years = np.sort(rng.choice(np.arange(1996, 2011), size=N_RECORDS, p=_ramp()))
    records = []
    for i, year in enumerate(years):
        gi = int(rng.integers(len(groups)))
        g = groups[gi]
        area = g["main"] if g["second"] is None or rng.random() < 0.7 else g["second"]
        pi = g["members"][0]
        team = [pi] + list(rng.choice(g["members"][1:], size=int(rng.integers(1, 4)), replace=False))
        countries = [g["country"]] * len(team)
        if gi in PARTNERS and rng.random() < 0.2:
            other = groups[PARTNERS[gi]]
            team.append(str(rng.choice(other["members"])))
            countries.append(other["country"])
        elif rng.random() < 0.05:
            other = groups[int(rng.integers(len(groups)))]
            if other is not g:
                team.append(str(rng.choice(other["members"][1:])))
                countries.append(other["country"])
        if rng.random() < 0.3:
            team.append(f"{_visitor_name(i)}, X")
            countries.append(g["country"])
        records.append({
            "ut": f"WOS:{i + 1:012d}", "year": int(year), "area": area, "authors": team,
            "countries": countries, "group": gi,
        })

    text = ["FN Thomson Reuters Web of Science", "VR 1.0"]
    for i, r in enumerate(records):
        text += _record_lines(r, records[:i], rng)
    text.append("EF")
    (OUT / "toy.wos").write_text("\n".join(text) + "\n", "utf-8")

    # one PI's full output: in-corpus papers plus an off-field topic
    pi = groups[0]["members"][0]
    own = [r for r in records if pi in r["authors"]]
    extra = []
    for j in range(6):
        extra.append({"ut": f"WOS:{900000 + j:012d}", "year": 2000 + j, "area": None,
                      "authors": [pi], "countries": ["US"], "group": 0})
    lines = ["FN Thomson Reuters Web of Science", "VR 1.0"]
    for k, r in enumerate(own):
        lines += _record_lines(r, [], rng, self_refs=own[:k])
    for k, r in enumerate(extra):
        lines += _record_lines(r, [], rng, self_refs=extra[:k], off_field=True)
    lines.append("EF")
    (OUT / "toy_researcher.wos").write_text("\n".join(lines) + "\n", "utf-8")


def _visitor_name(i: int) -> str:
    """A distinct letters-only surname per one-time author."""
    letters = ""
    i += 26 * 26
    while i:
        i, r = divmod(i, 26)
        letters = chr(65 + r) + letters
    return "VISITOR" + letters


def _ramp() -> np.ndarray:
    w = np.linspace(1.0, 3.0, 15)
    return w / w.sum()


def _ref_string(r: dict) -> str:
    first = r["authors"][0].replace(",", "")
    journal = AREAS[r["area"]][1] if r["area"] is not None else "J SURF SCI"
    return f"{first}, {r['year']}, {journal}, V{r['year'] - 1990}, P1, {r['ut']}"


def _record_lines(r: dict, earlier: list, rng, self_refs=None, off_field=False) -> list[str]:
    if off_field:
        title = "Surface adsorption of small molecules on metal films " + str(r["year"])
        journal, cat = "J SURF SCI", "Physics"
    else:
        name, journal, words = AREAS[r["area"]]
        picks = rng.choice(words, size=3, replace=False)
        title = f"{picks[0].capitalize()} {picks[1]} in {name.lower()} with {picks[2]} systems"
        cat = "Chemistry"
    refs = []
    if self_refs is not None:
        refs = [_ref_string(s) for s in self_refs[-2:]]
    else:
        same = [e for e in earlier if e["area"] == r["area"] and e["year"] <= r["year"]]
        other = [e for e in earlier if e["area"] != r["area"] and e["year"] <= r["year"]]
        n_same = min(len(same), int(rng.integers(3, 8)))
        if n_same:
            # favour recent work so reference windows fill up over time
            w = np.array([1.0 + (e["year"] - 1990) ** 2 for e in same])
            idx = rng.choice(len(same), size=n_same, replace=False, p=w / w.sum())
            refs += [_ref_string(same[k]) for k in sorted(idx)]
        if other and rng.random() < 0.08:
            refs.append(_ref_string(other[int(rng.integers(len(other)))]))
        for _ in range(int(rng.integers(1, 4))):
            y = int(r["year"] - rng.integers(1, 8))
            refs.append(f"OUTSIDE {chr(65 + int(rng.integers(26)))}, {y}, EXT J, V{y - 1980}, P{int(rng.integers(1, 900))}")
    lines = ["PT J"]
    lines += _tagged("AU", r["authors"])
    lines += _tagged("TI", [title])
    lines += _tagged("SO", [journal])
    addrs = []
    for a, c in zip(r["authors"], r["countries"]):
        addrs.append(f"[{a}] Univ {c} Chem, Dept Chem, City, {COUNTRIES[c]}.")
    lines += _tagged("C1", addrs)
    lines += _tagged("CR", refs)
    lines += _tagged("SC", [cat])
    lines += _tagged("PY", [str(r["year"])])
    lines += _tagged("UT", [r["ut"]])
    lines.append("ER")
    lines.append("")
    return lines


def _tagged(tag: str, values: list[str]) -> list[str]:
    if not values:
        return []
    return [f"{tag} {values[0]}"] + [f"   {v}" for v in values[1:]]


if __name__ == "__main__":
    main()
