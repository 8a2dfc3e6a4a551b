#!/usr/bin/env python3
"""Regenerate crates/core/data/geo.tsv and tld.tsv from GeoNames tables.

Usage: gen_geo.py <geonamescache data dir> <out dir>

Inputs are the countries.json / cities15000.json / cities1000.json tables
shipped with the `geonamescache` Python package (GeoNames, CC-BY 4.0).
"""
import json
import re
import sys
import unicodedata

EXCLUDED_COUNTRIES = {"AN", "AQ", "BV", "CS", "HM", "IO", "TK", "UM", "GS"}
SUB_COUNTRY_TARGET = 4025

# Hand-placed records for the ambiguity cases the resolver is exercised on.
CURATED = [
    ("GB-isle-of-wight", "Isle of Wight", "GB", 50.6938, -1.3047),
    ("US-isle-of-wight-va", "Isle of Wight", "US", 36.9015, -76.7091),
    ("GB-camden", "Camden", "GB", 51.5517, -0.1588),
    ("AU-camden-nsw", "Camden", "AU", -34.0544, 150.6958),
]
RESERVED = {"isle of wight", "camden", "wight"}

# City names that are also everyday English words or news vocabulary.
COMMON_WORDS = {
    "of", "male", "nice", "split", "mobile", "reading", "orange", "victoria",
    "florida", "police", "bar", "van", "hit", "sale", "bury", "wells", "march",
    "deal", "mission", "independence", "industry", "union", "commerce", "paradise",
    "surprise", "enterprise", "opportunity", "hope", "liberty", "temple", "mercedes",
    "concepcion", "progreso", "esperanza", "la paz", "salvador", "natal", "bath",
    "poole", "gap", "rock", "ur", "ede", "goes", "born", "mons", "hove", "kota",
    "university", "college", "fort", "city", "center", "centre", "health", "case",
    "cases", "outbreak", "marburg", "lassa", "ebola", "nipah", "hendra", "lyme",
    "zika", "west nile", "rift valley", "tete", "cork", "lucknow", "post", "brits",
    "guide", "dallas", "phoenix", "eagle", "moss", "rivers", "delta", "plata",
    "pace", "ede", "chester", "lincoln", "jackson", "columbia", "madison",
    "washington", "jefferson", "franklin", "hamilton", "clinton", "kent", "york",
    "santa", "san", "none", "man", "metro", "oral", "hub", "mango", "mary", "meads", "batman", "bo", "aba", "lagos de moreno",
}


def norm(s):
    s = unicodedata.normalize("NFC", s).lower()
    s = re.sub(r"\s+", " ", s).strip()
    return s.strip("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~ ")


def disease_terms(path):
    terms = set()
    for line in open(path, encoding="utf-8"):
        if line.startswith("D\t"):
            f = line.rstrip("\n").split("\t")
            terms.add(norm(f[2]))
            terms.update(norm(s) for s in f[3].split("|") if s)
    return terms


def main(src, out):
    countries = json.load(open(f"{src}/countries.json"))
    cities15 = list(json.load(open(f"{src}/cities15000.json")).values())
    cities1 = list(json.load(open(f"{src}/cities1000.json")).values())
    diseases = disease_terms(f"{out}/diseases.tsv")

    kept = {k: v for k, v in countries.items() if k not in EXCLUDED_COUNTRIES}
    assert len(kept) == 243, len(kept)
    country_names = {norm(v["name"]) for v in kept.values()}

    def coords_for(code, capital):
        pool = [c for c in cities1 if c["countrycode"] == code]
        for c in pool:
            if capital and c["name"] == capital:
                return c["latitude"], c["longitude"]
        if pool:
            best = max(pool, key=lambda c: c["population"])
            return best["latitude"], best["longitude"]
        return None

    fallback = {"NF": (-29.0408, 167.9547), "PN": (-25.0667, -130.1)}
    rows = []
    for code in sorted(kept):
        c = kept[code]
        ll = coords_for(code, c.get("capital")) or fallback.get(code)
        assert ll is not None, code
        rows.append(("G", code, c["name"].strip(), "country", code, ll[0], ll[1]))

    subs = []
    seen = set()
    for rid, name, parent, lat, lon in CURATED:
        subs.append(("G", rid, name, "subcountry", parent, lat, lon))
    for c in sorted(cities15, key=lambda c: (-c["population"], c["geonameid"])):
        if len(subs) >= SUB_COUNTRY_TARGET:
            break
        code = c["countrycode"]
        if code not in kept:
            continue
        n = norm(c["name"])
        if (not n or n in RESERVED or n in country_names or n in diseases
                or n in COMMON_WORDS or len(n) < 3 or (n, code) in seen
                or "\t" in c["name"] or "|" in c["name"]):
            continue
        seen.add((n, code))
        subs.append(("G", f"{code}-{c['geonameid']}", c["name"], "subcountry", code,
                     c["latitude"], c["longitude"]))
    assert len(subs) == SUB_COUNTRY_TARGET

    with open(f"{out}/geo.tsv", "w", encoding="utf-8") as f:
        f.write("# Geographical records: G, id, name, kind, parent country id, lat, lon\n")
        f.write("# Generated by scripts/gen_geo.py from GeoNames (CC-BY 4.0).\n")
        for r in rows + subs:
            f.write("\t".join(str(x) for x in r) + "\n")

    with open(f"{out}/tld.tsv", "w", encoding="utf-8") as f:
        f.write("# Country-code top-level domain to country id\n")
        for code in sorted(kept):
            tld = kept[code].get("tld", "")
            if tld:
                f.write(f"{tld.lstrip('.')}\t{code}\n")
        # .uk is the ccTLD in use even though ISO assigns GB.
        f.write("uk\tGB\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
