#!/usr/bin/env python3
"""Regenerate the bundled gazetteer and country tables.

Source data: GeoNames (https://www.geonames.org/, CC-BY 4.0) via the
`geonamescache` package; country names via `pycountry`.

Selection: every city with population >= 150 000, the five most populous
cities of each country, and every French city with population >= 20 000.
"""
import gettext
import sys
import unicodedata
from pathlib import Path

import geonamescache
import pycountry

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"


def ascii_name(s):
    nfkd = unicodedata.normalize("NFKD", s)
    return "".join(ch for ch in nfkd if not unicodedata.combining(ch) and ord(ch) < 128)


# Exonyms and short forms commonly found in French travel exports.
# (country, canonical geonames name) -> extra names emitted as additional rows.
ALIASES = {
    ("US", "New York City"): ["New York", "New-York", "NYC"],
    ("GB", "London"): ["Londres"],
    ("GB", "Edinburgh"): ["Edimbourg"],
    ("DE", "Munich"): ["München", "Muenchen"],
    ("DE", "Köln"): ["Cologne"],
    ("DE", "Hamburg"): ["Hambourg"],
    ("DE", "Frankfurt am Main"): ["Frankfurt", "Francfort"],
    ("DE", "Aachen"): ["Aix-la-Chapelle"],
    ("DE", "Mainz"): ["Mayence"],
    ("CH", "Geneva"): ["Genève", "Genf"],
    ("CH", "Zürich"): ["Zurich"],
    ("CH", "Basel"): ["Bâle"],
    ("BE", "Brussels"): ["Bruxelles"],
    ("BE", "Antwerp"): ["Anvers", "Antwerpen"],
    ("BE", "Gent"): ["Gand", "Ghent"],
    ("NL", "The Hague"): ["La Haye", "Den Haag"],
    ("AT", "Vienna"): ["Vienne", "Wien"],
    ("IT", "Rome"): ["Roma"],
    ("IT", "Milan"): ["Milano"],
    ("IT", "Naples"): ["Napoli"],
    ("IT", "Florence"): ["Firenze"],
    ("IT", "Turin"): ["Torino"],
    ("ES", "Barcelona"): ["Barcelone"],
    ("ES", "Sevilla"): ["Séville", "Seville"],
    ("PT", "Lisbon"): ["Lisbonne", "Lisboa"],
    ("DK", "Copenhagen"): ["Copenhague", "København"],
    ("GR", "Athens"): ["Athènes"],
    ("PL", "Warsaw"): ["Varsovie", "Warszawa"],
    ("PL", "Kraków"): ["Cracovie", "Krakow"],
    ("CZ", "Prague"): ["Praha"],
    ("RO", "Bucharest"): ["Bucarest"],
    ("RU", "Moscow"): ["Moscou"],
    ("RU", "Saint Petersburg"): ["Saint-Pétersbourg"],
    ("CN", "Beijing"): ["Pékin"],
    ("SG", "Singapore"): ["Singapour"],
    ("DZ", "Algiers"): ["Alger"],
    ("EG", "Cairo"): ["Le Caire"],
    ("ZA", "Cape Town"): ["Le Cap"],
    ("MX", "Mexico City"): ["Mexico"],
    ("CA", "Montréal"): ["Montreal"],
    ("CA", "Québec"): ["Quebec"],
}


def clean(s):
    return s.replace("\t", " ").strip()


def main():
    gc = geonamescache.GeonamesCache()
    cities = list(gc.get_cities().values())
    by_country = {}
    for c in cities:
        by_country.setdefault(c["countrycode"], []).append(c)
    keep = {}
    for cc, lst in by_country.items():
        lst.sort(key=lambda c: (-c["population"], c["geonameid"]))
        for c in lst[:5]:
            keep[c["geonameid"]] = c
    for c in cities:
        if c["population"] >= 150000 or (c["countrycode"] == "FR" and c["population"] >= 20000):
            keep[c["geonameid"]] = c
    rows = list(keep.values())
    present = {(c["countrycode"], c["name"]): c for c in rows}
    for key, names in ALIASES.items():
        base = present.get(key)
        if base is None:
            print("alias target missing:", key, file=sys.stderr)
            continue
        for n in names:
            rows.append(dict(base, name=n))
    rows.sort(key=lambda c: (c["countrycode"], -c["population"], c["name"]))
    with open(OUT / "gazetteer.tsv", "w", encoding="utf-8", newline="\n") as f:
        f.write("name\tasciiname\tcountry_code\tlatitude\tlongitude\tpopulation\n")
        for c in rows:
            f.write(
                f"{clean(c['name'])}\t{clean(ascii_name(c['name']))}\t{c['countrycode']}\t"
                f"{c['latitude']:.5f}\t{c['longitude']:.5f}\t{c['population']}\n"
            )

    fr = gettext.translation("iso3166-1", pycountry.LOCALES_DIR, languages=["fr"])
    extra = {"KR": ["Korea", "Corée"], "KP": ["Korea", "Corée"], "GB": ["UK", "Great Britain", "England", "Angleterre"],
             "US": ["USA", "United States of America", "Etats-Unis d'Amérique"], "RU": ["Russia"],
             "CD": ["Congo-Kinshasa", "RDC"], "CG": ["Congo-Brazzaville"], "NL": ["Holland", "Hollande"],
             "CZ": ["Czech Republic", "République tchèque"], "VN": ["Vietnam"], "IR": ["Iran"], "SY": ["Syria", "Syrie"],
             "TW": ["Taiwan"], "BO": ["Bolivia"], "VE": ["Venezuela"], "TZ": ["Tanzania", "Tanzanie"],
             "MD": ["Moldova", "Moldavie"], "LA": ["Laos"]}
    countries = {c.alpha_2: c for c in pycountry.countries}
    with open(OUT / "countries.tsv", "w", encoding="utf-8", newline="\n") as f:
        f.write("code\tname_en\tname_fr\taliases\n")
        for code in sorted(countries):
            c = countries[code]
            names = {c.name}
            for attr in ("official_name", "common_name"):
                if hasattr(c, attr):
                    names.add(getattr(c, attr))
            aliases = sorted((names | set(extra.get(code, []))) - {c.name})
            f.write(f"{code}\t{clean(c.name)}\t{clean(fr.gettext(c.name))}\t{'|'.join(map(clean, aliases))}\n")
    print(len(rows), "cities,", len(countries), "countries", file=sys.stderr)


if __name__ == "__main__":
    main()
