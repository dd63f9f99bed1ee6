#!/usr/bin/env python3
"""Generate the synthetic Cogitamus travel and commute files.

Output is deterministic for a given seed. Prints a rough estimate of the
resulting emissions using the bundled factors so the mix can be tuned.
"""
import csv
import io
import json
import math
import random
from datetime import date, timedelta
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"
OUT = DATA / "demo"
SEED = 2019

HOME = ("Toulouse", "FR")
TRIPS = 110

# (city, country, weight, modes with weights)
DESTINATIONS = [
    ("Paris", "FR", 14, {"Train": 5, "Avion": 5}),
    ("Lyon", "FR", 4, {"Train": 2, "Avion": 2}),
    ("Marseille", "FR", 3, {"Train": 3}),
    ("Bordeaux", "FR", 4, {"Train": 2, "Voiture": 2}),
    ("Montpellier", "FR", 4, {"Train": 2, "Voiture": 2}),
    ("Pau", "FR", 2, {"Voiture": 1}),
    ("Grenoble", "FR", 2, {"Train": 1}),
    ("Strasbourg", "FR", 2, {"Avion": 1}),
    ("Lille", "FR", 1, {"Train": 1}),
    ("Nice", "FR", 2, {"Avion": 1}),
    ("Rennes", "FR", 1, {"Avion": 1}),
    ("Clermont-Ferrand", "FR", 1, {"Voiture": 1, "Bus": 1}),
    ("Barcelona", "ES", 3, {"Train": 1, "Avion": 1}),
    ("Madrid", "ES", 3, {"Avion": 1}),
    ("Lisbon", "PT", 2, {"Avion": 1}),
    ("London", "GB", 3, {"Avion": 1}),
    ("Berlin", "DE", 3, {"Avion": 1}),
    ("Rome", "IT", 2, {"Avion": 1}),
    ("Geneva", "CH", 2, {"Avion": 1, "Train": 1}),
    ("Brussels", "BE", 1, {"Avion": 1}),
    ("Amsterdam", "NL", 2, {"Avion": 1}),
    ("Vienna", "AT", 2, {"Avion": 1}),
    ("Prague", "CZ", 1, {"Avion": 1}),
    ("Athens", "GR", 1, {"Avion": 1}),
    ("Marrakesh", "MA", 1, {"Avion": 1}),
    ("New York City", "US", 3, {"Avion": 1}),
    ("Montréal", "CA", 3, {"Avion": 1}),
    ("Boston", "US", 2, {"Avion": 1}),
    ("San Francisco", "US", 2, {"Avion": 1}),
    ("Québec", "CA", 1, {"Avion": 1}),
    ("Vancouver", "CA", 1, {"Avion": 1}),
    ("Tokyo", "JP", 2, {"Avion": 1}),
    ("Beijing", "CN", 1, {"Avion": 1}),
    ("Rio de Janeiro", "BR", 1, {"Avion": 1}),
    ("Dakar", "SN", 1, {"Avion": 1}),
]

PURPOSES = {
    "Colloque-Congrès": 45,
    "Collaboration": 14,
    "Séminaire": 12,
    "Etude terrain": 10,
    "Enseignement": 5,
    "Visite": 5,
    "Administration de la recherche": 6,
    "Autre": 3,
}
STATUSES = {"Chercheur.e-EC": 55, "Doc-Post doc": 25, "ITA": 10, "Personne invitée": 10}

UPLIFT = {"Avion": (1.0, 95.0), "Train": (1.2, 0.0), "Voiture": (1.3, 0.0), "Bus": (1.3, 0.0)}


def pick(rng, weights):
    keys = list(weights)
    return rng.choices(keys, weights=[weights[k] for k in keys])[0]


def load_places():
    places = {}
    with open(DATA / "gazetteer.tsv", encoding="utf-8") as f:
        for row in csv.DictReader(f, delimiter="\t"):
            key = (row["name"], row["country_code"])
            pop = int(row["population"] or 0)
            if key not in places or places[key][2] < pop:
                places[key] = (float(row["latitude"]), float(row["longitude"]), pop)
    return places


def load_country_names():
    names = {}
    with open(DATA / "countries.tsv", encoding="utf-8") as f:
        for row in csv.DictReader(f, delimiter="\t"):
            names[row["code"]] = row["name_fr"]
    return names


def haversine(a, b):
    la1, lo1, la2, lo2 = map(math.radians, (a[0], a[1], b[0], b[1]))
    h = math.sin((la2 - la1) / 2) ** 2 + math.cos(la1) * math.cos(la2) * math.sin((lo2 - lo1) / 2) ** 2
    return 2 * 6371.0 * math.asin(min(1.0, math.sqrt(h)))


def factor_lookup():
    doc = json.loads((DATA / "factors-sample-1.json").read_text())
    table = {}
    for f in doc["factors"]:
        if f["category"] == "transport_mode":
            key = tuple(sorted(f["selector"].items()))
            table[key] = f["use_phase_value"] + f["manufacturing_value"]
    return lambda **sel: table[tuple(sorted(sel.items()))]


def travel(rng, places, fr_names, factor):
    rows = []
    total = 0.0
    trip_number = 0
    dest_weights = {d[:2]: d[2] for d in DESTINATIONS}
    modes = {d[:2]: d[3] for d in DESTINATIONS}
    for _ in range(TRIPS):
        trip_number += 1
        dest = pick(rng, dest_weights)
        mode = pick(rng, modes[dest])
        long_haul = dest[1] not in ("FR", "ES", "PT", "GB", "DE", "IT", "CH", "BE", "NL", "AT", "CZ", "GR", "MA")
        purpose = "Colloque-Congrès" if long_haul and rng.random() < 0.6 else pick(rng, PURPOSES)
        status = "Chercheur.e-EC" if long_haul and rng.random() < 0.5 else pick(rng, STATUSES)
        day = date(2019, 1, 7) + timedelta(days=rng.randrange(0, 350))
        legs = []
        if long_haul and rng.random() < 0.4:
            # connect through Paris by train
            legs.append((HOME, ("Paris", "FR"), "Train"))
            legs.append((("Paris", "FR"), dest, "Avion"))
        else:
            legs.append((HOME, dest, mode))
        round_trip = rng.random() < 0.85
        for origin, target, m in legs:
            a, b = places[origin][:2], places[target][:2]
            mult, add = UPLIFT[m]
            km = haversine(a, b) * mult + add
            occupancy = ""
            if m == "Avion":
                haul = "short" if km <= 1000 else "medium" if km <= 3500 else "long"
                f = factor(mode="plane", haul=haul)
            elif m == "Train":
                zone = "france" if origin[1] == "FR" and target[1] == "FR" else "international"
                f = factor(mode="train", zone=zone)
            elif m == "Voiture":
                occupancy = str(rng.choice([1, 1, 2, 2, 3]))
                f = factor(mode="car") / int(occupancy)
            else:
                f = factor(mode="bus")
            total += km * f * (2 if round_trip else 1)
            rows.append([
                str(trip_number),
                day.strftime("%d/%m/%Y"),
                origin[0],
                fr_names[origin[1]] if rng.random() < 0.7 else origin[1],
                target[0],
                fr_names[target[1]] if rng.random() < 0.7 else target[1],
                m,
                occupancy,
                "OUI" if round_trip else "NON",
                purpose,
                status,
            ])
    header = ["Trip number", "Departure date", "Departure city", "Departure country", "Destination city",
              "Destination country", "Travel mode", "Number of people in the car", "One way / return",
              "Travel purpose", "Agent status"]
    text = "\t".join(header) + "\n" + "".join("\t".join(r) + "\n" for r in rows)
    return text, len(rows), total


COMMUTE_MIX = [
    # (weight, legs as [(mode, km range)])
    (24, [("Voiture", (4, 20))]),
    (18, [("Vélo", (1.5, 9))]),
    (6, [("Vélo électrique", (4, 14))]),
    (12, [("Bus", (3, 15))]),
    (8, [("Tramway", (2, 8))]),
    (6, [("Métro", (2, 9))]),
    (8, [("Marche", (0.3, 2))]),
    (5, [("Voiture", (3, 8)), ("Train", (15, 40))]),
    (3, [("Moto", (5, 25))]),
]
COMMUTE_FACTOR_MODE = {
    "Voiture": ("car", {}), "Vélo": ("bike", {}), "Vélo électrique": ("e-bike", {}), "Bus": ("bus", {}),
    "Tramway": ("streetcar", {}), "Métro": ("subway", {}), "Train": ("train", {"zone": "france"}),
    "Moto": ("motorbike", {}),
}


def commutes(rng, factor):
    statuses = {"Chercheur.e-EC": 24, "ITA": 10, "Doc-Post doc": 16}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["status", "mode1", "km1", "mode2", "km2", "mode3", "km3", "days_per_week", "weeks_per_year"])
    total = 0.0
    n = 0
    for status, count in statuses.items():
        for _ in range(count):
            legs = rng.choices([m[1] for m in COMMUTE_MIX], weights=[m[0] for m in COMMUTE_MIX])[0]
            days = rng.choice([3, 4, 4.5, 5, 5, 5])
            weeks = rng.choice([40, 42, 44, 44, 45, 46])
            cols = [status]
            for mode, (lo, hi) in legs:
                km = round(rng.uniform(lo, hi), 1)
                cols += [mode, str(km)]
                if mode != "Marche":
                    name, extra = COMMUTE_FACTOR_MODE[mode]
                    total += 2 * km * days * weeks * factor(mode=name, **extra)
            cols += [""] * (7 - len(cols))
            cols += [str(days), str(weeks)]
            w.writerow(cols)
            n += 1
    return buf.getvalue(), n, total


def main():
    rng = random.Random(SEED)
    places = load_places()
    fr_names = load_country_names()
    factor = factor_lookup()
    OUT.mkdir(exist_ok=True)
    tsv, legs, travel_kg = travel(rng, places, fr_names, factor)
    (OUT / "cogitamus-2019-travel.tsv").write_text(tsv, encoding="utf-8")
    csv_text, respondents, commute_kg = commutes(rng, factor)
    (OUT / "cogitamus-2019-commutes.csv").write_text(csv_text, encoding="utf-8")
    print(f"travel: {legs} legs, about {travel_kg:.0f} kg")
    print(f"commutes: {respondents} respondents, about {commute_kg * 80 / respondents:.0f} kg after scaling")


if __name__ == "__main__":
    main()
