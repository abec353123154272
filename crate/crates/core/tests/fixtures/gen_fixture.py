#!/usr/bin/env python3
"""Writes the 20-zone pipeline fixture and its golden outputs.

The golden values are computed here, spreadsheet style, straight from the
rows this script writes. Nothing is read back from the Rust side. Every
formula is spelled out with the same operation order as the documented
recipe so that the comparison can be bit-exact.

Run from this directory:  python3 gen_fixture.py
"""

import json
import math
import os
import random

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "pipeline")
BASE_YEAR, OUTCOME_YEAR = 2012, 2016
STATES = ["NY", "MA"]
SQM_PER_ACRE = 4046.8564224

rng = random.Random(20160412)

# ---------------------------------------------------------------- geometry
# Axis-aligned rectangles sharing exact edge coordinates.
NY_EDGES = [round(-74.00 + 0.01 * k, 6) for k in range(16)]
MA_EDGES = [round(-71.10 + 0.01 * k, 6) for k in range(9)]
NY_LAT, MA_LAT = (40.70, 40.71), (42.30, 42.31)

zones = {}  # code -> dict(state, rect=(x0, y0, x1, y1), aland)


def add_zone(code, state, x0, x1, lat, aland):
    zones[code] = {"state": state, "rect": (x0, lat[0], x1, lat[1]), "aland": aland}


for i in range(14):
    add_zone("%05d" % (10001 + i), "NY", NY_EDGES[i], NY_EDGES[i + 1], NY_LAT, None)
for i in range(8):
    add_zone("%05d" % (2101 + i), "MA", MA_EDGES[i], MA_EDGES[i + 1], MA_LAT, None)
# New Jersey neighbour sharing the western edge of 10001
add_zone("07001", "NJ", -74.01, NY_EDGES[0], NY_LAT, 2_000_000)
# polygon with no census row
add_zone("02199", "MA", -70.90, -70.89, MA_LAT, 1_500_000)

for code, z in zones.items():
    if z["aland"] is None:
        z["aland"] = rng.randrange(400_000, 6_000_000, 1000)
zones["10001"]["aland"] = 1_000_000  # with population 1000: density exactly 1000
zones["10005"]["aland"] = 0  # zero land area: density masked


def inside(code, lon, lat):
    x0, y0, x1, y1 = zones[code]["rect"]
    return x0 <= lon <= x1 and y0 <= lat <= y1


def centre(code, fx=0.5, fy=0.5):
    x0, y0, x1, y1 = zones[code]["rect"]
    return (x0 + (x1 - x0) * fx, y0 + (y1 - y0) * fy)


# ------------------------------------------------------------------ census
YEAR_BINS = [
    ("built_2010_later", 2010, None),
    ("built_2000_2009", 2000, 2009),
    ("built_1990_1999", 1990, 1999),
    ("built_1980_1989", 1980, 1989),
    ("built_1970_1979", 1970, 1979),
    ("built_1960_1969", 1960, 1969),
    ("built_1950_1959", 1950, 1959),
    ("built_1940_1949", 1940, 1949),
    ("built_1939_earlier", 1900, 1939),
]
CENSUS_COLS = [
    "zone", "state", "total_population", "white", "black", "native", "asian", "age_25_34",
    "college", "bachelor", "graduate", "population_25_plus", "sci_tech", "median_age",
    "median_income", "unemployment_rate", "poverty_rate", "median_home_value",
    "occupied_housing_units", "housing_total", "car_truck_van", "public_transit", "walk", "bike",
    "worked_from_home", "worked_outside_state", "worked_in_state", "worked_in_county",
    "worked_outside_county", "worked_in_place",
] + [b[0] for b in YEAR_BINS]


def census_row(code, state, pop):
    r = {"zone": code, "state": state, "total_population": pop}
    left = pop
    for k in ["white", "black", "native", "asian"]:
        v = rng.randint(0, left // 2)
        r[k] = v
        left -= v
    r["age_25_34"] = rng.randint(0, pop // 4)
    p25 = rng.randint(pop // 2, (3 * pop) // 4)
    r["population_25_plus"] = p25
    r["college"] = rng.randint(0, p25 // 4)
    r["bachelor"] = rng.randint(0, p25 // 4)
    r["graduate"] = rng.randint(0, p25 // 5)
    r["sci_tech"] = rng.randint(0, pop // 10)
    r["median_age"] = round(rng.uniform(28, 48), 1)
    r["median_income"] = float(rng.randrange(30_000, 140_000, 50))
    r["unemployment_rate"] = round(rng.uniform(0.02, 0.12), 3)
    r["poverty_rate"] = round(rng.uniform(0.03, 0.30), 3)
    r["median_home_value"] = float(rng.randrange(150_000, 900_000, 500))
    housing = rng.randint(pop // 3, pop // 2)
    r["housing_total"] = housing
    r["occupied_housing_units"] = rng.randint(housing * 8 // 10, housing)
    workers = pop // 2
    left = workers
    for k in ["car_truck_van", "public_transit", "walk", "bike", "worked_from_home"]:
        v = rng.randint(0, left // 2)
        r[k] = v
        left -= v
    r["worked_outside_state"] = rng.randint(0, workers // 10)
    r["worked_in_state"] = workers - r["worked_outside_state"]
    r["worked_in_county"] = rng.randint(0, r["worked_in_state"])
    r["worked_outside_county"] = r["worked_in_state"] - r["worked_in_county"]
    r["worked_in_place"] = rng.randint(0, r["worked_in_county"])
    for name, _, _ in YEAR_BINS:
        r[name] = rng.randint(0, housing // 4)
    return r


kept_ny = ["%05d" % (10001 + i) for i in range(12)]
kept_ma = ["%05d" % (2101 + i) for i in range(8)]
kept = kept_ny + kept_ma  # the 20 output zones

# Distinct populations keep every patent rate distinct.
pops = {}
for code in kept:
    pops[code] = rng.randrange(2_000, 40_000, 7)
pops["10001"] = 1000

census = [census_row(c, zones[c]["state"], pops[c]) for c in kept]
by_code = {r["zone"]: r for r in census}
census.append(census_row("10013", "NY", 5000))  # polygon, no SFR row
census.append(census_row("10014", "NY", 0))  # polygon, zero population
census.append(census_row("10099", "NY", 3000))  # census only, no polygon
census.append(census_row("07001", "NJ", 8000))  # out of scope
for r in census:
    if r["total_population"] == 0:
        for k in CENSUS_COLS[3:]:
            r[k] = 0
by_code["02103"]["median_income"] = None  # N/A cell
for name, _, _ in YEAR_BINS:  # empty histogram
    by_code["10007"][name] = 0

# ----------------------------------------------------------------- patents
patent_counts = {}
used = set()
for code in kept:
    # rates distinct by construction: pick a count with an unused rate
    while True:
        k = rng.randint(0, 30)
        rate = k * 1000.0 / pops[code]
        if rate not in used:
            used.add(rate)
            break
    patent_counts[code] = k

patent_rows = []  # (rf_id, zone, date, lon, lat)
serial = 0
for code in kept:
    for j in range(patent_counts[code]):
        serial += 1
        rf = "RF%05d" % serial
        day = "2016-%02d-%02d" % (rng.randint(1, 12), rng.randint(1, 28))
        lon = lat = ""
        if j % 3 == 0:
            lon, lat = centre(code, 0.3, 0.6)
        patent_rows.append((rf, code, day, lon, lat))
        if j == 0:
            patent_rows.append((rf, code, day, lon, lat))  # exact duplicate row
# one patent listed under two zones counts once in each
multi = "RF%05d" % (serial + 1)
serial += 1
patent_rows.append((multi, "10002", "2016-05-05", "", ""))
patent_rows.append((multi, "02102", "2016-05-05", "", ""))
patent_counts["10002"] += 1
patent_counts["02102"] += 1
# out of the outcome-year window
patent_rows.append(("RF90001", "10003", "2015-12-31", "", ""))
patent_rows.append(("RF90002", "10003", "2017-01-01", "", ""))
# zone code is in New York, but the geocoded point is in New Jersey
nj_point = centre("07001")
patent_rows.append(("RF90003", "10004", "2016-07-01", nj_point[0], nj_point[1]))
# zone code of a dropped zone
patent_rows.append(("RF90004", "10099", "2016-07-01", "", ""))

# rates must stay distinct after the multi-zone adjustment
rates = [patent_counts[c] * 1000.0 / pops[c] for c in kept]
assert len(set(rates)) == 20, "patent rates collide; change the seed"

# -------------------------------------------------------------------- POIs
POI_KINDS = ["school", "university", "cafe", "park", "square", "bus_stop", "innovation_space"]
KEYWORDS = ["accelerator", "co-working space", "incubator", "innovation center", "innovation hub",
            "innovation park", "start-up", "tech hub", "technology park"]
pois = {k: [] for k in POI_KINDS}  # kind -> list of dict


def add_poi(kind, name, lon, lat, area=None, keyword=None):
    d = {"tag": kind, "name": name, "lon": lon, "lat": lat}
    if area is not None:
        d["area_m2"] = area
    if keyword is not None:
        d["keyword"] = keyword
    pois[kind].append(d)


for code in kept:
    for kind in POI_KINDS:
        n = rng.randint(0, 3)
        for j in range(n):
            lon, lat = centre(code, rng.choice([0.2, 0.4, 0.6, 0.8]), rng.choice([0.25, 0.5, 0.75]))
            name = "%s %s %d" % (kind, code, j)
            if kind in ("park", "square"):
                add_poi(kind, name, lon, lat, area=round(rng.uniform(500, 60_000), 1))
            elif kind == "innovation_space":
                add_poi(kind, "%s %s" % (code, rng.choice(KEYWORDS).title()), lon, lat)
            else:
                add_poi(kind, name, lon, lat)
# on the shared edge of 10003 and 10004: counts for 10003
add_poi("cafe", "edge cafe", NY_EDGES[3], 40.705)
# on the shared corner vertex of 10005 and 10006
add_poi("school", "corner school", NY_EDGES[5], NY_LAT[0])
# on the NY/NJ line: the New Jersey zone is not in scope, so 10001 gets it
add_poi("bus_stop", "state line stop", NY_EDGES[0], 40.702)
# inside New Jersey: filtered out
add_poi("cafe", "jersey cafe", nj_point[0], nj_point[1])
# nowhere near any zone
add_poi("cafe", "sea cafe", -60.0, 30.0)
# explicit keyword, and a name that matches no keyword (skipped)
add_poi("innovation_space", "Harbor Works", *centre("02105", 0.6, 0.6), keyword="tech hub")
add_poi("innovation_space", "Corner Bakery", *centre("02105", 0.3, 0.3))
# a park without area is skipped; a bus stop with area keeps the point
pois["park"].append({"tag": "park", "name": "no area", "lon": centre("10002")[0], "lat": centre("10002")[1]})
pois["bus_stop"].append({"tag": "bus_stop", "name": "shelter", "lon": centre("02107")[0],
                         "lat": centre("02107")[1], "area_m2": 12.5})
# wrong tag in a file: skipped
pois["school"].append({"tag": "cafe", "name": "misfiled", "lon": centre("10009")[0], "lat": centre("10009")[1]})

# ------------------------------------------------------- other zone sources
rnd_rows = []  # addzip, xrd, fyear
for code in kept:
    for _ in range(rng.randint(0, 3)):
        rnd_rows.append((code if rng.random() < 0.5 else code + "-%04d" % rng.randint(0, 9999),
                         round(rng.uniform(0.1, 250.0), 3), BASE_YEAR))
rnd_rows.append(("10006", 99.0, BASE_YEAR - 1))  # other fiscal year
rnd_rows.append(("10006", "", BASE_YEAR))  # blank expenditure

h1b_rows = []
for code in kept:
    for _ in range(rng.randint(0, 6)):
        h1b_rows.append((code, rng.choice(["CERTIFIED", "CERTIFIED", "DENIED", "WITHDRAWN", "CERTIFIED-WITHDRAWN"])))

biz_rows = []
for code in kept:
    for _ in range(rng.randint(0, 8)):
        biz_rows.append((code, BASE_YEAR))
biz_rows.append(("10008", BASE_YEAR - 1))

sfr_rows = []
for code in kept:
    sfr_rows.append((code, OUTCOME_YEAR, round(rng.uniform(0.0, 9.0), 4)))
    sfr_rows.append((code, OUTCOME_YEAR - 1, round(rng.uniform(0.0, 9.0), 4)))
sfr_rows.append(("10014", OUTCOME_YEAR, 1.5))
sfr_rows.append(("10099", OUTCOME_YEAR, 2.5))


# ------------------------------------------------------------------ writing
def cell(v):
    if v is None:
        return "N/A"
    return repr(v) if isinstance(v, float) else str(v)


def write(path, text):
    full = os.path.join(OUT, path)
    os.makedirs(os.path.dirname(full), exist_ok=True)
    with open(full, "w", newline="\n") as f:
        f.write(text)


def rect_ring(code):
    x0, y0, x1, y1 = zones[code]["rect"]
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]


features = []
for code in sorted(zones):
    z = zones[code]
    features.append({
        "type": "Feature",
        "properties": {"ZCTA5CE10": code, "STATE": z["state"], "ALAND10": z["aland"]},
        "geometry": {"type": "Polygon", "coordinates": [rect_ring(code)]},
    })
write("zones.geojson", json.dumps({"type": "FeatureCollection", "features": features}, indent=1) + "\n")

lines = [",".join(CENSUS_COLS)]
for r in census:
    lines.append(",".join(cell(r[c]) for c in CENSUS_COLS))
write("census.csv", "\n".join(lines) + "\n")

lines = ["rf_id,zone,grant_date,lon,lat"]
for rf, code, day, lon, lat in patent_rows:
    lines.append("%s,%s,%s,%s,%s" % (rf, code, day, cell(lon) if lon != "" else "", cell(lat) if lat != "" else ""))
write("patents.csv", "\n".join(lines) + "\n")

for kind in POI_KINDS:
    write("poi/%s.jsonl" % kind, "".join(json.dumps(d) + "\n" for d in pois[kind]))

write("rnd.csv", "addzip,xrd,fyear\n" + "".join("%s,%s,%d\n" % (z, cell(x) if x != "" else "", y) for z, x, y in rnd_rows))
write("h1b.csv", "zip,case_status\n" + "".join("%s,%s\n" % r for r in h1b_rows))
write("business.csv", "zone,year\n" + "".join("%s,%d\n" % r for r in biz_rows))
write("sfr.csv", "zone,year,sfr\n" + "".join("%s,%d,%s\n" % (z, y, cell(v)) for z, y, v in sfr_rows))

write("config.toml", """states = ["NY", "MA"]
base_year = 2012
outcome_year = 2016
master_seed = 2016

[sources]
census = "census.csv"
polygons = "zones.geojson"
patents = "patents.csv"
sfr = "sfr.csv"
rnd = "rnd.csv"
h1b = "h1b.csv"
business = "business.csv"

[sources.poi]
%s
""" % "\n".join('%s = "poi/%s.jsonl"' % (k, k) for k in POI_KINDS))

# ------------------------------------------------------------------ golden
# Zone universe: census zones in scope, with a polygon, with population.
universe = sorted(
    (r for r in census
     if r["state"] in STATES and r["zone"] in zones and zones[r["zone"]]["state"] == r["state"]
     and r["total_population"]),
    key=lambda r: r["zone"],
)
ucodes = [r["zone"] for r in universe]
in_scope_polys = [c for c in zones if zones[c]["state"] in STATES]


def point_in_scope(lon, lat):
    return any(inside(c, lon, lat) for c in in_scope_polys)


# patents: window, then state filter (point first, zone code otherwise), then pairs
pairs = set()
for rf, code, day, lon, lat in patent_rows:
    if not day.startswith("2016-"):
        continue
    if lon != "":
        if not point_in_scope(lon, lat):
            continue
    elif not (code in zones and zones[code]["state"] in STATES):
        continue
    pairs.add((rf, code))
pat = {c: len({rf for rf, z in pairs if z == c}) for c in ucodes}

# POIs: file order by kind, parse rules, state filter, smallest containing zone
poi_count = {c: {k: 0 for k in POI_KINDS} for c in ucodes}
area_sum = {c: {"park": 0.0, "square": 0.0} for c in ucodes}
for kind in POI_KINDS:
    for d in pois[kind]:
        if d["tag"] != kind:
            continue
        if kind in ("park", "square") and "area_m2" not in d:
            continue
        if kind == "innovation_space" and "keyword" not in d:
            if not any(k in d["name"].lower() for k in KEYWORDS):
                continue
        lon, lat = d["lon"], d["lat"]
        if not point_in_scope(lon, lat):
            continue
        hits = [c for c in ucodes if inside(c, lon, lat)]
        if not hits:
            continue
        c = min(hits)
        poi_count[c][kind] += 1
        if kind in ("park", "square"):
            area_sum[c][kind] = area_sum[c][kind] + d["area_m2"]

rnd_sum = {c: 0.0 for c in ucodes}
for z, x, y in rnd_rows:
    z = z[:5]
    if y != BASE_YEAR or x == "" or z not in rnd_sum:
        continue
    rnd_sum[z] = rnd_sum[z] + x
h1b = {c: sum(1 for z, _ in h1b_rows if z == c) for c in ucodes}
biz = {c: sum(1 for z, y in biz_rows if z == c and y == BASE_YEAR) for c in ucodes}
sfr = {z: v for z, y, v in sfr_rows if y == OUTCOME_YEAR}

FEATURES = [
    "h1b_per_1000", "sci_tech_pct", "white_pct", "black_pct", "native_pct", "asian_pct",
    "age_25_34_pct", "college_pct", "bachelor_pct", "graduate_pct", "population_density",
    "median_age", "median_income", "unemployment_rate", "poverty_pct", "median_home_value",
    "rnd_per_1000", "occupied_housing_pct", "schools_per_1000", "universities_per_1000",
    "business_registrations_per_1000", "mean_building_age", "mix_age_building_index",
    "innovation_spaces_per_1000", "cafes_per_1000", "parks_per_1000", "squares_per_1000",
    "park_acres_per_1000", "square_acres_per_1000", "car_truck_van_pct", "public_transit_pct",
    "walk_bike_pct", "worked_from_home_pct", "worked_outside_state_pct", "bus_stops_per_1000",
]
GROUPS = ["Social"] * 11 + ["Economic"] * 6 + ["Infrastructure"] * 8 + ["Urban Morphology"] * 4 + ["Urban Mobility"] * 6
LABELS = [
    "H1B applications per 1000 residents", "Scientific technical pct", "White pct", "Black pct", "Native pct",
    "Asian pct", "25 to 34 years pct", "College pct", "Bachelor pct", "Graduate pct", "Population density",
    "Median age", "Median income", "Unemployment rate", "Poverty pct", "Median home value",
    "R&D expenditure per 1000 residents", "Occupied housing units pct", "Schools per 1000 residents",
    "Universities per 1000 residents", "Business registrations per 1000 residents", "Mean age of buildings",
    "Mix age building index", "Innovation spaces per 1000 residents", "Cafes per 1000 residents",
    "Parks per 1000 residents", "Squares per 1000 residents", "Park land (acres) per 1000 residents",
    "Square land (acres) per 1000 residents", "Car truck van to work pct", "Public transportation to work pct",
    "Walk bike to work pct", "Worked from home pct", "Worked outside state of residence pct",
    "Bus stops per 1000 residents",
]
AUX = ["total_population", "building_age_sd", "worked_in_state_pct", "worked_in_county_pct",
       "worked_outside_county_pct", "worked_in_place_pct"]


def age_moments(r):
    ages, weights = [], []
    for name, start, end in YEAR_BINS:
        mid = (float(start) + float(end if end is not None else BASE_YEAR)) / 2.0
        ages.append(float(BASE_YEAR) - mid)
        weights.append(float(r[name]))
    total = 0.0
    for w in weights:
        total = total + w
    if total == 0.0:
        return None
    acc = 0.0
    for a, w in zip(ages, weights):
        acc = acc + w * a
    mean = acc / total
    acc = 0.0
    for a, w in zip(ages, weights):
        acc = acc + w * (a - mean) * (a - mean)
    sd = math.sqrt(acc / total)
    return mean, sd, (0.0 if mean == 0.0 else sd / mean)


rows = []
dropped = []
for r in universe:
    c = r["zone"]
    if c not in sfr:
        dropped.append((c, r["state"], "MissingSfr"))
        continue
    pop = r["total_population"]
    per = lambda x: x * 1000.0 / pop
    pct = lambda k: r[k] / pop
    aland = zones[c]["aland"]
    age = age_moments(r)
    v = {
        "h1b_per_1000": per(float(h1b[c])),
        "sci_tech_pct": pct("sci_tech"),
        "white_pct": pct("white"),
        "black_pct": pct("black"),
        "native_pct": pct("native"),
        "asian_pct": pct("asian"),
        "age_25_34_pct": pct("age_25_34"),
        "college_pct": pct("college"),
        "bachelor_pct": pct("bachelor"),
        "graduate_pct": pct("graduate"),
        "population_density": (float(pop) / float(aland) * 1_000_000.0) if aland > 0 else None,
        "median_age": r["median_age"],
        "median_income": r["median_income"],
        "unemployment_rate": r["unemployment_rate"],
        "poverty_pct": r["poverty_rate"],
        "median_home_value": r["median_home_value"],
        "rnd_per_1000": per(rnd_sum[c]),
        "occupied_housing_pct": r["occupied_housing_units"] / r["housing_total"],
        "schools_per_1000": per(float(poi_count[c]["school"])),
        "universities_per_1000": per(float(poi_count[c]["university"])),
        "business_registrations_per_1000": per(float(biz[c])),
        "mean_building_age": age[0] if age else None,
        "mix_age_building_index": age[2] if age else None,
        "innovation_spaces_per_1000": per(float(poi_count[c]["innovation_space"])),
        "cafes_per_1000": per(float(poi_count[c]["cafe"])),
        "parks_per_1000": per(float(poi_count[c]["park"])),
        "squares_per_1000": per(float(poi_count[c]["square"])),
        "park_acres_per_1000": per(area_sum[c]["park"] / SQM_PER_ACRE),
        "square_acres_per_1000": per(area_sum[c]["square"] / SQM_PER_ACRE),
        "car_truck_van_pct": pct("car_truck_van"),
        "public_transit_pct": pct("public_transit"),
        "walk_bike_pct": (r["walk"] + r["bike"]) / pop,
        "worked_from_home_pct": pct("worked_from_home"),
        "worked_outside_state_pct": pct("worked_outside_state"),
        "bus_stops_per_1000": per(float(poi_count[c]["bus_stop"])),
    }
    aux = {
        "total_population": float(pop),
        "building_age_sd": age[1] if age else None,
        "worked_in_state_pct": pct("worked_in_state"),
        "worked_in_county_pct": pct("worked_in_county"),
        "worked_outside_county_pct": pct("worked_outside_county"),
        "worked_in_place_pct": pct("worked_in_place"),
    }
    rows.append((c, r["state"], v, per(float(pat[c])), sfr[c], aux))

assert len(rows) == 20


def g(v):
    return "NA" if v is None else repr(float(v))


header = ["zone", "state"] + FEATURES + ["patents_per_1000", "sfr"] + AUX
lines = ["\t".join(header)]
for c, st, v, p, s, aux in rows:
    lines.append("\t".join([c, st] + [g(v[f]) for f in FEATURES] + [g(p), g(s)] + [g(aux[a]) for a in AUX]))
write("golden/matrix.tsv", "\n".join(lines) + "\n")

# census-zone drops, in (code, state) order as the join report lists them
for r in census:
    c, st = r["zone"], r["state"]
    if st not in STATES:
        dropped.append((c, st, "OutOfScope"))
    elif c not in zones or zones[c]["state"] != st:
        dropped.append((c, st, "NoPolygon"))
    elif not r["total_population"]:
        dropped.append((c, st, "NoPopulation"))
census_ids = {(r["zone"], r["state"]) for r in census}
for c, z in zones.items():
    if z["state"] in STATES and (c, z["state"]) not in census_ids:
        dropped.append((c, z["state"], "NotInCensus"))
reason_order = ["OutOfScope", "NoPolygon", "NotInCensus", "NoPopulation", "MissingSfr"]
dropped.sort(key=lambda d: (d[0], d[1], reason_order.index(d[2])))
write("golden/dropped.tsv", "".join("%s/%s\t%s\n" % (st, c, why) for c, st, why in dropped))


# summary tables: median, mean, sample sd over unmasked cells, 3 decimals
def stats(values):
    if not values:
        return None, None, None
    n = len(values)
    acc = 0.0
    for x in values:
        acc = acc + x
    mean = acc / n
    sd = None
    if n > 1:
        acc = 0.0
        for x in values:
            acc = acc + (x - mean) * (x - mean)
        sd = math.sqrt(acc / (n - 1.0))
    s = sorted(values)
    med = s[n // 2] if n % 2 == 1 else (s[n // 2 - 1] + s[n // 2]) / 2.0
    return med, mean, sd


def f3(v):
    return "NA" if v is None else "%.3f" % v


for scope_id, states in [("pooled", STATES), ("NY", ["NY"]), ("MA", ["MA"])]:
    sub = [row for row in rows if row[1] in states]
    out = ["Variable\tMedian\tMean\tSD\tGroup"]
    for f, label, group in zip(FEATURES, LABELS, GROUPS):
        vals = [row[2][f] for row in sub if row[2][f] is not None]
        med, mean, sd = stats(vals)
        out.append("\t".join([label, f3(med), f3(mean), f3(sd), group]))
    write("golden/summary_%s.tsv" % scope_id, "\n".join(out) + "\n")

# quintile bins of the pooled patent rate
vals = [row[3] for row in rows]
bins = [5 * sum(1 for x in vals if x < v) // len(vals) for v in vals]
write("golden/bins_patents_pooled.tsv", "".join("%s\t%d\n" % (row[0], b) for row, b in zip(rows, bins)))

# importance table for two hand-specified reports (values in catalog order)
HAND = {
    "NY & MA": {"cafes_per_1000": 0.4, "h1b_per_1000": 0.25, "median_income": 0.2,
                "bus_stops_per_1000": 0.1, "asian_pct": 0.05},
    "NY": {"cafes_per_1000": 0.1, "h1b_per_1000": 0.5, "median_income": 0.0004,
           "bus_stops_per_1000": 0.3996},
}
first = HAND["NY & MA"]
order = sorted(range(len(FEATURES)), key=lambda i: (-first.get(FEATURES[i], 0.0), i))
out = ["Feature\t" + "\t".join("Importance " + k for k in HAND)]
for i in order:
    out.append("\t".join([LABELS[i]] + ["%.3f" % HAND[k].get(FEATURES[i], 0.0) for k in HAND]))
write("golden/importance_table.tsv", "\n".join(out) + "\n")

print("wrote fixture to", OUT)
