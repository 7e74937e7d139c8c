#!/usr/bin/env python3
"""Regenerates the bundled fixture corpora under fixtures/.

Everything is seeded, so re-running produces byte-identical files. The
scenario tables plant a handful of records whose disclosure outcome is known
by construction; the expected candidate lists are written from that
knowledge, not from running riskcal.
"""

import csv
import io
import json
import random
import shutil
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "fixtures"
SNAPSHOT = "2023-01-15T00:00:00Z"
LABELED_AT = "2023-02-01T00:00:00Z"


def write_csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    path.write_text(buf.getvalue())


def dump_json(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


class Portal:
    def __init__(self, root, domain, display_name):
        self.root = root
        self.domain = domain
        self.display_name = display_name
        self.results = []

    def resource(self, rid, name, rtype, columns, datatypes=None, description="", rows=None):
        res = {
            "id": rid,
            "name": name,
            "description": description or name,
            "type": rtype,
            "columns_name": list(columns),
            "columns_datatype": list(datatypes or ["text"] * len(columns)),
        }
        if rows is not None:
            res["row_count"] = len(rows)
            write_csv(self.root / "portals" / self.domain / "data" / f"{rid}.csv", columns, rows)
        self.results.append({"resource": res, "metadata": {"domain": self.domain}})

    def dataset(self, rid, name, columns, rows, datatypes=None, description=""):
        assert all(len(r) == len(columns) for r in rows), rid
        self.resource(rid, name, "dataset", columns, datatypes, description, rows)

    def save(self):
        dump_json(
            self.root / "portals" / self.domain / "catalog.json",
            {
                "portal": {"domain": self.domain, "display_name": self.display_name},
                "snapshot": SNAPSHOT,
                "results": self.results,
            },
        )


def rand_date(rng, year):
    return f"{year}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"


def filler(rng, columns, n, makers):
    return [[makers[c](rng, i) for c in columns] for i in range(n)]


# ---------------------------------------------------------------------------
# New Orleans style police reports

EPR_COLUMNS = [
    "Item_Number", "District", "Location", "Disposition", "Signal_Type", "Signal_Description",
    "Occurred_Date_Time", "Charge_Description", "Victim_Age", "Victim_Gender", "Victim_Race",
    "Offender_Age", "Offender_Gender", "Offender_Race",
]
SIGNALS = [("21", "Burglary"), ("35", "Simple Battery"), ("56", "Simple Criminal Damage"),
           ("67", "Theft"), ("62", "Burglary of Vehicle"), ("24", "Medical Emergency")]
RACES_NOLA = ["Black", "White", "Hispanic", "Asian"]
GENDERS = ["Male", "Female"]
STREETS = {
    2014: ["Magazine St", "Freret St", "Carrollton Ave", "Broad St"],
    2015: ["Canal St", "Bourbon St", "Esplanade Ave", "Elysian Fields Ave"],
    2016: ["St Claude Ave", "Claiborne Ave", "Napoleon Ave", "Gentilly Blvd"],
    2017: ["Tulane Ave", "Jackson Ave", "Louisiana Ave", "Chef Menteur Hwy"],
}


def epr_random_row(rng, year, serial):
    sig, desc = rng.choice(SIGNALS)
    street = rng.choice(STREETS[year])
    unknown_offender = rng.random() < 0.15
    return [
        f"{'ABCDEFGHIJKL'[rng.randrange(12)]}-{serial:05d}-{year % 100:02d}",
        str(rng.randint(1, 8)),
        f"{rng.randint(1, 99)}XX {street}",
        rng.choice(["Closed", "Open"]),
        sig,
        desc,
        f"{rand_date(rng, year)} {rng.randint(0, 23):02d}:{rng.choice(['00', '15', '30', '45'])}",
        desc.upper(),
        str(rng.randint(14, 80)),
        rng.choice(GENDERS),
        rng.choice(RACES_NOLA),
        "" if unknown_offender else str(rng.randint(14, 60)),
        "" if unknown_offender else rng.choice(GENDERS),
        "" if unknown_offender else rng.choice(RACES_NOLA),
    ]


# Key tuples shared by the 2015 and 2016 reports (besides the two planted
# incidents): location, victim age/gender/race, offender age/gender, and
# (left multiplicity, right multiplicity). Every row in these blocks is Closed
# on both sides, so the only open-to-closed transition in the join is the
# planted runaway report.
NOLA_SHARED_BLOCKS = [
    ("4XX Poydras St", "34", "Male", "Black", "36", "Male", 2, 3),
    ("15XX Orleans Ave", "41", "Female", "Black", "45", "Male", 3, 2),
    ("27XX St Charles Ave", "52", "Male", "White", "19", "Male", 1, 2),
    ("9XX Baronne St", "23", "Female", "White", "24", "Female", 2, 2),
    ("12XX Decatur St", "30", "Male", "Hispanic", "31", "Male", 4, 1),
    ("3XX Lafayette St", "67", "Female", "Asian", "22", "Male", 1, 1),
]


def nola_epr(year, n_random, rng, planted, shared_side):
    rows = []
    serial = 1000
    for i in range(n_random):
        serial += 1
        rows.append(epr_random_row(rng, year, serial))
    for block in NOLA_SHARED_BLOCKS:
        loc, va, vg, vr, oa, og, left, right = block
        for _ in range((left, right)[shared_side]):
            serial += 1
            sig, desc = rng.choice(SIGNALS)
            rows.append([f"K-{serial:05d}-{year % 100:02d}", "1", loc, "Closed", sig, desc,
                         f"{rand_date(rng, year)} 12:00", desc.upper(), va, vg, vr, oa, og, "Black"])
    rows.extend(planted)
    rng.shuffle(rows)
    return rows


def build_nola(root):
    p = Portal(root, "data.nola.example", "New Orleans Open Data (fixture)")
    epr_types = ["text", "number", "text", "text", "text", "text", "calendar_date", "text",
                 "number", "text", "text", "number", "text", "text"]

    runaway_2015 = ["B-24118-15", "7", "85XX Dinkins St", "Open", "966", "Runaway Juvenile",
                    "2015-02-24 14:00", "RUNAWAY JUVENILE", "16", "Female", "Black", "16", "Female", "Black"]
    runaway_2016 = ["B-24118-15", "7", "85XX Dinkins St", "Closed", "966S", "Supplemental Report",
                    "2016-12-05 09:00", "RUNAWAY JUVENILE", "16", "Female", "Black", "16", "Female", "Black"]
    robbery_2015 = ["G-11234-15", "6", "6XX Tchoupitoulas St", "Closed", "64G", "Armed Robbery with Gun",
                    "2015-07-12 01:00", "ATTEMPTED ARMED ROBBERY", "29", "Male", "White", "23", "Male", "Black"]
    robbery_2016 = ["D-30987-16", "6", "6XX Tchoupitoulas St", "Closed", "64", "Simple Robbery",
                    "2016-04-29 03:00", "ATTEMPTED SIMPLE ROBBERY", "29", "Male", "White", "23", "Male", "Black"]

    for year in (2014, 2015, 2016, 2017):
        rng = random.Random(1000 + year)
        if year == 2015:
            rows = nola_epr(year, 44, rng, [runaway_2015, robbery_2015], 0)
        elif year == 2016:
            rows = nola_epr(year, 46, rng, [runaway_2016, robbery_2016], 1)
        else:
            rows = [epr_random_row(rng, year, 2000 + i) for i in range(50)]
        columns = list(EPR_COLUMNS)
        types = list(epr_types)
        if year == 2017:
            columns.append("Victim_Fatal_Status")
            types.append("text")
            rows = [r + [rng.choice(["Non-fatal", "Non-fatal", "Fatal"])] for r in rows]
        p.dataset(f"epr-{year}", f"Electronic Police Report {year}", columns, rows, types,
                  f"Incident reports filed by the police department in {year}.")

    def summary(rid, name, year, count_col, offender_race, seed):
        rng = random.Random(seed)
        cols = ["District", "Location", "Signal_Type", "Victim_Age", "Victim_Gender", "Victim_Race",
                "Offender_Age", "Offender_Gender"]
        if offender_race:
            cols.append("Offender_Race")
        cols.append(count_col)
        rows = []
        for _ in range(24):
            r = [str(rng.randint(1, 8)), f"{rng.randint(1, 99)}XX {rng.choice(STREETS[year])}",
                 rng.choice(SIGNALS)[0], str(rng.randint(14, 80)), rng.choice(GENDERS),
                 rng.choice(RACES_NOLA), str(rng.randint(14, 60)), rng.choice(GENDERS)]
            if offender_race:
                r.append(rng.choice(RACES_NOLA))
            r.append(str(rng.randint(1, 40)))
            rows.append(r)
        p.dataset(rid, name, cols, rows, description=f"Aggregated counts of reported incidents, {year}.")

    summary("vic-sum-2015", "Victim Demographics Summary 2015", 2015, "Incident_Count", False, 31)
    summary("vic-sum-2016", "Victim Demographics Summary 2016", 2016, "Incident_Count", False, 32)
    summary("off-sum-2016", "Offender Demographics Summary 2016", 2016, "Offender_Count", True, 33)
    summary("dist-sum-2017", "Incident Demographics by District 2017", 2017, "Incident_Count", False, 34)

    rng = random.Random(35)
    p.dataset("street-lamps", "Street Lamps", ["Lamp_ID", "Wattage", "Pole_Type", "Install_Date"],
              [[f"SL-{i:04d}", rng.choice(["100", "150", "250"]), rng.choice(["Steel", "Wood"]),
                rand_date(rng, rng.randint(1990, 2020))] for i in range(30)])
    p.dataset("pothole-repairs", "Pothole Repairs", ["Request_ID", "Street", "Repair_Date", "Crew"],
              [[f"PR-{i:05d}", rng.choice(STREETS[2016]), rand_date(rng, 2022), f"Crew {rng.randint(1, 6)}"]
               for i in range(25)])
    p.resource("police-districts", "Police Districts", "map", ["District", "Geometry"])
    p.resource("epr-dictionary", "Electronic Police Report Data Dictionary", "data-dictionary",
               ["Field", "Definition"])
    p.save()


# ---------------------------------------------------------------------------
# San Mateo style demographics (vulnerable entry points)

def build_smc(root):
    p = Portal(root, "datahub.smc.example", "County of San Mateo Datahub (fixture)")
    rng = random.Random(41)
    langs = ["English", "Spanish", "Tagalog", "Cantonese"]
    cities = ["San Mateo", "Daly City", "Redwood City", "East Palo Alto"]
    programs = ["Housing", "Behavioral Health", "Care Coordination"]

    base = [("34", "White", "M"), ("34", "White", "F"), ("41", "Hispanic", "M"), ("41", "Filipino", "F"),
            ("52", "Black", "M"), ("29", "Asian", "F"), ("29", "Hawaiian", "M"), ("63", "White", "F"),
            ("22", "Hispanic", "F"), ("45", "Asian", "M"), ("37", "Black", "F"), ("58", "Filipino", "M"),
            ("28", "White", "F"), ("28", "Hawaiian", "M"), ("70", "Asian", "F")]
    tuples = []
    for t in base:
        tuples.extend([t] * rng.randint(2, 4))
    tuples.append(("28", "Hawaiian", "F"))
    rng.shuffle(tuples)
    rows = [[f"WPC-{i + 1:04d}", a, r, s, rng.choice(langs), rng.choice(cities), rng.choice(programs)]
            for i, (a, r, s) in enumerate(tuples)]
    p.dataset("wpc-demo-2", "Whole Person Care Demographics 2",
              ["Record_ID", "Age", "Race", "Sex", "Language", "City", "Program"], rows,
              ["text", "number", "text", "text", "text", "text", "text"])

    # Seven 18-year-olds, exactly one of them female; every other (age, sex)
    # class has at least two members.
    people = [("18", "M")] * 6 + [("18", "F")]
    for age in ("19", "21", "24", "30", "35", "42", "50", "61"):
        for sex in ("M", "F"):
            people.extend([(age, sex)] * rng.randint(2, 3))
    rng.shuffle(people)
    races = ["White", "Hispanic", "Asian", "Black", "Filipino"]
    rows = [[a, s, rng.choice(races), rng.choice(["Hispanic", "Not Hispanic"]), rng.choice(langs),
             rng.choice(cities), rng.choice(["94401", "94014", "94063", "94303"])] for a, s in people]
    p.dataset("demo-php", "Demographics for Public Health, Policy, and Planning",
              ["Age", "Sex", "Race", "Ethnicity", "Language", "City", "Zip_Code"], rows,
              ["number", "text", "text", "text", "text", "text", "text"])

    p.dataset("park-facilities", "Park Facilities", ["Facility_Name", "Park", "Amenity", "Address"],
              [[f"Facility {i}", rng.choice(["Central", "Coyote Point", "Beresford"]),
                rng.choice(["Restroom", "Playground", "Field"]), f"{rng.randint(100, 999)} Park Rd"]
               for i in range(12)])
    p.resource("clinic-locations", "Health Clinic Locations", "map", ["Clinic", "Geometry"])
    p.save()


# ---------------------------------------------------------------------------
# Fort Lauderdale style arrests and citations (case id linking)

ARREST_COLUMNS = ["Case_ID", "Arrest_Date", "Age", "Race", "Sex", "Charge", "Address"]
CITATION_COLUMNS = ["Case_ID", "Citation_Date", "Age", "Race", "Sex", "Violation", "Location"]
FL_CHARGES = ["Battery", "Trespass", "Burglary", "Possession of Cannabis", "Resisting Officer", "Larceny"]
FL_VIOLATIONS = ["Speeding", "No Valid License", "Careless Driving", "Expired Tag", "Seatbelt"]
FL_STREETS = ["Las Olas Blvd", "Sunrise Blvd", "Andrews Ave", "Broward Blvd", "Oakland Park Blvd"]


def insert_at(rows, planted):
    """Inserts (index, row) pairs in index order and returns final indices."""
    for idx, row in sorted(planted, key=lambda x: x[0]):
        rows.insert(idx, row)
    return [idx for idx, _ in planted]


def build_ftl(root):
    p = Portal(root, "ft-laud.example", "Fort Lauderdale Police Open Data (fixture)")
    rng = random.Random(51)
    races = ["W", "B", "A", "U"]

    def arrests(prefix, ages, n, year_range):
        return [[f"{prefix}{rng.randint(100000, 999999)}-{i}", rand_date(rng, rng.randint(*year_range)),
                 str(rng.randint(*ages)), rng.choice(races), rng.choice(["M", "F"]), rng.choice(FL_CHARGES),
                 f"{rng.randint(100, 2999)} {rng.choice(FL_STREETS)}"] for i in range(n)]

    juvenile = arrests("FLJ", (12, 17), 36, (2015, 2021))
    adult = arrests("FLA", (18, 70), 44, (2015, 2021))
    citations = [[f"FLC{rng.randint(100000, 999999)}-{i}", rand_date(rng, rng.randint(2015, 2021)),
                  str(rng.randint(16, 80)), rng.choice(races), rng.choice(["M", "F"]), rng.choice(FL_VIOLATIONS),
                  f"{rng.randint(100, 2999)} {rng.choice(FL_STREETS)}"] for i in range(40)]

    larceny_juv = ["FL18-030217", "2018-03-10", "16", "W", "M", "Larceny", "Coral Ridge Country Club Estates"]
    larceny_adult = ["FL18-030217", "2018-03-10", "20", "W", "M", "Larceny", "Coral Ridge Country Club Estates"]
    mvt_juv = ["FL18-071844", "2018-07-18", "17", "B", "M", "Motor Vehicle Theft", "NE 6th Ave"]
    mvt_adult = ["FL18-071844", "2018-07-18", "21", "B", "M", "Motor Vehicle Theft", "NE 6th Ave"]
    larceny_2021 = ["FL21-092711", "2021-09-27", "26", "B", "M", "Larceny", "NW 10th Ave"]
    cited_2021 = ["FL21-092711", "2021-09-27", "26", "B", "M",
                  "Disobeying Stop/Yield Sign; Driving While License Suspended", "NW 8th St"]
    cannabis_juv = ["FL15-080633", "2015-08-06", "16", "W", "M", "Possession of Cannabis over 20 grams",
                    "N Federal Hwy"]
    red_light = ["FL15-080633", "2015-08-06", "16", "W", "M", "Disobeying Red Light", "N Federal Hwy"]

    insert_at(juvenile, [(5, larceny_juv), (19, mvt_juv), (30, cannabis_juv)])
    insert_at(adult, [(8, larceny_adult), (22, mvt_adult), (40, larceny_2021)])
    insert_at(citations, [(3, red_light), (27, cited_2021)])

    types = ["text", "calendar_date", "number", "text", "text", "text", "text"]
    p.dataset("juvenile-arrests", "Juvenile Arrests", ARREST_COLUMNS, juvenile, types)
    p.dataset("adult-arrests", "Adult Arrests", ARREST_COLUMNS, adult, types)
    p.dataset("citations", "Citations", CITATION_COLUMNS, citations, types)
    p.dataset("fire-hydrants", "Fire Hydrants", ["Hydrant_ID", "Street", "Flow_Rate", "Last_Inspected"],
              [[f"H-{i:04d}", rng.choice(FL_STREETS), str(rng.randint(500, 1500)), rand_date(rng, 2022)]
               for i in range(20)])
    p.dataset("city-budget-2021", "City Budget 2021", ["Department", "Fund", "Amount", "Fiscal_Year"],
              [[rng.choice(["Police", "Fire", "Parks", "Public Works"]), rng.choice(["General", "Capital"]),
                str(rng.randint(10000, 900000)), "2021"] for _ in range(15)])
    p.resource("police-beats", "Police Beats", "map", ["Beat", "Geometry"])
    p.resource("arrests-dictionary", "Arrests Data Dictionary", "data-dictionary", ["Field", "Definition"])
    p.save()

    def index_of(rows, row):
        return rows.index(row)

    expected_dir = root / "expected"
    dump_json(expected_dir / "ftl-juvenile-adult-case-id.json", {
        "left": "ft-laud.example/juvenile-arrests",
        "right": "ft-laud.example/adult-arrests",
        "key": ["case id"],
        "candidates": [
            {"kind": "identity", "key": ["FL18-030217"], "left_row": index_of(juvenile, larceny_juv),
             "right_row": index_of(adult, larceny_adult), "located": "both", "revealed_attrs": []},
            {"kind": "identity", "key": ["FL18-071844"], "left_row": index_of(juvenile, mvt_juv),
             "right_row": index_of(adult, mvt_adult), "located": "both", "revealed_attrs": []},
        ],
    })
    a, c = index_of(adult, larceny_2021), index_of(citations, cited_2021)
    dump_json(expected_dir / "ftl-adult-citations-case-id.json", {
        "left": "ft-laud.example/adult-arrests",
        "right": "ft-laud.example/citations",
        "key": ["case id"],
        "candidates": [
            {"kind": "identity", "key": ["FL21-092711"], "left_row": a, "right_row": c, "located": "both",
             "revealed_attrs": []},
            {"kind": "attribute", "key": ["FL21-092711"], "left_row": a, "right_row": c, "located": "left",
             "revealed_attrs": ["violation"]},
            {"kind": "attribute", "key": ["FL21-092711"], "left_row": a, "right_row": c, "located": "right",
             "revealed_attrs": ["charge"]},
        ],
    })


# ---------------------------------------------------------------------------
# Albany style arrests and field interviews (quasi-identifier join)

def build_albany(root):
    p = Portal(root, "albany-pd.example", "Albany Police Department (fixture)")
    rng = random.Random(61)
    hoods = ["Arbor Hill", "Center Square", "Pine Hills", "West Hill", "Delaware Ave"]
    races = ["W", "B", "H", "A"]
    # Random rows draw coordinates from disjoint pools so they never link.
    arrest_xy = [f"42.64{i:02d},-73.75{i:02d}" for i in range(10, 40)]
    interview_xy = [f"42.67{i:02d},-73.78{i:02d}" for i in range(10, 40)]

    def rows_for(xy_pool, n, event_fields):
        out = []
        for _ in range(n):
            out.append([rand_date(rng, 2020), f"{rng.randint(0, 23):02d}:{rng.randint(0, 59):02d}",
                        str(rng.randint(16, 70)), rng.choice(races), rng.choice(["M", "F"]), rng.choice(xy_pool),
                        rng.choice(hoods), rng.choice(event_fields)])
        return out

    arrests = rows_for(arrest_xy, 38, ["Petit Larceny", "Criminal Mischief", "DWI", "Harassment"])
    interviews = rows_for(interview_xy, 34, ["Suspicious Person", "Loitering", "Traffic Stop", "Noise"])

    wp = "42.6563,-73.7712"
    se = "42.6489,-73.7601"
    arrest_wp = ["2020-12-02", "11:42", "24", "W", "M", wp, "Washington Park", "Trespass - Enclosed Property"]
    interview_wp = ["2020-12-02", "08:08", "24", "W", "M", wp, "Washington Park", "Suspicious Person"]
    arrest_se = ["2020-12-13", "20:27", "27", "B", "F", se, "South End",
                 "Assault with Intent to Cause Physical Injury"]
    interview_se = ["2020-12-13", "10:22", "27", "B", "F", se, "South End", "Disturbance"]
    insert_at(arrests, [(12, arrest_wp), (29, arrest_se)])
    insert_at(interviews, [(6, interview_wp), (21, interview_se)])

    p.dataset("apd-arrests-nbhd", "APD Arrests Dataset by Neighborhood",
              ["Arrest_Date", "Arrest_Time", "Age", "Race", "Sex", "NeighborhoodXY", "Neighborhood", "Charge"],
              arrests)
    p.dataset("apd-fi-cards-nbhd", "APD Field Interview Cards Dataset by Neighborhood",
              ["Interview_Date", "Interview_Time", "Age", "Race", "Sex", "NeighborhoodXY", "Neighborhood",
               "Contact_Reason"], interviews)
    p.dataset("fleet-vehicles", "Fleet Vehicles", ["Vehicle_ID", "Make", "Model", "Year"],
              [[f"V{i:03d}", rng.choice(["Ford", "Chevrolet"]), rng.choice(["Explorer", "Tahoe"]),
                str(rng.randint(2012, 2022))] for i in range(14)])
    p.resource("neighborhood-boundaries", "Neighborhood Boundaries", "map", ["Neighborhood", "Geometry"])
    p.save()

    i_wp, i_se = interviews.index(interview_wp), interviews.index(interview_se)
    a_wp, a_se = arrests.index(arrest_wp), arrests.index(arrest_se)
    wp_key = ["24", "W", "M", wp]
    se_key = ["27", "B", "F", se]
    # Ordered identity-first, then by key tuple ("24" < "27").
    dump_json(root / "expected" / "albany-interviews-arrests.json", {
        "left": "albany-pd.example/apd-fi-cards-nbhd",
        "right": "albany-pd.example/apd-arrests-nbhd",
        "key": ["age", "race", "sex", "neighborhoodxy"],
        "candidates": [
            {"kind": "identity", "key": wp_key, "left_row": i_wp, "right_row": a_wp, "located": "both",
             "revealed_attrs": []},
            {"kind": "identity", "key": se_key, "left_row": i_se, "right_row": a_se, "located": "both",
             "revealed_attrs": []},
            {"kind": "attribute", "key": wp_key, "left_row": i_wp, "right_row": a_wp, "located": "left",
             "revealed_attrs": ["charge"]},
            {"kind": "attribute", "key": se_key, "left_row": i_se, "right_row": a_se, "located": "left",
             "revealed_attrs": ["charge"]},
        ],
    })


# ---------------------------------------------------------------------------
# Remaining portals: education (aggregate), buildings (non-human with
# location attributes) and six portals without quasi-identifier combinations.

def build_others(root):
    rng = random.Random(71)

    p = Portal(root, "edu-stats.example", "State Education Statistics (fixture)")
    p.dataset("college-enrollment", "College Enrollment by Demographics",
              ["Institution", "Academic_Year", "Race", "Sex", "Age_Group", "Enrollment_Count"],
              [[rng.choice(["State University", "City College", "Tech Institute"]), rng.choice(["2019", "2020"]),
                rng.choice(["White", "Black", "Hispanic", "Asian"]), rng.choice(["M", "F"]),
                rng.choice(["18-24", "25-34", "35+"]), str(rng.randint(1, 900))] for _ in range(30)])
    p.dataset("campus-buildings", "Campus Buildings", ["Building_Code", "Campus", "Square_Feet", "Address"],
              [[f"B{i:02d}", rng.choice(["North", "South"]), str(rng.randint(2000, 90000)),
                f"{rng.randint(1, 999)} College Ave"] for i in range(15)])
    p.dataset("course-catalog", "Course Catalog", ["Course_ID", "Title", "Credits", "Department"],
              [[f"C{i:03d}", f"Course {i}", str(rng.randint(1, 4)), rng.choice(["Math", "History", "Biology"])]
               for i in range(20)])
    p.resource("enrollment-codebook", "Enrollment Codebook", "data-dictionary", ["Code", "Meaning"])
    p.resource("enrollment-trends", "Enrollment Trends Chart", "chart", ["Year", "Enrollment"])
    p.save()

    p = Portal(root, "city-build.example", "City Buildings and Permits (fixture)")
    p.dataset("building-details", "Building Details",
              ["Parcel_ID", "Address", "Zip_Code", "Year_Built", "Floors", "Use_Type"],
              [[f"P{i:05d}", f"{rng.randint(1, 999)} Main St", rng.choice(["10001", "10002"]),
                str(rng.randint(1900, 2020)), str(rng.randint(1, 40)), rng.choice(["Office", "Retail"])]
               for i in range(25)])
    p.dataset("parking-meters", "Parking Meter Locations", ["Meter_ID", "Location", "Zip", "Rate"],
              [[f"M{i:04d}", f"{rng.randint(1, 999)} Market St", rng.choice(["10001", "10003"]),
                rng.choice(["1.00", "2.50"])] for i in range(25)])
    p.dataset("permits-issued", "Permits Issued", ["Permit_Number", "Address", "Permit_Type", "Issue_Date"],
              [[f"PMT-{i:05d}", f"{rng.randint(1, 999)} Elm St", rng.choice(["Electrical", "Plumbing"]),
                rand_date(rng, 2022)] for i in range(20)])
    p.dataset("elevator-inspections", "Elevator Inspections",
              ["Elevator_ID", "Building", "Result", "Inspection_Date"],
              [[f"E{i:04d}", f"Bldg {rng.randint(1, 50)}", rng.choice(["Pass", "Fail"]), rand_date(rng, 2022)]
               for i in range(18)])
    p.resource("zoning-map", "Zoning Map", "map", ["Zone", "Geometry"])
    p.resource("parcel-map", "Parcel Map", "map", ["Parcel", "Geometry"])
    p.save()

    p = Portal(root, "transit.example", "Regional Transit Authority (fixture)")
    p.dataset("bus-stops", "Bus Stops", ["Stop_ID", "Stop_Name", "Latitude", "Longitude"],
              [[f"S{i:04d}", f"Stop {i}", f"40.{rng.randint(1000, 9999)}", f"-73.{rng.randint(1000, 9999)}"]
               for i in range(30)])
    p.dataset("ridership-monthly", "Ridership Monthly", ["Route", "Month", "Boardings"],
              [[f"R{rng.randint(1, 12)}", f"2022-{m:02d}", str(rng.randint(1000, 90000))] for m in range(1, 13)])
    p.dataset("route-schedules", "Route Schedules", ["Route", "Trip_ID", "Departure_Time", "Direction"],
              [[f"R{rng.randint(1, 12)}", f"T{i:05d}", f"{rng.randint(5, 23):02d}:{rng.randint(0, 59):02d}",
                rng.choice(["Inbound", "Outbound"])] for i in range(24)])
    p.resource("transit-routes", "Transit Routes", "map", ["Route", "Geometry"])
    p.resource("bike-lanes", "Bike Lanes", "map", ["Segment", "Geometry"])
    p.save()

    p = Portal(root, "parks.example", "Parks and Recreation (fixture)")
    species = ["Live Oak", "Red Maple", "Bald Cypress", "Crape Myrtle", "Magnolia"]
    p.dataset("tree-inventory", "Tree Inventory", ["Tree_ID", "Species", "Diameter", "Condition", "Street"],
              [[f"T{i:05d}", rng.choice(species), str(rng.randint(2, 60)), rng.choice(["Good", "Fair", "Poor"]),
                rng.choice(["Oak St", "Pine St", "Cedar St"])] for i in range(200)],
              ["text", "text", "number", "text", "text"])
    p.dataset("park-events", "Park Events", ["Event_Name", "Park", "Event_Date", "Attendance"],
              [[f"Event {i}", rng.choice(["Audubon", "City Park"]), rand_date(rng, 2022), str(rng.randint(10, 900))]
               for i in range(16)])
    p.resource("park-boundaries", "Park Boundaries", "map", ["Park", "Geometry"])
    p.save()

    p = Portal(root, "water.example", "Water Utility (fixture)")
    p.dataset("water-quality", "Water Quality Samples", ["Sample_ID", "Site", "Sample_Date", "Lead_PPB", "Chlorine"],
              [[f"W{i:04d}", f"Site {rng.randint(1, 9)}", rand_date(rng, 2022), str(rng.randint(0, 15)),
                f"{rng.uniform(0.2, 2.0):.2f}"] for i in range(20)])
    p.dataset("hydrant-flow", "Hydrant Flow Tests", ["Test_ID", "Hydrant_ID", "Flow_GPM", "Test_Date"],
              [[f"F{i:04d}", f"H-{rng.randint(1, 400):04d}", str(rng.randint(400, 1600)), rand_date(rng, 2022)]
               for i in range(16)])
    p.resource("water-quality-dictionary", "Water Quality Data Dictionary", "data-dictionary", ["Field", "Definition"])
    p.save()

    p = Portal(root, "finance.example", "City Finance (fixture)")
    depts = ["Police", "Fire", "Parks", "Sanitation"]
    p.dataset("vendor-payments", "Vendor Payments", ["Vendor", "Amount", "Payment_Date", "Department"],
              [[f"Vendor {rng.randint(1, 40)}", str(rng.randint(100, 90000)), rand_date(rng, 2022), rng.choice(depts)]
               for _ in range(30)])
    p.dataset("budget-2022", "Budget 2022", ["Department", "Fund", "Amount"],
              [[d, f, str(rng.randint(10000, 5000000))] for d in depts for f in ("General", "Capital")])
    p.dataset("revenue-sources", "Revenue Sources", ["Source", "Fiscal_Year", "Amount"],
              [[s, str(y), str(rng.randint(10000, 9000000))] for s in ("Property Tax", "Sales Tax", "Fees")
               for y in (2021, 2022)])
    p.resource("budget-story", "Budget Story", "story", [])
    p.save()

    p = Portal(root, "energy.example", "Energy Office (fixture)")
    p.dataset("streetlight-energy", "Street Light Energy Use", ["Circuit_ID", "Month", "KWh"],
              [[f"C{rng.randint(1, 30):02d}", f"2022-{m:02d}", str(rng.randint(500, 9000))] for m in range(1, 13)])
    p.dataset("solar-installations", "Solar Installations", ["Permit_ID", "Address", "Capacity_KW", "Install_Date"],
              [[f"SOL-{i:04d}", f"{rng.randint(1, 999)} Sunny Ln", f"{rng.uniform(2, 12):.1f}", rand_date(rng, 2021)]
               for i in range(14)])
    p.resource("solar-potential", "Solar Potential", "map", ["Parcel", "Potential"])
    p.save()

    p = Portal(root, "library.example", "Public Library (fixture)")
    p.dataset("branch-hours", "Library Branch Hours", ["Branch", "Day", "Open_Time", "Close_Time"],
              [[b, d, "09:00", "18:00"] for b in ("Main", "East", "West") for d in ("Mon", "Tue", "Wed")])
    p.resource("branch-locations", "Branch Locations", "map", ["Branch", "Geometry"])
    p.resource("circulation-codebook", "Circulation Codebook", "data-dictionary", ["Code", "Meaning"])
    p.resource("circulation-dashboard", "Circulation Dashboard", "datalens", ["Metric", "Value"])
    p.save()


LABELS = [
    # (portal, dataset_id, relevance, granularity, note)
    ("data.nola.example", "epr-2014", "human-subject", "individual-record", "incident-level police reports"),
    ("data.nola.example", "epr-2015", "human-subject", "individual-record", "incident-level police reports"),
    ("data.nola.example", "epr-2016", "human-subject", "individual-record", "incident-level police reports"),
    ("data.nola.example", "epr-2017", "human-subject", "individual-record", "incident-level police reports"),
    ("data.nola.example", "vic-sum-2015", "human-subject", "aggregate", "counts by victim demographics"),
    ("data.nola.example", "vic-sum-2016", "human-subject", "aggregate", "counts by victim demographics"),
    ("data.nola.example", "off-sum-2016", "human-subject", "aggregate", "counts by offender demographics"),
    ("data.nola.example", "dist-sum-2017", "human-subject", "aggregate", "counts by district"),
    ("datahub.smc.example", "wpc-demo-2", "human-subject", "individual-record", "program participants"),
    ("datahub.smc.example", "demo-php", "human-subject", "individual-record", "survey respondents"),
    ("edu-stats.example", "college-enrollment", "human-subject", "aggregate", "enrollment counts"),
    ("city-build.example", "building-details", "non-human", "unknown", "buildings, not people"),
    ("city-build.example", "parking-meters", "non-human", "unknown", "street furniture"),
]


def build_corpus():
    root = ROOT / "corpus"
    if root.exists():
        shutil.rmtree(root)
    build_nola(root)
    build_smc(root)
    build_ftl(root)
    build_albany(root)
    build_others(root)

    lines = []
    for portal, did, rel, gran, note in LABELS:
        lines.append(json.dumps({"portal": portal, "dataset_id": did, "relevance": rel, "granularity": gran,
                                 "note": note, "labeled_at": LABELED_AT}, sort_keys=True))
    (root / "labels.jsonl").write_text("\n".join(lines) + "\n")

    individual = sum(1 for l in LABELS if l[2] == "human-subject" and l[3] == "individual-record")
    aggregate = sum(1 for l in LABELS if l[2] == "human-subject" and l[3] == "aggregate")
    assert (individual, aggregate) == (6, 5)
    dump_json(root / "funnel.json", {
        "granularity": {"aggregate": aggregate, "individual": individual},
        "stages": [{"count": 60, "name": "resources"}, {"count": 41, "name": "tabular"},
                   {"count": 18, "name": "qi-filtered"}, {"count": 11, "name": "curated"}],
    })


def build_transitive():
    root = ROOT / "transitive"
    if root.exists():
        shutil.rmtree(root)
    rng = random.Random(81)
    p = Portal(root, "tri.example", "Transitive linkage demo (fixture)")
    people = [(str(20 + 3 * i), "F" if i % 2 else "M", f"070{10 + i:02d}") for i in range(12)]
    a_people = people[:10]
    c_zips = [z for _, _, z in people[2:12]]
    p.dataset("clinic-visits", "Clinic Visits (A)", ["Age", "Sex", "Diagnosis"],
              [[a, s, rng.choice(["Asthma", "Diabetes", "Hypertension"])] for a, s, _ in a_people])
    p.dataset("voter-roll", "Voter Roll Extract (B)", ["Age", "Sex", "Zip"], [[a, s, z] for a, s, z in people])
    p.dataset("household-income", "Household Income (C)", ["Zip", "Income"],
              [[z, str(rng.randint(20, 200) * 1000)] for z in c_zips])
    p.save()
    lines = [json.dumps({"portal": "tri.example", "dataset_id": d, "relevance": "human-subject",
                         "granularity": "individual-record", "note": "", "labeled_at": LABELED_AT}, sort_keys=True)
             for d in ("clinic-visits", "voter-roll", "household-income")]
    (root / "labels.jsonl").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    build_corpus()
    build_transitive()
    print(f"fixtures written to {ROOT}")
