#!/usr/bin/env python3
"""Generate the bundled synthetic evaluation corpus.

Writes page_NNN.html files and gold.jsonl into the output directory. Output is
fully determined by --seed. Every page belongs to a task of two pages; a few
entities recur on the second page of a task and are annotated on both, which
the loader counts once.
"""

import argparse
import html
import json
import random
from pathlib import Path

FIRST = ["Alice", "Carlos", "Priya", "James", "Elena", "Omar", "Sofia", "Daniel", "Yuki", "Hannah",
         "Mateo", "Fatima", "Lucas", "Ingrid", "Raj", "Chloe", "Ahmed", "Olivia", "Sven", "Nina",
         "Brian", "Aisha", "Peter", "Zoe", "Kevin", "Laura", "Wei", "Rachel", "Diego", "Emma"]
LAST = ["Whitfield", "Mendez", "Raman", "Okafor", "Lindqvist", "Haddad", "Moretti", "Brennan", "Tanaka",
        "Kowalski", "Ferreira", "Nakamura", "Osei", "Dubois", "Castellano", "Abernathy", "Halvorsen",
        "Petrakis", "Sorensen", "Delacroix", "McAllister", "Varga", "Ibarra", "Nguyen", "Schreiber"]
RARE_FIRST = ["Tariq", "Ngozi", "Bjorn", "Siobhan", "Aurelio", "Thandiwe", "Kalani", "Dmitri"]
HANDLE_WORDS = ["river", "fox", "night", "owl", "pixel", "maple", "echo", "comet", "drift", "ember",
                "quartz", "harbor", "lumen", "orbit", "sable", "tundra", "willow", "zephyr", "cobalt", "moss"]
DOMAINS = ["example.com", "example.org", "mail.example.net", "inbox.example.io", "corp.example.co"]
STREETS = ["Maple", "Oak Hill", "Cedar", "Willow Creek", "Harbor", "Elm", "Juniper", "Linden", "Birch",
           "Summit", "Aspen", "Clover"]
STREET_TYPES = ["Street", "Avenue", "Road", "Lane", "Drive", "Court", "Boulevard", "Way"]
TOWNS = ["Springfield", "Riverton", "Fairview", "Lakewood", "Greenville", "Milford", "Ashland", "Kingsport"]
STATES = ["IL", "OR", "NY", "TX", "WA", "MA", "CO", "GA"]
CITIES = ["Berlin", "Chicago", "Lisbon", "Toronto", "Kyoto", "Nairobi", "Seattle", "Melbourne", "Dublin",
          "Oslo", "Madrid", "Boston", "Vienna", "Seoul", "Denver", "Prague", "Austin", "Zurich"]
RARE_PLACES = ["Reykjavik", "Tromso", "Ushuaia", "Hobart"]
ORG_STEMS = ["Northwind", "Globex", "Initech", "Bluefield", "Crestview", "Harborview", "Silverline",
             "Redwood", "Ironbridge", "Lakeshore", "Brightwater", "Stonegate", "Evergreen", "Oakridge",
             "Summit Ridge", "Westbrook", "Pinecrest", "Riverbend"]
ORG_SUFFIX = ["University", "College", "Hospital", "Clinic", "Bank", "Corporation", "Labs", "Foundation",
              "Institute", "Academy", "Group", "Association"]
RARE_ORGS = ["Habitat Builders Collective", "the Tuesday Running Circle", "Open Source Guild Amsterdam"]
MONTHS = ["January", "February", "March", "April", "June", "July", "August", "September", "October",
          "November", "December"]
WEEKDAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"]
CONDITIONS = ["asthma", "type 2 diabetes", "hypertension", "migraines", "epilepsy", "celiac disease",
              "depression", "arthritis"]
MEDICATIONS = ["metformin", "sertraline", "lisinopril", "albuterol"]
FIELDS = ["Computer Science", "Biology", "Economics", "Mechanical Engineering", "History", "Nursing"]

FILLER = [
    ("p", "Your changes have been saved."),
    ("button", "Save changes"),
    ("button", "Cancel"),
    ("a", "Help center"),
    ("li", "Settings"),
    ("li", "Notifications"),
    ("span", "3 items in cart"),
    ("p", "Free shipping on orders over $50."),
    ("td", "Order #48213"),
    ("td", "Status: shipped"),
    ("p", "Thanks for being part of the community."),
    ("h2", "Account overview"),
    ("h2", "Recent activity"),
    ("p", "Showing 12 of 40 results"),
    ("label", "Search"),
    ("p", "Terms apply. See details below."),
    ("span", "Total: $24.99"),
    ("a", "Privacy settings"),
    # Look like personal data but are not.
    ("span", "Firmware build 10.4.2.1"),
    ("li", "Dr. Pepper six-pack"),
    ("p", "Ships from our Boston Warehouse"),
]


class Gen:
    def __init__(self, rng):
        self.rng = rng
        self.used = set()

    def unique(self, make):
        for _ in range(200):
            value = make()
            if value not in self.used:
                self.used.add(value)
                return value
        raise RuntimeError("entity space exhausted")

    def pick(self, xs):
        return self.rng.choice(xs)

    def digits(self, n):
        return "".join(str(self.rng.randrange(10)) for _ in range(n))

    def person(self):
        return self.unique(lambda: f"{self.pick(FIRST)} {self.pick(LAST)}")

    def handle(self):
        return self.unique(lambda: f"{self.pick(HANDLE_WORDS)}_{self.pick(HANDLE_WORDS)}{self.rng.randrange(10, 99)}")


def luhn_complete(prefix):
    digits = [int(c) for c in prefix]
    total = 0
    for i, d in enumerate(reversed(digits)):
        if i % 2 == 0:
            d *= 2
            if d > 9:
                d -= 9
        total += d
    return prefix + str((10 - total % 10) % 10)


# Each maker returns (tag, element text, gold text, hard). Hard cases are ones
# the pattern detector is not expected to find.

def make_name(g):
    r = g.rng.random()
    if r < 0.15:
        n = g.unique(lambda: f"{g.pick(RARE_FIRST)} {g.pick(LAST)}")
        return "p", f"Posted by {n}", n, True
    n = g.person()
    templates = [("h3", "{}"), ("p", "Dear {},"), ("td", "Full name: {}"), ("p", "Welcome back, {}"),
                 ("span", "Recipient: {}"), ("li", "{} commented on your post")]
    tag, t = g.pick(templates)
    return tag, t.format(n), n, False


def make_email(g):
    first, last = g.pick(FIRST).lower(), g.pick(LAST).lower()
    e = g.unique(lambda: f"{first}.{last}{g.rng.randrange(1, 99)}@{g.pick(DOMAINS)}")
    if g.rng.random() < 0.04:
        user, domain = e.split("@")
        text = f"{user} at {domain.replace('.', ' dot ')}"
        g.used.add(text)
        return "p", f"Write to {text}", text, True
    tag, t = g.pick([("p", "Contact: {}"), ("td", "{}"), ("span", "Email {}"), ("li", "Reply-to: {}")])
    return tag, t.format(e), e, False


def make_phone(g):
    fmt = g.pick(["nanp_paren", "nanp_dash", "nanp_dot", "intl", "labelled"])
    if fmt == "nanp_paren":
        p = g.unique(lambda: f"({g.rng.randrange(201, 989)}) 555-{g.digits(4)}")
    elif fmt == "nanp_dash":
        p = g.unique(lambda: f"+1-{g.rng.randrange(201, 989)}-555-{g.digits(4)}")
    elif fmt == "nanp_dot":
        p = g.unique(lambda: f"{g.rng.randrange(201, 989)}.555.{g.digits(4)}")
    elif fmt == "intl":
        p = g.unique(lambda: f"+44 20 {g.digits(4)} {g.digits(4)}")
    else:
        p = g.unique(lambda: f"020 {g.digits(4)} {g.digits(4)}")
        return "td", f"Mobile: {p}", p, False
    tag, t = g.pick([("td", "{}"), ("span", "Call {}"), ("p", "Phone: {}")])
    return tag, t.format(p), p, False


def make_id(g):
    kind = g.pick(["ssn", "passport", "license", "student", "employee", "bare"])
    if kind == "ssn":
        v = g.unique(lambda: f"{g.rng.randrange(100, 899)}-{g.digits(2)}-{g.digits(4)}")
        return "td", f"SSN: {v}", v, False
    if kind == "passport":
        v = g.unique(lambda: f"X{g.digits(7)}")
        return "td", f"Passport No: {v}", v, False
    if kind == "license":
        v = g.unique(lambda: f"D{g.digits(3)}-{g.digits(4)}")
        return "li", f"Driver's License: {v}", v, False
    if kind == "student":
        v = g.unique(lambda: f"S{g.digits(8)}")
        return "span", f"Student ID: {v}", v, False
    if kind == "employee":
        v = g.unique(lambda: f"E-{g.digits(5)}")
        return "td", f"Employee ID: {v}", v, False
    v = g.unique(lambda: f"NID-{g.digits(6)}")
    return "p", f"ID: {v}", v, False


def make_online(g):
    kind = g.pick(["at", "at", "username", "ip", "github", "linkedin", "login", "rare"])
    if kind == "at":
        h = "@" + g.handle()
        return g.pick(["span", "li", "a"]), f"Followed by {h}", h, False
    if kind == "username":
        h = g.handle()
        return "td", f"Username: {h}", h, False
    if kind == "login":
        h = g.handle()
        return "p", f"Signed in as {h}", h, False
    if kind == "ip":
        ip = g.unique(lambda: f"10.{g.rng.randrange(256)}.{g.rng.randrange(256)}.{g.rng.randrange(1, 255)}")
        return "td", f"Last login from {ip}", ip, False
    if kind == "github":
        h = g.handle().replace("_", "-")
        url = f"github.com/{h}"
        return "a", url, url, False
    if kind == "linkedin":
        h = g.handle().replace("_", "-")
        url = f"linkedin.com/in/{h}"
        return "a", url, url, False
    h = g.handle()
    return "p", f"Find me as {h} on the forum", h, True


def make_address(g):
    if g.rng.random() < 0.15:
        a = g.unique(lambda: f"Flat {g.rng.randrange(1, 9)}B, {g.pick(STREETS)} Mews")
        return "p", f"Deliver to {a}", a, True
    if g.rng.random() < 0.2:
        a = g.unique(lambda: f"PO Box {g.rng.randrange(100, 9999)}")
        return "td", a, a, False
    a = g.unique(lambda: f"{g.rng.randrange(10, 9999)} {g.pick(STREETS)} {g.pick(STREET_TYPES)}, "
                         f"{g.pick(TOWNS)}, {g.pick(STATES)} {g.digits(5)}")
    return g.pick(["p", "td", "address"]), a, a, False


def make_geo(g):
    r = g.rng.random()
    if r < 0.12:
        p = g.unique(lambda: g.pick(RARE_PLACES))
        return "p", f"Trip photos from {p}", p, True
    if r < 0.3:
        c = g.unique(lambda: f"{g.rng.randrange(10, 60)}.{g.digits(4)}, -{g.rng.randrange(10, 130)}.{g.digits(4)}")
        return "span", f"Pinned at {c}", c, False
    c = g.unique(lambda: g.pick(CITIES))
    return g.pick(["span", "li", "p"]), f"Currently in {c}", c, False


def make_affiliation(g):
    if g.rng.random() < 0.1:
        o = g.unique(lambda: g.pick(RARE_ORGS))
        return "p", f"Volunteers with {o}", o, True
    o = g.unique(lambda: f"{g.pick(ORG_STEMS)} {g.pick(ORG_SUFFIX)}")
    tag, t = g.pick([("p", "Works at {}"), ("li", "{}"), ("td", "Employer: {}"), ("span", "Member of {}")])
    return tag, t.format(o), o, False


def make_demographic(g):
    kind = g.pick(["gender", "age", "nationality", "religion", "marital", "rare"])
    if kind == "gender":
        v = g.unique(lambda: g.pick(["Female", "Male", "Non-binary"]))
        return "td", f"Gender: {v}", v, False
    if kind == "age":
        v = g.unique(lambda: f"{g.rng.randrange(18, 90)} years old")
        return "p", f"I am {v}", v, False
    if kind == "nationality":
        v = g.unique(lambda: g.pick(["Canadian", "Brazilian", "Kenyan", "Norwegian", "Filipino"]))
        return "td", f"Nationality: {v}", v, False
    if kind == "religion":
        v = g.unique(lambda: g.pick(["Buddhist", "Catholic", "Muslim", "Jewish", "Hindu"]))
        return "td", f"Religion: {v}", v, False
    if kind == "marital":
        v = g.unique(lambda: g.pick(["divorced", "widowed"]))
        return "p", f"Recently {v}", v, False
    v = g.unique(lambda: g.pick(["she/her", "they/them", "he/him"]))
    return "span", f"Pronouns {v}", v, True


def make_time(g):
    kind = g.pick(["month_day", "iso", "slash", "relative", "clock", "rare"])
    if kind == "month_day":
        v = g.unique(lambda: f"{g.pick(MONTHS)} {g.rng.randrange(1, 28)}, {g.rng.randrange(2019, 2026)}")
        return "p", f"Appointment on {v}", v, False
    if kind == "iso":
        v = g.unique(lambda: f"{g.rng.randrange(2019, 2026)}-0{g.rng.randrange(1, 9)}-{g.rng.randrange(10, 28)}")
        return "td", f"Submitted {v}", v, False
    if kind == "slash":
        v = g.unique(lambda: f"{g.rng.randrange(1, 12)}/{g.rng.randrange(1, 28)}/{g.rng.randrange(2019, 2026)}")
        return "td", f"Due {v}", v, False
    if kind == "relative":
        v = g.unique(lambda: f"next {g.pick(WEEKDAYS)}")
        return "p", f"Pickup {v}", v, False
    if kind == "clock":
        v = g.unique(lambda: f"{g.rng.randrange(1, 12)}:{g.rng.choice(['00', '15', '30', '45'])} {g.pick(['AM', 'PM'])}")
        return "span", f"Arrives at {v}", v, False
    v = g.unique(lambda: f"the summer of {g.rng.randrange(1990, 2020)}")
    return "p", f"Moved here in {v}", v, True


def make_health(g):
    if g.rng.random() < 0.12:
        v = g.unique(lambda: g.pick(["a torn ligament", "a slipped disc", "a sprained wrist"]))
        return "p", f"Recovering from {v}", v, True
    if g.rng.random() < 0.2:
        v = g.unique(lambda: f"Blood type: {g.pick(['A', 'B', 'AB', 'O'])}{g.pick(['+', '-'])}")
        return "td", v, v, False
    if g.rng.random() < 0.3:
        v = g.unique(lambda: g.pick(MEDICATIONS))
        return "li", f"Current medication: {v}", v, False
    v = g.unique(lambda: g.pick(CONDITIONS))
    tag, t = g.pick([("p", "Diagnosed with {}"), ("td", "Condition: {}")])
    return tag, t.format(v), v, False


def make_financial(g):
    kind = g.pick(["card", "masked", "iban", "account", "balance", "rare"])
    if kind == "card":
        v = g.unique(lambda: luhn_complete("4" + g.digits(14)))
        v = " ".join(v[i:i + 4] for i in range(0, 16, 4))
        return "td", f"Card {v}", v, False
    if kind == "masked":
        v = g.unique(lambda: f"**** **** **** {g.digits(4)}")
        return "span", f"Paying with {v}", v, False
    if kind == "iban":
        v = g.unique(lambda: f"DE{g.digits(2)} {g.digits(4)} {g.digits(4)} {g.digits(4)} {g.digits(4)} {g.digits(2)}")
        return "td", f"IBAN {v}", v, False
    if kind == "account":
        v = g.unique(lambda: g.digits(12))
        return "td", f"Account number: {v}", v, False
    if kind == "balance":
        v = g.unique(lambda: f"${g.rng.randrange(1, 99)},{g.digits(3)}.{g.digits(2)}")
        return "p", f"Available balance {v}", v, False
    v = g.unique(lambda: f"{g.rng.randrange(2, 9)}000 USD")
    return "p", f"Annual bonus of {v}", v, True


def make_education(g):
    kind = g.pick(["gpa", "degree", "class_of", "grade", "record", "rare"])
    if kind == "gpa":
        v = g.unique(lambda: f"GPA: {g.rng.randrange(2, 4)}.{g.digits(2)}")
        return "td", v, v, False
    if kind == "degree":
        v = g.unique(lambda: f"Bachelor of Science in {g.pick(FIELDS)}")
        return "li", v, v, False
    if kind == "class_of":
        v = g.unique(lambda: f"Class of {g.rng.randrange(2010, 2026)}")
        return "span", v, v, False
    if kind == "grade":
        v = g.unique(lambda: f"Final grade: {g.pick(['A', 'B', 'C'])}{g.pick(['+', '-', ''])}")
        return "td", v, v, False
    if kind == "record":
        v = g.unique(lambda: g.pick(["Dean's List", "Official transcript", "Honor roll"]))
        return "li", v, v, False
    v = g.unique(lambda: f"Thesis advisor feedback round {g.rng.randrange(2, 9)}")
    return "p", v, v, True


MAKERS = {
    "online_identity": (make_online, 90),
    "affiliation": (make_affiliation, 36),
    "name": (make_name, 30),
    "id": (make_id, 26),
    "time": (make_time, 22),
    "email": (make_email, 18),
    "geo_location": (make_geo, 16),
    "phone_number": (make_phone, 14),
    "address": (make_address, 12),
    "demographic_attribute": (make_demographic, 12),
    "health_information": (make_health, 12),
    "financial_information": (make_financial, 12),
    "educational_record": (make_education, 12),
}


def build(seed, pages):
    rng = random.Random(seed)
    g = Gen(rng)
    items = []
    for category, (maker, count) in MAKERS.items():
        for _ in range(count):
            # Small pools can run dry for one template; draw again.
            for _attempt in range(50):
                try:
                    tag, text, gold, _hard = maker(g)
                    break
                except RuntimeError:
                    continue
            else:
                raise RuntimeError(f"cannot make {category}")
            items.append((category, tag, text, gold))
    rng.shuffle(items)

    buckets = [[] for _ in range(pages)]
    for i, item in enumerate(items):
        buckets[i % pages].append(item)

    out_pages = []
    gold_lines = []
    for i, bucket in enumerate(buckets):
        task = f"task_{i // 2 + 1:02d}"
        # The second page of a task repeats one entity of the first.
        if i % 2 == 1 and buckets[i - 1]:
            bucket = bucket + [buckets[i - 1][0]]
        elements = [(tag, text) for _, tag, text, _ in bucket]
        elements += rng.sample(FILLER, k=4)
        rng.shuffle(elements)
        body = "\n".join(f"    <{tag}>{html.escape(text, quote=False)}</{tag}>" for tag, text in elements)
        name = f"page_{i + 1:03d}.html"
        out_pages.append((name, f"<!DOCTYPE html>\n<html>\n<head><title>Page {i + 1}</title></head>\n"
                                f"<body>\n  <main>\n{body}\n  </main>\n</body>\n</html>\n"))
        for category, _, _, gold in bucket:
            gold_lines.append({"file": name, "task": task, "category": category, "text": gold})
    return out_pages, gold_lines


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="corpus", help="output directory")
    ap.add_argument("--seed", type=int, default=20240611)
    ap.add_argument("--pages", type=int, default=40)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for old in out.glob("page_*.html"):
        old.unlink()
    pages, gold = build(args.seed, args.pages)
    for name, body in pages:
        (out / name).write_text(body, encoding="utf-8")
    with open(out / "gold.jsonl", "w", encoding="utf-8") as f:
        for line in gold:
            f.write(json.dumps(line, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
