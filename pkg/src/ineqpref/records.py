"""Shared record schemas: CSV layouts, profile categories, text statements.

The response and session CSV layouts defined here are the contract between
the survey service export, the simulator output and the analysis ingestion.
Profile categories carry the full-sample counts used as sampling shares for
synthetic respondents.
"""

from __future__ import annotations

CHOICES = ("A", "Equivalent", "B")

RESPONSES_CSV_COLUMNS = ("session_id", "block", "question_id", "label",
                         "choice", "revised")

PROFILE_FIELDS = ("gender", "age", "children", "marital_status",
                  "employment_status", "occupation", "education",
                  "income_bracket", "voted", "political_view")

TEXT_STATEMENTS = ("PT", "UL", "UR", "URL", "Clarity")

TEXT_COLUMNS = tuple(f"text_{s.lower()}" for s in TEXT_STATEMENTS)

SESSIONS_CSV_COLUMNS = (("session_id", "error_count") + PROFILE_FIELDS
                        + TEXT_COLUMNS)

# category -> count over the 1028 full-sample respondents
PROFILE_CATEGORIES = {
    "gender": (("Woman", 531), ("Man", 497)),
    "age": (("15-29", 123), ("30-44", 236), ("45-59", 281), ("60-74", 240),
            ("75-89", 147), ("90+", 1)),
    "children": (("No children", 384), ("1 child", 190), ("2 children", 285),
                 ("3 children", 125), ("4 children or more", 44)),
    "marital_status": (("Married/Civil-union", 516),
                       ("Cohabiting/Common-law", 101),
                       ("Widower", 37), ("Single", 374)),
    "employment_status": (("Employed", 530), ("Active but unemployed", 76),
                          ("Student", 66), ("Retired", 278),
                          ("Other inactivity situation", 78)),
    "occupation": (("Farmers", 16),
                   ("Artisans/shopkeepers/company owners", 49),
                   ("Managers/higher intellectual professions", 217),
                   ("Intermediate occupations", 215), ("Employees", 297),
                   ("Manual workers", 145), ("Not concerned", 89)),
    "education": (("Primary education", 34),
                  ("Lower secondary education", 92),
                  ("Upper secondary education", 338),
                  ("Short cycle tertiary education", 224),
                  ("Bachelor", 144), ("Master/Doctorate", 196)),
    "income_bracket": (("<=1200", 132), ("1201-1500", 113),
                       ("1501-1800", 85), ("1801-2200", 112),
                       ("2201-2600", 117), ("2601-3000", 104),
                       ("3001-3500", 90), ("3501-4200", 118),
                       ("4201-5400", 93), (">5400", 64)),
    "voted": (("Yes", 847), ("No", 181)),
    "political_view": (("Do not wish to reply", 338), ("Extreme left", 21),
                       ("Left", 224), ("Centre", 214), ("Right", 162),
                       ("Extreme Right", 69)),
}

AGREEMENT_LEVELS = ("Strongly disagree", "Somewhat disagree", "No opinion",
                    "Somewhat agree", "Strongly agree")

CLARITY_LEVELS = ("Not clear at all", "Not clear", "No opinion",
                  "Rather clear", "Really clear")

STATEMENT_TEXTS = {
    "PT": ("a transfer of income from individual X to individual Y (who is "
           "poorer than the first) always reduces inequality in society as "
           "a whole"),
    "UL": ("a transfer of income from individual X to individual Y (poorer "
           "than the former) reduces inequality in society as a whole, on "
           "the sole condition that individuals poorer than Y receive at "
           "least the same amount of income as that received by Y"),
    "UR": ("a transfer of income from an individual X to an individual Y "
           "(poorer than the former) reduces inequalities in society as a "
           "whole, on the sole condition that individuals richer than X "
           "give at least the same amount of income as that given by X"),
    "URL": ("a transfer of income from an individual X to an individual Y "
            "(poorer than the former) reduces inequality in society as a "
            "whole, on the sole conditions that (a) individuals poorer than "
            "Y receive at least the same amount of income as that received "
            "by Y and (b) individuals richer than X give at least the same "
            "amount of income as that given by X"),
    "Clarity": "Did you find these questions clear?",
}


def category_labels(field: str) -> tuple:
    return tuple(label for label, _ in PROFILE_CATEGORIES[field])


def category_shares(field: str) -> tuple:
    counts = [c for _, c in PROFILE_CATEGORIES[field]]
    total = sum(counts)
    return tuple(c / total for c in counts)


def validate_profile(profile: dict) -> dict:
    """Check a profile dict against the closed category lists."""
    clean = {}
    for field in PROFILE_FIELDS:
        if field not in profile:
            raise ValueError(f"missing profile field {field!r}")
        value = profile[field]
        if value not in category_labels(field):
            raise ValueError(f"unknown {field} category {value!r}")
        clean[field] = value
    extras = set(profile) - set(PROFILE_FIELDS)
    if extras:
        raise ValueError(f"unexpected profile fields {sorted(extras)}")
    return clean
