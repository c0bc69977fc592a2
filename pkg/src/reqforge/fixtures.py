"""Deterministic demonstration corpora.

Three synthetic sets mirror the published option distributions of the case
studies this toolkit is calibrated against (an aircraft engine controller, an
inspection rover, an autonomous grasping arm), plus the eight-sentence sample
corpus used throughout the tests.  Texts are invented; only the metric
shapes are faithful.
"""

from __future__ import annotations

from .requirement import Requirement
from .semantics import ModeModel
from .store import RequirementSet, upsert_many
from .parser import parse_requirement

SAMPLE_CORPUS: tuple[tuple[str, str], ...] = (
    ("EC_1", "in nominal when (diff_setNL_observedNL > NLmax) "
             "if (pilotInput => surgeStallAvoidance) Controller shall "
             "until (diff_setNL_observedNL < NLmin) (newMode = surgeStallPrevention)"),
    ("EC_2", "if ((sensorfaults) & (trackingPilotCommands)) Controller shall "
             "(controlObjectives)"),
    ("LV_1", "in StartUpMode when initDone Controller shall at the next timepoint "
             "SelfTestMode"),
    ("LV_2", "when off System shall after 15 minutes !resumeVentilation"),
    ("IR_1", "Map_Validator shall immediately start = s0"),
    ("IR_2", "Rover shall always battery > 0"),
    ("AG_1", "SV shall always !(position(SV) = position(TGT))"),
    ("AG_2", "SV shall (grasp(TGT, BGP) & closer(SV, TGT))"),
)

SAMPLE_KEYS: tuple[tuple[str, str, str], ...] = (
    ("in", "trigger", "until"),
    ("null", "trigger", "eventually"),
    ("in", "trigger", "next"),
    ("null", "trigger", "after"),
    ("null", "null", "immediately"),
    ("null", "null", "always"),
    ("null", "null", "always"),
    ("null", "null", "eventually"),
)


def sample_corpus_set() -> RequirementSet:
    base = RequirementSet(
        "samples",
        mode_model=ModeModel(modes=frozenset({"nominal", "StartUpMode"})),
    )
    reqs = [
        parse_requirement(text, req_id=rid, project="samples")[0]
        for rid, text in SAMPLE_CORPUS
    ]
    return upsert_many(base, reqs)


def _parse_all(project: str, entries: list[tuple[str, str | None, str]],
               modes: frozenset[str] = frozenset()) -> RequirementSet:
    base = RequirementSet(project, mode_model=ModeModel(modes=modes))
    reqs: list[Requirement] = []
    for rid, parent, text in entries:
        req, _ = parse_requirement(text, req_id=rid, project=project,
                                   parent_id=parent)
        reqs.append(req)
    return upsert_many(base, reqs)


def engine_controller_fixture() -> RequirementSet:
    """42 requirements: scope null=38/in=4, condition trigger=42,
    timing until=28/eventually=14, 28 children under 14 roots."""
    entries: list[tuple[str, str | None, str]] = []
    for i in range(1, 15):
        scope = "in nominal " if i <= 4 else ""
        # Roots: 14 trigger+eventually requirements.
        entries.append((
            f"UC5_R_{i}", None,
            f"{scope}when (input_{i} > limit_{i}) Controller shall "
            f"(objective_{i})",
        ))
        # Two until-timed children per root (28 total).
        for j in (1, 2):
            entries.append((
                f"UC5_R_{i}_{j}", f"UC5_R_{i}",
                f"if (observed_{i}_{j} > threshold_{i}_{j}) Controller shall "
                f"until (observed_{i}_{j} < floor_{i}_{j}) "
                f"(setting_{i}_{j} = safe_{i}_{j})",
            ))
    return _parse_all("engine-controller", entries, frozenset({"nominal"}))


def inspection_rover_fixture() -> RequirementSet:
    """28 requirements: all null scope, condition trigger=1/null=27,
    timing eventually=13/always=13/after=1/immediately=1, 25 children."""
    entries: list[tuple[str, str | None, str]] = []
    entries.append(("R1", None, "Map_Validator shall immediately start = s0"))
    entries.append(("R2", None, "Rover shall always battery > 0"))
    entries.append(("R3", None,
                    "when lowBattery Interface shall after 2 ticks recharge"))
    for j in range(1, 14):
        entries.append((f"R1_{j}", "R1",
                        f"Planner shall eventually plan_ready_{j}"))
    for j in range(1, 13):
        entries.append((f"R2_{j}", "R2",
                        f"Rover shall always !collision_{j}"))
    return _parse_all("inspection-rover", entries)


def grasping_fixture() -> RequirementSet:
    """20 requirements: null scope and condition, timing eventually=17/always=3,
    18 children."""
    entries: list[tuple[str, str | None, str]] = []
    entries.append(("G1", None, "SV shall always !(position(SV) = position(TGT))"))
    entries.append(("G2", None, "SV shall (grasp(TGT, BGP) & closer(SV, TGT))"))
    for j in range(1, 3):
        entries.append((f"G1_{j}", "G1", f"SV shall always safe_margin_{j} > 0"))
    for j in range(1, 17):
        entries.append((f"G2_{j}", "G2", f"Arm shall eventually aligned_{j}"))
    return _parse_all("autonomous-grasping", entries)
