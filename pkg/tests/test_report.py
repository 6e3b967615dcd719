"""Text/JSON rendering, schema conformance, and assessment diffs."""

from __future__ import annotations

import datetime as dt
import json
from pathlib import Path

import pytest

from conftest import golden
from smm.errors import SmmError
from smm.model import (
    Assessment,
    GoalTier,
    KpaDef,
    MaturityLevel,
    ParameterCategory,
    ScoreEntry,
    ScoreLevel,
)
from smm.report import (
    METHOD_BOTH,
    METHOD_COMPENSATORY,
    METHOD_TWO_TIER,
    diff,
    render_diff_text,
    render_json,
    render_text,
)
from smm.scoring import evaluate
from test_model import goal, make_assessment, make_model

PROCESS = ParameterCategory.PROCESS_QUALITY

SCHEMA = json.loads(
    (Path(__file__).parent.parent / "docs" / "report-schema.json").read_text(encoding="utf-8")
)


@pytest.fixture(scope="module")
def fixture_result(fixture_model, fixture_assessment):
    return evaluate(fixture_model, fixture_assessment)


def reassess(assessment, new_scores, date=None, aid=None):
    return Assessment(
        id=aid or assessment.id,
        model_id=assessment.model_id,
        model_version=assessment.model_version,
        date=date or assessment.date,
        team=assessment.team,
        status=assessment.status,
        scores=new_scores,
    )


class TestRenderText:
    def test_fixture_golden(self, fixture_result):
        assert render_text(fixture_result) == golden("evaluation.txt")

    def test_no_cross_kpa_total(self, fixture_result):
        text = render_text(fixture_result).lower()
        assert "overall" not in text
        assert "total" not in text

    def test_two_tier_not_applicable_marker(self):
        model = make_model(
            [("A", PROCESS, 1.0)],
            [KpaDef("K", "Area", "stage", (goal("G", GoalTier.BASIC, ("A", 1.0)),))],
        )
        result = evaluate(model, make_assessment(model, {"A": 2}))
        assert "Two-tier: not applicable" in render_text(result)

    def test_no_warnings_section_when_clean(self, fixture_result):
        assert "Warnings" not in render_text(fixture_result)

    def test_warnings_section_present(self, fixture_model, fixture_assessment):
        trimmed = dict(fixture_assessment.scores)
        del trimmed["QA.CI"]
        result = evaluate(fixture_model, reassess(fixture_assessment, trimmed))
        text = render_text(result)
        assert "Warnings" in text
        assert "UNSCORED_PARAM" in text

    def test_method_filter(self, fixture_result):
        comp_only = render_text(fixture_result, method=METHOD_COMPENSATORY)
        assert "Compensatory:" in comp_only
        assert "Two-tier:" not in comp_only
        tt_only = render_text(fixture_result, method=METHOD_TWO_TIER)
        assert "Two-tier:" in tt_only
        assert "Compensatory:" not in tt_only

    def test_deterministic(self, fixture_result):
        assert render_text(fixture_result) == render_text(fixture_result)

    def test_unknown_method_rejected(self, fixture_result):
        with pytest.raises(SmmError) as err:
            render_text(fixture_result, method="mystery")
        assert err.value.code == "BAD_METHOD"


class TestRenderJson:
    def test_fixture_golden(self, fixture_result):
        assert render_json(fixture_result) == golden("evaluation.json")

    def test_round_trip_precision(self, fixture_result):
        doc = json.loads(render_json(fixture_result))
        for pa, kpa_doc in zip(fixture_result.pa_evaluations, doc["kpas"]):
            assert kpa_doc["compensatory"]["score"] == pa.compensatory_score
            for sg, goal_doc in zip(pa.sg_scores, kpa_doc["goals"]):
                assert goal_doc["completeness"] == sg.completeness

    def test_schema_validation(self, fixture_result):
        jsonschema = pytest.importorskip("jsonschema")
        for method in (METHOD_BOTH, METHOD_COMPENSATORY, METHOD_TWO_TIER):
            doc = json.loads(render_json(fixture_result, method=method))
            jsonschema.validate(doc, SCHEMA)

    def test_absent_two_tier_omitted_not_null(self):
        model = make_model(
            [("A", PROCESS, 1.0)],
            [KpaDef("K", "Area", "stage", (goal("G", GoalTier.BASIC, ("A", 1.0)),))],
        )
        result = evaluate(model, make_assessment(model, {"A": 2}))
        doc = json.loads(render_json(result))
        assert "two_tier" not in doc["kpas"][0]
        jsonschema = pytest.importorskip("jsonschema")
        jsonschema.validate(doc, SCHEMA)

    def test_method_filter_drops_blocks(self, fixture_result):
        comp = json.loads(render_json(fixture_result, method=METHOD_COMPENSATORY))
        assert all("two_tier" not in k for k in comp["kpas"])
        tt = json.loads(render_json(fixture_result, method=METHOD_TWO_TIER))
        assert all("compensatory" not in k for k in tt["kpas"])

    def test_trailing_newline(self, fixture_result):
        assert render_json(fixture_result).endswith("}\n")

    def test_deterministic(self, fixture_result):
        assert render_json(fixture_result) == render_json(fixture_result)


class TestDiff:
    def test_identical_results_are_neutral(self, fixture_result):
        comparison = diff(fixture_result, fixture_result)
        for delta in comparison.deltas:
            assert delta.compensatory_delta == 0.0
            assert delta.compensatory_flag == "="
            before, after = delta.compensatory_transition
            assert before is after
            if delta.two_tier_transition is not None:
                assert delta.basic_delta == 0.0
                assert delta.basic_flag == "="
                assert delta.advanced_delta == 0.0
                assert delta.advanced_flag == "="

    def test_one_sg_improved(self, fixture_model, fixture_assessment):
        earlier = evaluate(fixture_model, fixture_assessment)
        bumped = dict(fixture_assessment.scores)
        bumped["DI.STYLE"] = ScoreEntry(ScoreLevel.EXPLICIT)  # DI.G2 only
        later = evaluate(fixture_model, reassess(
            fixture_assessment, bumped, date=dt.date(2026, 2, 10), aid="team-alpha-2026-02"))
        comparison = diff(earlier, later)
        by_kpa = {d.kpa_id: d for d in comparison.deltas}
        # DI.G2 weights: STYLE 1, QA.CI 2. STYLE 0->2 adds 100*(1*2)/(2*3) to the
        # goal, halved at the PA level (two goals).
        assert by_kpa["DI"].compensatory_delta == pytest.approx(100 * 2 / 6 / 2, abs=1e-9)
        assert by_kpa["DI"].compensatory_flag == "↑"
        for kpa_id in ("RE", "QA", "TO", "SM"):
            assert by_kpa[kpa_id].compensatory_flag == "="

    def test_level_crossing_59_to_61(self):
        # weights 59/4/37: scores (2,0,0) -> 59.0, scores (2,1,0) -> 61.0
        model = make_model(
            [("A", PROCESS, 1.0), ("B", PROCESS, 1.0), ("C", PROCESS, 1.0)],
            [KpaDef("K", "Area", "stage", (
                goal("G1", GoalTier.BASIC, ("A", 59.0), ("B", 4.0), ("C", 37.0)),
            ))],
        )
        before = evaluate(model, make_assessment(model, {"A": 2, "B": 0, "C": 0}))
        after = evaluate(model, make_assessment(model, {"A": 2, "B": 1, "C": 0}))
        assert before.pa_evaluations[0].compensatory_score == pytest.approx(59.0)
        assert after.pa_evaluations[0].compensatory_score == pytest.approx(61.0)
        comparison = diff(before, after)
        delta = comparison.deltas[0]
        assert delta.compensatory_transition == (MaturityLevel.INTERMEDIATE, MaturityLevel.ADVANCED)
        assert delta.compensatory_flag == "↑"
        assert "intermediate -> advanced" in render_diff_text(comparison)

    def test_model_mismatch(self, fixture_result):
        other = evaluate(
            make_model([("A", PROCESS, 1.0)],
                       [KpaDef("K", "Area", "stage", (goal("G", GoalTier.BASIC, ("A", 1.0)),))],
                       model_id="different"),
            Assessment(id="x", model_id="different", model_version=1,
                       date=dt.date(2025, 1, 1), team="T",
                       scores={"A": ScoreEntry(ScoreLevel.EXPLICIT)}),
        )
        with pytest.raises(SmmError) as err:
            diff(fixture_result, other)
        assert err.value.code == "MODEL_MISMATCH"

    def test_entries_sorted_by_date(self, fixture_model, fixture_assessment):
        earlier = evaluate(fixture_model, fixture_assessment)
        later = evaluate(fixture_model, reassess(
            fixture_assessment, dict(fixture_assessment.scores),
            date=dt.date(2026, 3, 1), aid="later"))
        comparison = diff(later, earlier)  # arguments reversed on purpose
        entries = comparison.entries()
        assert entries[0].date <= entries[1].date

    def test_render_diff_text_neutral(self, fixture_result):
        text = render_diff_text(diff(fixture_result, fixture_result))
        assert "(+0.0) =" in text
