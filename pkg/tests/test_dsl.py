"""Parsing, serialization, round trips and error recovery for both file formats."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import golden
from generators import random_model
from smm.dsl import parse_assessment, parse_model, serialize_assessment, serialize_model
from smm.errors import ParseError
from smm.model import AssessmentStatus, ParameterCategory, ScoreLevel


def codes(exc: ParseError) -> list[str]:
    return [d.rule_code for d in exc.diagnostics]


class TestParseModel:
    def test_fixture_has_five_kpas_and_all_categories(self, fixture_model_text):
        model = parse_model(fixture_model_text)
        assert len(model.kpas) == 5
        used = {p.category for p in model.parameters}
        assert used == set(ParameterCategory)

    def test_empty_text(self):
        with pytest.raises(ParseError) as err:
            parse_model("")
        assert codes(err.value) == ["EMPTY_MODEL"]

    def test_unknown_tier_with_position(self):
        text = 'model m "M" version 1\nparam p "P" category process\nkpa k "K" plm "s"\n  goal g "G" tier middle\n'
        with pytest.raises(ParseError) as err:
            parse_model(text)
        diag = err.value.diagnostics[0]
        assert diag.rule_code == "UNKNOWN_TIER"
        assert diag.location.line == 4
        assert diag.location.column == text.splitlines()[3].index("middle") + 1

    def test_unknown_keyword(self):
        with pytest.raises(ParseError) as err:
            parse_model('model m "M" version 1\nbogus line here\n')
        assert "UNKNOWN_KEYWORD" in codes(err.value)

    def test_unterminated_string(self):
        with pytest.raises(ParseError) as err:
            parse_model('model m "M version 1\n')
        assert "UNTERMINATED_STRING" in codes(err.value)

    def test_bad_escape(self):
        with pytest.raises(ParseError) as err:
            parse_model('model m "M\\n" version 1\n')
        assert "BAD_ESCAPE" in codes(err.value)

    def test_malformed_number(self):
        text = 'model m "M" version 1\nparam p "P" category process cost 1..5\n'
        with pytest.raises(ParseError) as err:
            parse_model(text)
        assert "BAD_NUMBER" in codes(err.value)

    def test_unknown_category(self):
        text = 'model m "M" version 1\nparam p "P" category quality\n'
        with pytest.raises(ParseError) as err:
            parse_model(text)
        assert "UNKNOWN_CATEGORY" in codes(err.value)

    def test_duplicate_ids_reported(self):
        text = (
            'model m "M" version 1\n'
            'param p "P" category process\n'
            'param p "P again" category team\n'
        )
        with pytest.raises(ParseError) as err:
            parse_model(text)
        assert "DUP_ID" in codes(err.value)

    def test_misplaced_goal_and_uses(self):
        text = 'model m "M" version 1\ngoal g "G" tier basic\nuses p weight 1\n'
        with pytest.raises(ParseError) as err:
            parse_model(text)
        assert codes(err.value) == ["MISPLACED", "MISPLACED"]

    def test_all_errors_reported_in_one_pass(self):
        text = (
            'model m "M" version 1\n'
            'param p "P" category quality\n'      # unknown category
            'kpa k "K" plm "s"\n'
            '  goal g "G" tier middle\n'          # unknown tier
            '  frob x\n'                          # unknown keyword
        )
        with pytest.raises(ParseError) as err:
            parse_model(text)
        assert codes(err.value) == ["UNKNOWN_CATEGORY", "UNKNOWN_TIER", "UNKNOWN_KEYWORD"]
        assert all(d.location is not None for d in err.value.diagnostics)

    def test_comments_and_blank_lines_ignored(self):
        text = (
            '# heading\n'
            '\n'
            'model m "M" version 1   # trailing comment\n'
            'param p "P" category process\n'
            'kpa k "K" plm "s"\n'
            'goal g "G" tier basic\n'
            'uses p weight 1\n'
        )
        model = parse_model(text)
        assert model.kpas[0].goals[0].bindings[0].parameter_id == "p"

    def test_indentation_is_cosmetic(self):
        flat = (
            'model m "M" version 1\n'
            'param p "P" category process\n'
            'kpa k "K" plm "s"\n'
            'goal g "G" tier basic\n'
            'uses p weight 1\n'
        )
        indented = flat.replace("goal", "        goal").replace("uses", "    uses")
        assert parse_model(flat) == parse_model(indented)

    def test_escaped_quotes_round_trip(self):
        text = 'model m "Say \\"hi\\" \\\\ done" version 1\nparam p "P" category process\nkpa k "K" plm "s"\ngoal g "G" tier basic\nuses p weight 1\n'
        model = parse_model(text)
        assert model.name == 'Say "hi" \\ done'
        assert parse_model(serialize_model(model)) == model

    def test_zero_weight_parses_but_fails_validation(self):
        from smm.model import validate_model
        text = 'model m "M" version 1\nparam p "P" category process\nkpa k "K" plm "s"\ngoal g "G" tier basic\nuses p weight 0\n'
        model = parse_model(text)
        assert "BAD_WEIGHT" in [d.rule_code for d in validate_model(model)]


class TestParseAssessment:
    def test_score_with_note(self):
        text = (
            'assessment "a1" model "m" version 1 team "T" date 2025-03-01\n'
            'score REQ.TRACE 2 note "in wiki"\n'
        )
        assessment = parse_assessment(text)
        entry = assessment.scores["REQ.TRACE"]
        assert entry.level is ScoreLevel.EXPLICIT
        assert entry.note == "in wiki"
        assert assessment.status is AssessmentStatus.DRAFT

    def test_score_out_of_range(self):
        text = 'assessment "a1" model "m" version 1 team "T" date 2025-03-01\nscore REQ.TRACE 3\n'
        with pytest.raises(ParseError) as err:
            parse_assessment(text)
        assert codes(err.value) == ["SCORE_RANGE"]

    def test_score_must_be_exact_integer_token(self):
        text = 'assessment "a1" model "m" version 1 team "T" date 2025-03-01\nscore REQ.TRACE 1.0\n'
        with pytest.raises(ParseError) as err:
            parse_assessment(text)
        assert codes(err.value) == ["SCORE_RANGE"]

    def test_duplicate_score(self):
        text = (
            'assessment "a1" model "m" version 1 team "T" date 2025-03-01\n'
            'score REQ.TRACE 1\n'
            'score REQ.TRACE 2\n'
        )
        with pytest.raises(ParseError) as err:
            parse_assessment(text)
        assert codes(err.value) == ["DUP_SCORE"]
        assert err.value.diagnostics[0].location.line == 3

    @pytest.mark.parametrize("bad_date", ["2025-13-01", "2025-02-30", "03-01-2025", "yesterday"])
    def test_bad_date(self, bad_date):
        text = f'assessment "a1" model "m" version 1 team "T" date {bad_date}\n'
        with pytest.raises(ParseError) as err:
            parse_assessment(text)
        assert "BAD_DATE" in codes(err.value)

    def test_unknown_status(self):
        text = 'assessment "a1" model "m" version 1 team "T" date 2025-03-01 status pending\n'
        with pytest.raises(ParseError) as err:
            parse_assessment(text)
        assert codes(err.value) == ["UNKNOWN_STATUS"]

    def test_empty_text(self):
        with pytest.raises(ParseError) as err:
            parse_assessment("")
        assert codes(err.value) == ["EMPTY_ASSESSMENT"]


class TestSerialize:
    def test_fixture_round_trip(self, fixture_model_text):
        model = parse_model(fixture_model_text)
        assert parse_model(serialize_model(model)) == model

    def test_serializer_idempotent(self, fixture_model_text):
        model = parse_model(fixture_model_text)
        once = serialize_model(model)
        assert serialize_model(parse_model(once)) == once

    def test_minimal_model_canonical_text(self):
        expected = golden("minimal.smmdl")
        model = parse_model(expected)
        assert serialize_model(model) == expected
        assert len(expected.splitlines()) == 6

    def test_assessment_round_trip(self, fixture_assessment_text):
        assessment = parse_assessment(fixture_assessment_text)
        assert parse_assessment(serialize_assessment(assessment)) == assessment

    def test_assessment_serializer_idempotent(self, fixture_assessment_text):
        assessment = parse_assessment(fixture_assessment_text)
        once = serialize_assessment(assessment)
        assert serialize_assessment(parse_assessment(once)) == once

    def test_scores_sorted_without_model(self):
        text = (
            'assessment "a1" model "m" version 1 team "T" date 2025-03-01\n'
            'score B 1\n'
            'score A 2\n'
        )
        lines = serialize_assessment(parse_assessment(text)).splitlines()
        assert lines[1] == "score A 2"
        assert lines[2] == "score B 1"

    def test_scores_in_pool_order_with_model(self, fixture_model, fixture_assessment):
        lines = serialize_assessment(fixture_assessment, fixture_model).splitlines()
        score_ids = [line.split()[1] for line in lines[1:]]
        pool_order = [p.id for p in fixture_model.parameters]
        assert score_ids == pool_order

    def test_status_always_emitted(self, fixture_assessment):
        line = serialize_assessment(fixture_assessment).splitlines()[0]
        assert "status reviewed" in line

    def test_draft_status_emitted(self):
        text = 'assessment "a1" model "m" version 1 team "T" date 2025-03-01\n'
        assessment = parse_assessment(text)
        assert "status draft" in serialize_assessment(assessment).splitlines()[0]

    def test_random_models_round_trip(self):
        rng = random.Random(4242)
        for _ in range(60):
            model = random_model(rng)
            text = serialize_model(model)
            assert parse_model(text) == model
            assert serialize_model(parse_model(text)) == text

    def test_weight_formatting_survives_extremes(self):
        from smm.dsl import _format_number
        for value in (0.5, 1.0, 2.0, 3.0, 1e-07, 12345.678, 1e16, 0.1 + 0.2):
            assert float(_format_number(value)) == value
            assert "e" not in _format_number(value).lower()


@settings(max_examples=120, deadline=None)
@given(st.text(max_size=200))
def test_parser_total_on_arbitrary_text(text):
    """fuzz: the parser either returns a model or raises ParseError with diagnostics."""
    try:
        parse_model(text)
    except ParseError as exc:
        assert exc.diagnostics
        assert all(d.location is not None for d in exc.diagnostics)
