"""Reader and writer for the model definition language and assessment score files.

Both formats are line-oriented and keyword-led; `#` starts a comment and
indentation is cosmetic (a `goal` attaches to the most recent `kpa`, a `uses`
to the most recent `goal`). Strings are double-quoted with `\\"` and `\\\\`
as the only escapes. The parser keeps going after an error so one pass
reports every independent problem, each with a file/line/column span.

Model files (`.smmdl`)::

    model <id> "<name>" version <int>
    param <id> "<description>" category <process|estimation|product|team|technology> [cost <number>]
    kpa <id> "<name>" plm "<stage>"
      goal <id> "<name>" tier <basic|advanced>
        uses <param-id> weight <number>

Assessment files (`.smma`)::

    assessment "<id>" model "<model-id>" version <int> team "<team>" date <YYYY-MM-DD> [status <draft|reviewed|final>]
    score <param-id> <0|1|2> [note "<text>"]
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import NoReturn

from smm.errors import ParseError
from smm.model import (
    Assessment,
    AssessmentStatus,
    Diagnostic,
    GoalTier,
    KpaDef,
    MaturityModel,
    ParameterBinding,
    ParameterCategory,
    ParameterDef,
    ScoreEntry,
    ScoreLevel,
    Severity,
    SourceSpan,
    SpecificGoalDef,
    is_valid_id,
)

_NUMBER_RE = re.compile(r"^[0-9]+(\.[0-9]+)?$")
_INT_RE = re.compile(r"^[0-9]+$")
_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")

_CATEGORY_KEYWORDS = {c.value: c for c in ParameterCategory}
_TIER_KEYWORDS = {t.value: t for t in GoalTier}
_STATUS_KEYWORDS = {s.value: s for s in AssessmentStatus}


@dataclass(frozen=True)
class _Token:
    text: str
    column: int
    quoted: bool


class _LineLexError(Exception):
    pass


def _lex_line(line: str, line_no: int, file: str, diags: list[Diagnostic]) -> list[_Token] | None:
    """Split one line into word/string tokens. Returns None after a lex error."""
    tokens: list[_Token] = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch in " \t":
            i += 1
            continue
        if ch == "#":
            break
        start = i
        if ch == '"':
            i += 1
            parts: list[str] = []
            while i < n:
                ch = line[i]
                if ch == "\\":
                    if i + 1 < n and line[i + 1] in ('"', "\\"):
                        parts.append(line[i + 1])
                        i += 2
                        continue
                    diags.append(Diagnostic(
                        Severity.ERROR, "BAD_ESCAPE",
                        "only \\\" and \\\\ escapes are allowed in strings",
                        SourceSpan(file, line_no, i + 1),
                    ))
                    return None
                if ch == '"':
                    tokens.append(_Token("".join(parts), start + 1, quoted=True))
                    i += 1
                    break
                parts.append(ch)
                i += 1
            else:
                diags.append(Diagnostic(
                    Severity.ERROR, "UNTERMINATED_STRING",
                    "string is not terminated before end of line",
                    SourceSpan(file, line_no, start + 1),
                ))
                return None
        else:
            while i < n and line[i] not in ' \t#"':
                i += 1
            tokens.append(_Token(line[start:i], start + 1, quoted=False))
    return tokens


class _LineParser:
    """Cursor over one line's tokens; records a diagnostic and raises on shape errors."""

    def __init__(self, tokens: list[_Token], line_no: int, file: str, diags: list[Diagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.line_no = line_no
        self.file = file
        self.diags = diags

    def _span(self, token: _Token | None = None) -> SourceSpan:
        if token is not None:
            return SourceSpan(self.file, self.line_no, token.column)
        if self.tokens:
            last = self.tokens[-1]
            return SourceSpan(self.file, self.line_no, last.column + len(last.text))
        return SourceSpan(self.file, self.line_no, 1)

    def fail(self, code: str, message: str, token: _Token | None = None) -> NoReturn:
        self.diags.append(Diagnostic(Severity.ERROR, code, message, self._span(token)))
        raise _LineLexError()

    def next(self, what: str) -> _Token:
        if self.pos >= len(self.tokens):
            self.fail("SYNTAX", f"expected {what}")
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def word(self, what: str) -> _Token:
        token = self.next(what)
        if token.quoted:
            self.fail("SYNTAX", f"expected {what}, found quoted string", token)
        return token

    def string(self, what: str) -> _Token:
        token = self.next(what)
        if not token.quoted:
            self.fail("SYNTAX", f"expected quoted string for {what}", token)
        return token

    def keyword(self, literal: str) -> None:
        token = self.word(f'keyword "{literal}"')
        if token.text != literal:
            self.fail("SYNTAX", f'expected keyword "{literal}", found "{token.text}"', token)

    def identifier(self, what: str, quoted: bool = False) -> _Token:
        token = self.string(what) if quoted else self.word(what)
        if not is_valid_id(token.text):
            self.fail("BAD_ID", f"{what} {token.text!r} is not a valid identifier", token)
        return token

    def number(self, what: str) -> float:
        token = self.word(what)
        if not _NUMBER_RE.match(token.text):
            self.fail("BAD_NUMBER", f"malformed number {token.text!r} for {what}", token)
        return float(token.text)

    def positive_int(self, what: str) -> int:
        token = self.word(what)
        if not _INT_RE.match(token.text) or int(token.text) < 1:
            self.fail("BAD_NUMBER", f"{what} must be a positive integer, got {token.text!r}", token)
        return int(token.text)

    def end(self) -> None:
        if self.pos < len(self.tokens):
            token = self.tokens[self.pos]
            self.fail("SYNTAX", f"unexpected trailing token {token.text!r}", token)

    def peek_keyword(self) -> str | None:
        if self.pos < len(self.tokens) and not self.tokens[self.pos].quoted:
            return self.tokens[self.pos].text
        return None


def _significant_lines(text: str, file: str, diags: list[Diagnostic]):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        tokens = _lex_line(raw, line_no, file, diags)
        if tokens is None or not tokens:
            continue
        yield _LineParser(tokens, line_no, file, diags)


def parse_model(text: str, file: str = "<model>") -> MaturityModel:
    """Parse model definition text. Raises ParseError carrying every error found."""
    diags: list[Diagnostic] = []

    header: tuple[str, str, int] | None = None
    header_attempted = False
    params: list[ParameterDef] = []
    kpas: list[dict] = []
    current_kpa: dict | None = None
    current_goal: dict | None = None
    seen_ids: dict[str, set[str]] = {"param": set(), "kpa": set(), "goal": set()}

    def check_duplicate(kind: str, ident: str, lp: _LineParser, token_col: int) -> None:
        if ident in seen_ids[kind]:
            diags.append(Diagnostic(
                Severity.ERROR, "DUP_ID",
                f'duplicate {kind} id "{ident}"',
                SourceSpan(file, lp.line_no, token_col),
            ))
        seen_ids[kind].add(ident)

    for lp in _significant_lines(text, file, diags):
        first = lp.tokens[0]
        keyword = first.text if not first.quoted else None
        try:
            if keyword == "model":
                lp.pos = 1
                header_attempted = True
                if header is not None:
                    lp.fail("DUP_MODEL", "more than one model header", first)
                model_id = lp.identifier("model id").text
                name = lp.string("model name").text
                lp.keyword("version")
                version = lp.positive_int("version")
                lp.end()
                header = (model_id, name, version)
            elif keyword == "param":
                lp.pos = 1
                if header is None:
                    lp.fail("MISPLACED", "param declared before the model header", first)
                id_token = lp.identifier("parameter id")
                pid = id_token.text
                check_duplicate("param", pid, lp, id_token.column)
                description = lp.string("parameter description").text
                lp.keyword("category")
                cat_token = lp.word("category keyword")
                category = _CATEGORY_KEYWORDS.get(cat_token.text)
                if category is None:
                    lp.fail("UNKNOWN_CATEGORY",
                            f"unknown category {cat_token.text!r} "
                            f"(expected one of: {', '.join(sorted(_CATEGORY_KEYWORDS))})",
                            cat_token)
                cost = 1.0
                if lp.peek_keyword() == "cost":
                    lp.keyword("cost")
                    cost = lp.number("cost")
                lp.end()
                params.append(ParameterDef(pid, description, category, cost))
            elif keyword == "kpa":
                lp.pos = 1
                if header is None:
                    lp.fail("MISPLACED", "kpa declared before the model header", first)
                id_token = lp.identifier("KPA id")
                kid = id_token.text
                check_duplicate("kpa", kid, lp, id_token.column)
                name = lp.string("KPA name").text
                lp.keyword("plm")
                plm = lp.string("PLM stage").text
                lp.end()
                current_kpa = {"id": kid, "name": name, "plm": plm, "goals": []}
                current_goal = None
                kpas.append(current_kpa)
            elif keyword == "goal":
                lp.pos = 1
                if current_kpa is None:
                    lp.fail("MISPLACED", "goal declared outside a kpa", first)
                id_token = lp.identifier("goal id")
                gid = id_token.text
                check_duplicate("goal", gid, lp, id_token.column)
                name = lp.string("goal name").text
                lp.keyword("tier")
                tier_token = lp.word("tier keyword")
                tier = _TIER_KEYWORDS.get(tier_token.text)
                if tier is None:
                    lp.fail("UNKNOWN_TIER",
                            f"unknown tier {tier_token.text!r} (expected basic or advanced)",
                            tier_token)
                lp.end()
                current_goal = {"id": gid, "name": name, "tier": tier, "bindings": []}
                current_kpa["goals"].append(current_goal)
            elif keyword == "uses":
                lp.pos = 1
                if current_goal is None:
                    lp.fail("MISPLACED", "uses declared outside a goal", first)
                pid = lp.identifier("parameter id").text
                lp.keyword("weight")
                weight = lp.number("weight")
                lp.end()
                current_goal["bindings"].append(ParameterBinding(pid, weight))
            else:
                lp.fail("UNKNOWN_KEYWORD", f"unknown keyword {first.text!r}", first)
        except _LineLexError:
            continue

    if header is None and not header_attempted:
        diags.append(Diagnostic(
            Severity.ERROR, "EMPTY_MODEL",
            "no model declaration found",
            SourceSpan(file, 1, 1),
        ))

    if any(d.is_error for d in diags):
        raise ParseError(diags)

    assert header is not None
    return MaturityModel(
        id=header[0],
        name=header[1],
        version=header[2],
        parameters=tuple(params),
        kpas=tuple(
            KpaDef(
                id=k["id"],
                name=k["name"],
                plm_stage=k["plm"],
                goals=tuple(
                    SpecificGoalDef(g["id"], g["name"], g["tier"], tuple(g["bindings"]))
                    for g in k["goals"]
                ),
            )
            for k in kpas
        ),
    )


def parse_assessment(text: str, file: str = "<assessment>") -> Assessment:
    """Parse assessment score text. Raises ParseError carrying every error found."""
    diags: list[Diagnostic] = []

    header: dict | None = None
    header_attempted = False
    scores: dict[str, ScoreEntry] = {}

    for lp in _significant_lines(text, file, diags):
        first = lp.tokens[0]
        keyword = first.text if not first.quoted else None
        try:
            if keyword == "assessment":
                lp.pos = 1
                header_attempted = True
                if header is not None:
                    lp.fail("DUP_MODEL", "more than one assessment header", first)
                aid = lp.identifier("assessment id", quoted=True).text
                lp.keyword("model")
                model_id = lp.identifier("model id", quoted=True).text
                lp.keyword("version")
                version = lp.positive_int("version")
                lp.keyword("team")
                team = lp.string("team name").text
                lp.keyword("date")
                date_token = lp.word("date")
                if not _DATE_RE.match(date_token.text):
                    lp.fail("BAD_DATE", f"date must be YYYY-MM-DD, got {date_token.text!r}", date_token)
                try:
                    date = dt.date.fromisoformat(date_token.text)
                except ValueError:
                    lp.fail("BAD_DATE", f"{date_token.text!r} is not a real calendar date", date_token)
                status = AssessmentStatus.DRAFT
                if lp.peek_keyword() == "status":
                    lp.keyword("status")
                    status_token = lp.word("status keyword")
                    parsed = _STATUS_KEYWORDS.get(status_token.text)
                    if parsed is None:
                        lp.fail("UNKNOWN_STATUS",
                                f"unknown status {status_token.text!r} "
                                "(expected draft, reviewed or final)",
                                status_token)
                    status = parsed
                lp.end()
                header = {"id": aid, "model_id": model_id, "version": version,
                          "team": team, "date": date, "status": status}
            elif keyword == "score":
                lp.pos = 1
                id_token = lp.identifier("parameter id")
                pid = id_token.text
                level_token = lp.word("score level")
                if level_token.text not in ("0", "1", "2"):
                    lp.fail("SCORE_RANGE",
                            f"score level must be exactly 0, 1 or 2, got {level_token.text!r}",
                            level_token)
                note: str | None = None
                if lp.peek_keyword() == "note":
                    lp.keyword("note")
                    note = lp.string("note").text
                lp.end()
                if pid in scores:
                    lp.diags.append(Diagnostic(
                        Severity.ERROR, "DUP_SCORE",
                        f'parameter "{pid}" is scored more than once',
                        SourceSpan(file, lp.line_no, id_token.column),
                    ))
                    continue
                scores[pid] = ScoreEntry(ScoreLevel(int(level_token.text)), note)
            else:
                lp.fail("UNKNOWN_KEYWORD", f"unknown keyword {first.text!r}", first)
        except _LineLexError:
            continue

    if header is None and not header_attempted:
        diags.append(Diagnostic(
            Severity.ERROR, "EMPTY_ASSESSMENT",
            "no assessment declaration found",
            SourceSpan(file, 1, 1),
        ))

    if any(d.is_error for d in diags):
        raise ParseError(diags)

    assert header is not None
    return Assessment(
        id=header["id"],
        model_id=header["model_id"],
        model_version=header["version"],
        date=header["date"],
        team=header["team"],
        status=header["status"],
        scores=scores,
    )


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _format_number(value: float) -> str:
    """Positional decimal notation that parses back to the identical float."""
    if float(value).is_integer() and abs(value) < 1e16:
        return str(int(value))
    text = repr(float(value))
    if "e" in text or "E" in text:
        text = format(Decimal(text), "f")
    return text


def serialize_model(model: MaturityModel) -> str:
    """Canonical model text: 2-space indent, one declaration per line,
    source order preserved, a blank line before each kpa block."""
    lines = [f"model {model.id} {_quote(model.name)} version {model.version}"]
    for param in model.parameters:
        line = f"param {param.id} {_quote(param.description)} category {param.category.value}"
        if param.step_cost != 1:
            line += f" cost {_format_number(param.step_cost)}"
        lines.append(line)
    for kpa in model.kpas:
        lines.append("")
        lines.append(f"kpa {kpa.id} {_quote(kpa.name)} plm {_quote(kpa.plm_stage)}")
        for goal in kpa.goals:
            lines.append(f"  goal {goal.id} {_quote(goal.name)} tier {goal.tier.value}")
            for binding in goal.bindings:
                lines.append(f"    uses {binding.parameter_id} weight {_format_number(binding.weight)}")
    return "\n".join(lines) + "\n"


def serialize_assessment(assessment: Assessment, model: MaturityModel | None = None) -> str:
    """Canonical assessment text. Scores follow the model's pool order when the
    model is given, otherwise they are sorted by parameter id."""
    header = (
        f"assessment {_quote(assessment.id)}"
        f" model {_quote(assessment.model_id)}"
        f" version {assessment.model_version}"
        f" team {_quote(assessment.team)}"
        f" date {assessment.date.isoformat()}"
        f" status {assessment.status.value}"
    )
    lines = [header]

    if model is not None:
        pool_order = [p.id for p in model.parameters if p.id in assessment.scores]
        extras = sorted(pid for pid in assessment.scores if model.parameter(pid) is None)
        ordered = pool_order + extras
    else:
        ordered = sorted(assessment.scores)

    for pid in ordered:
        entry = assessment.scores[pid]
        line = f"score {pid} {int(entry.level)}"
        if entry.note is not None:
            line += f" note {_quote(entry.note)}"
        lines.append(line)
    return "\n".join(lines) + "\n"
