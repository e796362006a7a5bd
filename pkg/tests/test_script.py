from __future__ import annotations

import pytest

from iasdo.errors import ScriptError
from iasdo.script import ScriptRunner, parse_script


class TestParsing:
    def test_create_with_ed_and_super(self):
        (line,) = parse_script("create Copy as Logistic_service ed Document=1 super 2")
        assert line.command.action == "create"
        assert line.command.args["ed_targets"] == {"Document": 1}
        assert line.command.args["super_obj"] == 2

    def test_exec_bindings(self):
        (line,) = parse_script("exec Process_request as Librarian Request=4 AvailableCopy=3")
        assert line.command.args["bindings"] == {"Request": 4, "AvailableCopy": 3}

    def test_assert_generation(self):
        (line,) = parse_script("assert 3.AvailableCopy generation=2")
        assert line.command.args["predicate"] == "generation"
        assert line.command.args["generation"] == 2

    def test_fail_wrapper(self):
        (line,) = parse_script("fail migrate 3 -> BlockedCopy as Librarian")
        assert line.expect_failure is True
        assert line.command.action == "migrate"

    def test_fail_cannot_wrap_assert(self):
        with pytest.raises(ScriptError):
            parse_script("fail assert 3.Copy active")

    def test_unknown_command(self):
        with pytest.raises(ScriptError):
            parse_script("teleport 3")

    def test_unknown_predicate(self):
        with pytest.raises(ScriptError):
            parse_script("assert 3.Copy glowing")

    def test_comments_and_blanks_are_skipped(self):
        lines = parse_script("# intro\n\ncreate Document as Logistic_service  # tail\n")
        assert len(lines) == 1

    def test_quoted_modify_value(self):
        (line,) = parse_script('modify 1.Document.title = "war and peace" as Librarian')
        assert line.command.args["value"] == "war and peace"


class TestRunner:
    def test_loan_cycle_script_passes(self, corpus_model, loan_script_text):
        runner = ScriptRunner(corpus_model)
        result = runner.run(parse_script(loan_script_text))
        assert result.passed, [
            (line.line_no, line.message) for line in result.failures
        ]

    def test_failed_assertion_is_reported(self, corpus_model):
        script = "create Document as Logistic_service\nassert 1.Document inactive\n"
        result = ScriptRunner(corpus_model).run(parse_script(script))
        assert not result.passed
        assert result.failures[0].line_no == 2

    def test_unexpected_success_fails_a_fail_line(self, corpus_model):
        script = "fail create Document as Logistic_service\n"
        result = ScriptRunner(corpus_model).run(parse_script(script))
        assert not result.passed
        assert "expected failure" in result.failures[0].message

    def test_unknown_object_fails_gracefully(self, corpus_model):
        script = "query 7.Document as Librarian\n"
        result = ScriptRunner(corpus_model).run(parse_script(script))
        assert not result.passed

    def test_runner_reuses_world(self, corpus_model):
        runner = ScriptRunner(corpus_model)
        runner.run(parse_script("create Document as Logistic_service"))
        result = runner.run(parse_script("assert 1.Document active"))
        assert result.passed
