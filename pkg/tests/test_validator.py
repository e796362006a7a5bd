from __future__ import annotations

import random

import pytest

from iasdo.conditions import Atom, Not
from iasdo.errors import UnknownClassError, UnknownProcessError
from iasdo.model import (
    AccessView,
    Effect,
    EffectKind,
    ModelSpec,
    PrivilegeGrant,
    ProcessDef,
    Privilege,
    ds_root,
)
from iasdo.validator import Severity, missing_r2_grants, reaches_input, validate

from helpers import (
    brute_force_cyclic,
    brute_force_reaches,
    build_model,
    dependency_edges,
    random_model,
)


def rules_of(report, severity=None):
    return [
        (d.rule, d.elements)
        for d in report.diagnostics
        if severity is None or d.severity is severity
    ]


def test_corpus_is_clean(corpus_model):
    report = validate(corpus_model)
    assert report.is_clean, report.diagnostics


def test_validate_is_pure_and_idempotent(corpus_model):
    assert validate(corpus_model) == validate(corpus_model)


class TestV1:
    def test_two_cycle(self):
        model = build_model(
            ["A", "B"], ed=[("A", "B", "imperative"), ("B", "A", "imperative")]
        )
        report = validate(model)
        assert ("V1", ("A", "B")) in rules_of(report)

    def test_mixed_ed_ds_cycle(self):
        model = build_model(
            ["A", "B", "C"],
            ed=[("A", "B", "optional")],
            ds=[("B", "C", "imperative"), ("C", "A", "imperative")],
        )
        assert any(rule == "V1" for rule, _ in rules_of(validate(model)))

    def test_matches_brute_force_on_random_graphs(self):
        rng = random.Random(3003)
        for _ in range(220):
            model = random_model(rng)
            report = validate(model)
            expected = brute_force_cyclic(
                sorted(model.class_by_name), dependency_edges(model)
            )
            assert bool(report.by_rule("V1")) == expected


class TestV2:
    def test_two_rootless_supers(self):
        model = build_model(
            ["A", "B", "C"],
            ds=[("A", "B", "optional"), ("A", "C", "optional")],
        )
        report = validate(model)
        assert ("V2", ("A", "B", "C")) in rules_of(report)

    def test_clean_report_implies_single_roots_and_dag(self):
        rng = random.Random(99)
        for _ in range(120):
            model = random_model(rng)
            report = validate(model)
            if report.has_errors:
                continue
            assert not brute_force_cyclic(
                sorted(model.class_by_name), dependency_edges(model)
            )
            linked = {l.sub for l in model.ds_links} | {l.super for l in model.ds_links}
            for cls in linked:
                ds_root(model, cls)  # must not raise on a clean model


class TestV3:
    def test_mono_specialisation_must_be_imperative(self):
        model = build_model(["A", "B"], ds=[("A", "B", "optional")])
        assert ("V3", ("A", "B")) in rules_of(validate(model))

    def test_multi_specialisation_may_be_optional(self):
        model = build_model(
            ["A", "B", "C"],
            ds=[("A", "B", "optional"), ("A", "C", "optional")],
        )
        assert not any(rule == "V3" for rule, _ in rules_of(validate(model)))


class TestV4:
    def test_nonexistent_property(self):
        model = build_model(
            [("A", ("x",), ()), ("B", ("y",), ())],
            ds=[("A", "B", "imperative")],
            views=[AccessView("A", (("B", "nope"),))],
        )
        report = validate(model)
        assert ("V4", ("A", "B.nope")) in rules_of(report, Severity.ERROR)

    def test_non_ancestor_selection(self):
        model = build_model(
            [("A", ("x",), ()), ("B", ("y",), ())],
            views=[AccessView("A", (("B", "y"),))],
        )
        assert ("V4", ("A", "B.y")) in rules_of(validate(model), Severity.ERROR)

    def test_optional_ancestor_is_a_warning(self):
        model = build_model(
            [("A", ("x",), ()), ("B", ("y",), ()), ("C", (), ()), ("Root", (), ())],
            ds=[
                ("A", "B", "optional"),
                ("A", "C", "optional"),
                ("B", "Root", "imperative"),
                ("C", "Root", "imperative"),
            ],
            views=[AccessView("A", (("B", "y"),))],
        )
        report = validate(model)
        assert ("V4", ("A", "B.y")) in rules_of(report, Severity.WARNING)
        assert report.error_count == 0

    def test_imperative_chain_selection_is_silent(self, corpus_model):
        assert not validate(corpus_model).by_rule("V4")


class TestV5:
    def test_non_ancestor_back_inactive(self):
        model = build_model(
            ["A", "B", "C"],
            ds=[("A", "B", "imperative")],
            back=[("A", "C")],
        )
        assert ("V5", ("A", "C")) in rules_of(validate(model))

    def test_transitive_ancestor_is_fine(self):
        model = build_model(
            ["A", "B", "C"],
            ds=[("A", "B", "imperative"), ("B", "C", "imperative")],
            back=[("A", "C")],
        )
        assert not validate(model).by_rule("V5")


class TestV6:
    def test_loop_to_non_ancestor(self):
        model = build_model(
            ["A", "B", "C"],
            ds=[("A", "B", "imperative")],
            loops=[("A", "C")],
        )
        assert ("V6", ("A", "C")) in rules_of(validate(model))


def simple_process(name="P", inputs=("A",), outputs=("B",), pre=None, post=None, effects=()):
    return ProcessDef(
        name,
        frozenset(inputs),
        frozenset(outputs),
        pre or Atom(inputs[0]),
        post or Atom(outputs[0]),
        tuple(effects),
    )


class TestV7:
    def test_precondition_atom_outside_inputs(self):
        model = build_model(
            ["A", "B"],
            ds=[("B", "A", "imperative")],
            processes=[simple_process(pre=Atom("B"))],
        )
        assert ("V7", ("P", "B")) in rules_of(validate(model))

    def test_postcondition_atom_outside_outputs(self):
        model = build_model(
            ["A", "B"],
            ds=[("B", "A", "imperative")],
            processes=[simple_process(post=Atom("A"))],
        )
        assert ("V7", ("P", "A")) in rules_of(validate(model))


class TestV8:
    def test_multi_step_migration_rejected(self):
        model = build_model(
            ["A", "B", "C"],
            ds=[("B", "A", "imperative"), ("C", "B", "imperative")],
            processes=[
                simple_process(
                    inputs=("A",),
                    outputs=("C",),
                    effects=[Effect(EffectKind.MIGRATE, "C", "A")],
                )
            ],
        )
        report = validate(model)
        assert any(
            rule == "V8" and elements[0] == "P" for rule, elements in rules_of(report)
        )

    def test_loop_covered_migration_allowed(self):
        model = build_model(
            ["A", "B"],
            ds=[("B", "A", "imperative")],
            loops=[("B", "A")],
            processes=[
                simple_process(
                    inputs=("B",),
                    outputs=("A",),
                    effects=[Effect(EffectKind.MIGRATE, "A", "B")],
                )
            ],
        )
        assert not validate(model).by_rule("V8")

    def test_target_outside_outputs(self):
        model = build_model(
            ["A", "B", "C"],
            ds=[("B", "A", "imperative"), ("C", "B", "imperative")],
            processes=[
                simple_process(
                    inputs=("A",),
                    outputs=("B",),
                    effects=[
                        Effect(EffectKind.MIGRATE, "B", "A"),
                        Effect(EffectKind.MIGRATE, "C", "B"),
                    ],
                )
            ],
        )
        report = validate(model)
        assert any(
            rule == "V8" and "effect[1]" in elements
            for rule, elements in rules_of(report)
        )


class TestV9:
    def test_not_in_condition_warns(self):
        model = build_model(
            ["A", "B"],
            ds=[("B", "A", "imperative")],
            processes=[simple_process(pre=Not(Atom("A")))],
        )
        report = validate(model)
        assert ("V9", ("P",)) in rules_of(report, Severity.WARNING)
        assert report.error_count == 0


class TestR1:
    def test_zero_length_path(self, corpus_model):
        assert reaches_input(corpus_model, "Register_copy", "AvailableCopy")

    def test_borrowed_copy_reaches_available(self, corpus_model):
        assert reaches_input(corpus_model, "Process_request", "BorrowedCopy")

    def test_loan_reaches_via_two_hops(self, corpus_model):
        assert reaches_input(corpus_model, "Borrow", "Loan")
        assert not reaches_input(corpus_model, "Borrow", "Loan", direct_only=True)

    def test_strict_mode_reports_loan(self, corpus_model):
        report = validate(corpus_model, strict_r1_direct=True)
        assert ("R1", ("Borrow", "Loan")) in rules_of(report)

    def test_unknown_names(self, corpus_model):
        with pytest.raises(UnknownProcessError):
            reaches_input(corpus_model, "Ghost", "Loan")
        with pytest.raises(UnknownClassError):
            reaches_input(corpus_model, "Borrow", "Ghost")

    def test_matches_brute_force_on_random_models(self):
        rng = random.Random(515)
        checked = 0
        for _ in range(220):
            model = random_model(rng)
            edges = dependency_edges(model)
            report = validate(model)
            r1 = {elements for rule, elements in rules_of(report) if rule == "R1"}
            for proc in model.processes:
                for output in proc.outputs:
                    expected = brute_force_reaches(edges, output, proc.inputs)
                    assert reaches_input(model, proc.name, output) == expected
                    assert ((proc.name, output) in r1) == (not expected)
                    checked += 1
        assert checked > 200


class TestR2:
    def test_removing_any_required_grant_adds_exactly_one_diagnostic(
        self, corpus_model
    ):
        baseline = validate(corpus_model)
        assert not baseline.by_rule("R2")
        required = set()
        for resp in corpus_model.responsibilities:
            proc = corpus_model.process_by_name[resp.process]
            required |= {(resp.role, c, Privilege.CREATE) for c in proc.outputs}
            required |= {(resp.role, c, Privilege.QUERY) for c in proc.inputs}
        for grant in corpus_model.privilege_grants:
            if (grant.role, grant.class_name, grant.privilege) not in required:
                continue
            smaller = ModelSpec(
                classes=corpus_model.classes,
                ed_links=corpus_model.ed_links,
                ds_links=corpus_model.ds_links,
                back_inactive_decls=corpus_model.back_inactive_decls,
                access_views=corpus_model.access_views,
                loops=corpus_model.loops,
                processes=corpus_model.processes,
                roles=corpus_model.roles,
                privilege_grants=tuple(
                    g for g in corpus_model.privilege_grants if g != grant
                ),
                responsibilities=corpus_model.responsibilities,
            )
            report = validate(smaller)
            assert [d.elements for d in report.by_rule("R2")] == [
                (grant.role, grant.class_name)
            ]

    def test_fix_suggestions_match_diagnostics(self, corpus_model):
        smaller = ModelSpec(
            classes=corpus_model.classes,
            ed_links=corpus_model.ed_links,
            ds_links=corpus_model.ds_links,
            back_inactive_decls=corpus_model.back_inactive_decls,
            access_views=corpus_model.access_views,
            loops=corpus_model.loops,
            processes=corpus_model.processes,
            roles=corpus_model.roles,
            privilege_grants=tuple(
                g
                for g in corpus_model.privilege_grants
                if not (g.role == "Librarian" and g.class_name == "Loan")
            ),
            responsibilities=corpus_model.responsibilities,
        )
        fixes = missing_r2_grants(smaller)
        assert fixes == (PrivilegeGrant("Librarian", "Loan", Privilege.CREATE),)
        assert missing_r2_grants(corpus_model) == ()


def test_report_ordering_is_deterministic():
    model = build_model(
        ["A", "B", "C"],
        ed=[("A", "B", "imperative"), ("B", "A", "imperative")],
        ds=[("C", "A", "optional")],
    )
    first = validate(model)
    second = validate(model)
    assert first.diagnostics == second.diagnostics
    rules = [d.rule for d in first.diagnostics]
    assert rules == sorted(rules, key=lambda r: ("V1 V2 V3 V4 V5 V6 V7 V8 V9 R1 R2".split().index(r)))
