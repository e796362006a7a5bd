from __future__ import annotations

import random

import pytest

from iasdo.errors import MultipleRootsError, UnknownClassError
from iasdo.model import (
    AccessView,
    LinkMode,
    ancestors,
    direct_supers,
    ds_root,
    effective_access_view,
)

from helpers import all_super_path_nodes, build_model, chain_model, random_model


class TestDirectSupers:
    def test_chain_borrowed_copy(self):
        model = chain_model()
        assert direct_supers(model, "BorrowedCopy") == {
            ("AvailableCopy", LinkMode.IMPERATIVE)
        }

    def test_root_has_none(self):
        assert direct_supers(chain_model(), "Copy") == set()

    def test_isolated_class(self):
        model = build_model(["A", "B"], ds=[("B", "A", "imperative")])
        assert direct_supers(model, "A") == set()

    def test_unknown_class(self):
        with pytest.raises(UnknownClassError):
            direct_supers(chain_model(), "Ghost")

    def test_corpus_multi_specialisation(self, corpus_model):
        supers = direct_supers(corpus_model, "BorrowedCopy")
        assert ("AvailableCopy", LinkMode.IMPERATIVE) in supers
        assert ("BlockedCopy", LinkMode.OPTIONAL) in supers


class TestAncestors:
    def test_chain_returned_copy(self):
        assert ancestors(chain_model(), "ReturnedCopy") == {
            "BorrowedCopy",
            "AvailableCopy",
            "Copy",
        }

    def test_root_is_empty(self):
        assert ancestors(chain_model(), "Copy") == set()

    def test_corpus_returned_copy_includes_blocked(self, corpus_model):
        result = ancestors(corpus_model, "ReturnedCopy")
        assert {"BorrowedCopy", "AvailableCopy", "BlockedCopy", "Copy"} <= result

    def test_unknown_class(self):
        with pytest.raises(UnknownClassError):
            ancestors(chain_model(), "Ghost")

    def test_matches_path_enumeration_on_random_dags(self):
        rng = random.Random(1207)
        for _ in range(120):
            model = random_model(rng)
            for cls in model.class_by_name:
                assert ancestors(model, cls) == all_super_path_nodes(model, cls)

    def test_transitivity(self):
        rng = random.Random(88)
        for _ in range(60):
            model = random_model(rng)
            for cls in model.class_by_name:
                closure = ancestors(model, cls)
                for ancestor in closure:
                    assert ancestors(model, ancestor) <= closure

    def test_direct_supers_subset_of_ancestors(self, corpus_model):
        for cls in corpus_model.class_by_name:
            names = {name for name, _ in direct_supers(corpus_model, cls)}
            assert names <= ancestors(corpus_model, cls)


class TestDsRoot:
    def test_corpus_borrowing(self, corpus_model):
        assert ds_root(corpus_model, "Borrowing") == "Request"

    def test_root_is_its_own_root(self, corpus_model):
        assert ds_root(corpus_model, "Copy") == "Copy"

    def test_two_disjoint_chains(self):
        model = build_model(
            ["A", "B", "C", "D"],
            ds=[("A", "B", "imperative"), ("C", "D", "imperative")],
        )
        assert ds_root(model, "A") == "B"
        assert ds_root(model, "C") == "D"

    def test_multiple_roots_error(self):
        model = build_model(
            ["A", "B", "C"],
            ds=[("A", "B", "optional"), ("A", "C", "optional")],
        )
        with pytest.raises(MultipleRootsError):
            ds_root(model, "A")

    def test_total_on_validated_corpus(self, corpus_model):
        linked = {l.sub for l in corpus_model.ds_links}
        linked |= {l.super for l in corpus_model.ds_links}
        for cls in linked:
            assert ds_root(corpus_model, cls) in ("Copy", "Request")


class TestEffectiveAccessView:
    def test_available_copy(self, corpus_model):
        view = effective_access_view(corpus_model, "AvailableCopy")
        assert view.attributes == {
            "available_copy_number",
            "available_date",
            "copy_code",
            "document_number",
        }
        assert view.methods == {"Borrow", "Block"}

    def test_borrowed_copy(self, corpus_model):
        view = effective_access_view(corpus_model, "BorrowedCopy")
        assert view.attributes == {
            "available_copy_number",
            "copy_code",
            "document_number",
            "borrowing_date",
        }
        assert view.methods == {"Return", "Lose"}

    def test_no_declaration_gives_own_properties(self, corpus_model):
        view = effective_access_view(corpus_model, "Document")
        assert view.attributes == {"document_number", "title"}
        assert view.methods == set()

    def test_empty_declaration_gives_own_properties(self):
        model = build_model(
            [("A", ("x",), ("m",)), ("B", ("y",), ())],
            ds=[("A", "B", "imperative")],
            views=[AccessView("A")],
        )
        view = effective_access_view(model, "A")
        assert view.attributes == {"x"}
        assert view.methods == {"m"}

    def test_always_contains_own_properties(self, corpus_model):
        for cls in corpus_model.classes:
            view = effective_access_view(corpus_model, cls.name)
            assert set(cls.attributes) <= view.attributes
            assert set(cls.methods) <= view.methods

    def test_selection_excludes_unselected_ancestor_methods(self, corpus_model):
        # Copy declares Register, but no access view selects it.
        view = effective_access_view(corpus_model, "AvailableCopy")
        assert "Register" not in view.methods


class TestModelConstruction:
    def test_duplicate_class_rejected(self):
        with pytest.raises(ValueError, match="duplicate class"):
            build_model(["A", "A"])

    def test_unresolved_reference_rejected(self):
        with pytest.raises(ValueError, match="undeclared class"):
            build_model(["A"], ed=[("A", "B", "imperative")])

    def test_self_link_rejected(self):
        with pytest.raises(ValueError, match="itself"):
            build_model(["A"], ds=[("A", "A", "imperative")])

    def test_canonicalized_ignores_declaration_order(self):
        a = build_model(["B", "A"], ds=[("B", "A", "imperative")])
        b = build_model(["A", "B"], ds=[("B", "A", "imperative")])
        assert a != b
        assert a.canonicalized() == b.canonicalized()
