import math

import numpy as np
import pytest

import contraction_lab as cl
from contraction_lab.contraction import ContractionKind, SelfMap

from helpers import line_space, stretched_space, unit_interval

ALL_TAGS = (
    "partial",
    "partial_dual",
    "weak",
    "weak_dual",
    "bianchini",
    "chatterjea_bianchini",
)


def two_point_space():
    return cl.FiniteSemimetricSpace(("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]))


class TestContractionKind:
    def test_constants_per_tag(self):
        assert ContractionKind("partial", alpha=0.3, beta=0.4).constants() == {
            "alpha": 0.3,
            "beta": 0.4,
        }
        assert ContractionKind("weak", alpha=0.3, delta=0.2).constants() == {
            "alpha": 0.3,
            "delta": 0.2,
        }
        assert ContractionKind("bianchini", beta=0.8).constants() == {"beta": 0.8}

    def test_rejects_missing_constant(self):
        with pytest.raises(ValueError):
            ContractionKind("partial", alpha=0.3)

    def test_rejects_extra_constant(self):
        with pytest.raises(ValueError):
            ContractionKind("bianchini", beta=0.5, alpha=0.1)

    def test_rejects_negative_constant(self):
        with pytest.raises(ValueError):
            ContractionKind("partial", alpha=-0.1, beta=0.2)

    def test_rejects_unknown_tag(self):
        with pytest.raises(ValueError):
            ContractionKind("banach", alpha=0.5)

    def test_json_round_trip(self):
        for kind in (
            ContractionKind("partial", alpha=0.3, beta=0.4),
            ContractionKind("weak_dual", alpha=0.2, delta=0.7),
            ContractionKind("chatterjea_bianchini", beta=0.9),
        ):
            assert ContractionKind.from_json(kind.to_json()) == kind

    def test_from_json_rejects_stray_fields(self):
        with pytest.raises(ValueError):
            ContractionKind.from_json({"tag": "bianchini", "beta": 0.5, "gamma": 1})


class TestSelfMap:
    def test_requires_exactly_one_representation(self):
        with pytest.raises(ValueError):
            SelfMap()
        with pytest.raises(ValueError):
            SelfMap(images=(0,), expr="x")

    def test_images_validation_against_space(self):
        space = two_point_space()
        with pytest.raises(cl.StructuralError):
            SelfMap(images=(0, 2)).validate_for(space)
        with pytest.raises(cl.StructuralError):
            SelfMap(images=(0,)).validate_for(space)

    def test_expr_map_needs_interval_space(self):
        with pytest.raises(cl.StructuralError):
            SelfMap(expr="x/2").validate_for(two_point_space())
        with pytest.raises(cl.StructuralError):
            SelfMap(images=(0, 1)).validate_for(unit_interval())

    def test_expr_leaving_interval_rejected(self):
        with pytest.raises(cl.StructuralError) as err:
            SelfMap(expr="x*3").validate_for(unit_interval())
        assert "leaves the interval" in str(err.value)

    def test_from_json_rejects_bool_images(self):
        with pytest.raises(ValueError):
            SelfMap.from_json({"images": [0, True]})

    def test_json_round_trip(self):
        table = SelfMap(images=(1, 0, 1))
        assert SelfMap.from_json(table.to_json()) == table
        formula = SelfMap(expr="x/2")
        assert SelfMap.from_json(formula.to_json()) == formula


class TestDefiningRhs:
    def test_all_six_families_on_worked_pair(self):
        space = stretched_space()
        to_x = SelfMap(images=(0, 0, 0))
        cases = {
            ContractionKind("partial", alpha=0.5, beta=0.3): 1.8,
            ContractionKind("partial_dual", alpha=0.5, beta=0.3): 1.8,
            ContractionKind("weak", alpha=0.5, delta=0.2): 1.7,
            ContractionKind("weak_dual", alpha=0.5, delta=0.2): 1.7,
            ContractionKind("bianchini", beta=0.8): 0.8,
            ContractionKind("chatterjea_bianchini", beta=0.8): 0.8,
        }
        for kind, expected in cases.items():
            assert cl.defining_rhs(kind, space, to_x, "y", "z") == pytest.approx(
                expected, rel=1e-12
            ), kind.tag

    def test_primal_dual_asymmetry(self):
        space = line_space()
        mapping = SelfMap(images=(0, 0, 1))
        primal = cl.defining_rhs(
            ContractionKind("partial", alpha=0.0, beta=1.0), space, mapping, "c", "a"
        )
        dual = cl.defining_rhs(
            ContractionKind("partial_dual", alpha=0.0, beta=1.0), space, mapping, "c", "a"
        )
        assert primal == space.d(2, 1)
        assert dual == space.d(0, 0)


class TestVerifyContraction:
    def test_half_map_is_partial_contraction(self):
        cert = cl.verify_contraction(
            unit_interval(), SelfMap(expr="x/2"), ContractionKind("partial", alpha=0.5, beta=0.0)
        )
        assert cert.passed
        assert cert.scope == "sampled"
        assert cert.margin >= -1e-12

    def test_constant_map_passes_everything(self):
        space = stretched_space()
        const = SelfMap(images=(1, 1, 1))
        for tag in ALL_TAGS:
            kind = (
                ContractionKind(tag, beta=0.1)
                if tag in ("bianchini", "chatterjea_bianchini")
                else ContractionKind(tag, alpha=0.1, **(
                    {"beta": 0.0} if tag.startswith("partial") else {"delta": 0.0}
                ))
            )
            assert cl.verify_contraction(space, const, kind).passed, tag

    def test_identity_fails_bianchini_with_witness(self):
        cert = cl.verify_contraction(
            two_point_space(), SelfMap(images=(0, 1)), ContractionKind("bianchini", beta=0.9)
        )
        assert not cert.passed
        assert cert.witness == cl.contraction.PairWitness("a", "b", 1.0, 0.0)
        assert len(cert.violations) == 2

    def test_swap_fails_bianchini(self):
        cert = cl.verify_contraction(
            two_point_space(), SelfMap(images=(1, 0)), ContractionKind("bianchini", beta=0.9)
        )
        assert not cert.passed
        assert cert.violations[0].rhs == pytest.approx(0.9)

    def test_scaled_map_margin(self):
        cert = cl.verify_contraction(
            unit_interval(), SelfMap(expr="x/2"), ContractionKind("partial", alpha=0.6, beta=0.0)
        )
        assert cert.passed
        # coincident sample pairs pin the margin at zero
        assert cert.margin == 0.0
        assert cert.witness.lhs == cert.witness.rhs

    def test_interval_samples_are_seeded(self):
        kind = ContractionKind("partial", alpha=0.5, beta=0.0)
        a = cl.verify_contraction(unit_interval(), SelfMap(expr="x/2"), kind)
        b = cl.verify_contraction(unit_interval(), SelfMap(expr="x/2"), kind)
        assert a == b


class TestEstimateMinConstants:
    def test_constant_map_needs_nothing(self):
        est = cl.estimate_min_constants(stretched_space(), SelfMap(images=(0, 0, 0)), "bianchini")
        assert est.beta_star == 0.0
        assert not est.unbounded

    def test_identity_is_unbounded_for_bianchini(self):
        est = cl.estimate_min_constants(stretched_space(), SelfMap(images=(0, 1, 2)), "bianchini")
        assert est.unbounded
        assert est.witness.lhs > 0.0

    def test_swap_needs_beta_one(self):
        est = cl.estimate_min_constants(two_point_space(), SelfMap(images=(1, 0)), "bianchini")
        assert est.beta_star == pytest.approx(1.0)

    def test_half_map_partial_frontier(self):
        est = cl.estimate_min_constants(unit_interval(), SelfMap(expr="x/2"), "partial")
        at_zero = est.frontier[0]
        assert at_zero.secondary == 0.0
        assert at_zero.alpha_min == pytest.approx(0.5, abs=1e-9)
        rate, kind = est.best_rate()
        assert rate <= 0.5 + 1e-9
        assert kind is not None and kind.tag == "partial"

    def test_frontier_alpha_never_negative(self):
        est = cl.estimate_min_constants(stretched_space(), SelfMap(images=(0, 0, 1)), "weak")
        assert all(pt.alpha_min >= 0.0 for pt in est.frontier)

    def test_rejects_unknown_tag(self):
        with pytest.raises(ValueError):
            cl.estimate_min_constants(stretched_space(), SelfMap(images=(0, 0, 0)), "banach")


class TestStepContractionFactor:
    def test_partial_sum(self):
        result = cl.step_contraction_factor(
            ContractionKind("partial", alpha=0.3, beta=0.4), cl.additive()
        )
        assert result.value == pytest.approx(0.7, rel=1e-12)
        assert result.derivable

    def test_partial_at_one_not_derivable(self):
        result = cl.step_contraction_factor(
            ContractionKind("partial", alpha=0.6, beta=0.5), cl.additive()
        )
        assert not result.derivable
        assert result.value is None

    def test_partial_dual_ratio(self):
        result = cl.step_contraction_factor(
            ContractionKind("partial_dual", alpha=0.3, beta=0.4), cl.additive()
        )
        assert result.value == pytest.approx(0.5, rel=1e-12)

    def test_weak_ratio_with_caveat(self):
        result = cl.step_contraction_factor(
            ContractionKind("weak", alpha=0.3, delta=0.2), cl.additive()
        )
        assert result.value == pytest.approx(0.625, rel=1e-12)
        assert result.caveats

    def test_weak_dual_keeps_alpha(self):
        result = cl.step_contraction_factor(
            ContractionKind("weak_dual", alpha=0.4, delta=0.9), cl.additive()
        )
        assert result.value == pytest.approx(0.4, rel=1e-12)

    def test_bianchini_keeps_beta(self):
        result = cl.step_contraction_factor(ContractionKind("bianchini", beta=0.7), cl.maximum())
        assert result.value == pytest.approx(0.7, rel=1e-12)

    def test_cb_max_recovers_beta(self):
        result = cl.step_contraction_factor(
            ContractionKind("chatterjea_bianchini", beta=0.8), cl.maximum()
        )
        assert result.value == pytest.approx(0.8, abs=1e-12)

    def test_cb_additive(self):
        result = cl.step_contraction_factor(
            ContractionKind("chatterjea_bianchini", beta=0.4), cl.additive()
        )
        # inverse of t+1 at 2.5 is 1.5, reciprocal 2/3
        assert result.value == pytest.approx(2.0 / 3.0, rel=1e-12)

    def test_cb_zero_beta(self):
        result = cl.step_contraction_factor(
            ContractionKind("chatterjea_bianchini", beta=0.0), cl.additive()
        )
        assert result.value == 0.0 and result.derivable

    def test_cb_power_one_boundary(self):
        for beta, ok in ((0.49, True), (0.5, False), (0.51, False)):
            result = cl.step_contraction_factor(
                ContractionKind("chatterjea_bianchini", beta=beta), cl.power(1.0)
            )
            assert result.derivable is ok, beta


class TestApplicability:
    def test_partial_additive(self):
        record = cl.applicability(ContractionKind("partial", alpha=0.3, beta=0.4), cl.additive())
        assert record.applicable and record.unique
        assert record.rate == pytest.approx(0.7)
        assert record.certified
        assert [c.name for c in record.checklist] == [
            "constants",
            "homogeneity",
            "chain_bound_finite",
            "origin_continuity",
        ]

    def test_partial_bscaled_chain_gate(self):
        kind = ContractionKind("partial", alpha=0.3, beta=0.3)
        blocked = cl.applicability(kind, cl.bscaled(2.0))
        assert not blocked.applicable
        assert blocked.failed() == ["chain_bound_finite"]
        allowed = cl.applicability(kind, cl.bscaled(1.5))
        assert allowed.applicable

    def test_partial_dual_zero_slot_gate(self):
        kind = ContractionKind("partial_dual", alpha=0.3, beta=0.4)
        assert cl.applicability(kind, cl.additive()).applicable
        blocked = cl.applicability(kind, cl.bscaled(2.0))
        assert "zero_slot_bound" in blocked.failed()
        assert cl.applicability(kind, cl.bscaled(1.0)).applicable

    def test_weak_subadditivity_gate(self):
        kind = ContractionKind("weak", alpha=0.2, delta=0.3)
        assert cl.applicability(kind, cl.additive()).applicable
        assert cl.applicability(kind, cl.power(2.0)).applicable
        blocked = cl.applicability(kind, cl.power(0.5))
        assert "bounded_by_sum" in blocked.failed()

    def test_weak_uniqueness_only_at_zero_delta(self):
        with_delta = cl.applicability(ContractionKind("weak", alpha=0.2, delta=0.3), cl.additive())
        assert with_delta.applicable and not with_delta.unique
        no_delta = cl.applicability(ContractionKind("weak", alpha=0.2, delta=0.0), cl.additive())
        assert no_delta.applicable and no_delta.unique

    def test_weak_constants_gate(self):
        blocked = cl.applicability(ContractionKind("weak", alpha=0.5, delta=0.3), cl.additive())
        assert "constants" in blocked.failed()  # alpha + 2*delta >= 1

    def test_weak_dual_needs_only_alpha(self):
        record = cl.applicability(ContractionKind("weak_dual", alpha=0.4, delta=2.0), cl.additive())
        assert record.applicable and not record.unique
        assert record.rate == pytest.approx(0.4)

    def test_bianchini_gates(self):
        assert cl.applicability(ContractionKind("bianchini", beta=0.8), cl.maximum()).applicable
        blocked = cl.applicability(ContractionKind("bianchini", beta=0.8), cl.bscaled(2.0))
        assert "zero_slot_bound" in blocked.failed()
        at_one = cl.applicability(ContractionKind("bianchini", beta=1.0), cl.maximum())
        assert "constants" in at_one.failed()

    def test_cb_power_one_boundary(self):
        for beta, ok in ((0.49, True), (0.5, False), (0.51, False)):
            record = cl.applicability(
                ContractionKind("chatterjea_bianchini", beta=beta), cl.power(1.0)
            )
            assert record.applicable is ok, beta
            if not ok:
                assert "inverse_gap" in record.failed()

    def test_cb_max_applies_for_all_beta_below_one(self):
        for beta in (0.1, 0.5, 0.9, 0.95):
            record = cl.applicability(
                ContractionKind("chatterjea_bianchini", beta=beta), cl.maximum()
            )
            assert record.applicable and record.unique
            assert record.rate == pytest.approx(beta, abs=1e-12)

    def test_cb_bscaled_distance_continuity_gate(self):
        blocked = cl.applicability(
            ContractionKind("chatterjea_bianchini", beta=0.2), cl.bscaled(2.0)
        )
        assert not blocked.applicable
        assert "distance_continuity" in blocked.failed()
        allowed = cl.applicability(
            ContractionKind("chatterjea_bianchini", beta=0.2), cl.bscaled(1.0)
        )
        assert allowed.applicable

    def test_custom_phi_reports_uncertified(self):
        record = cl.applicability(
            ContractionKind("chatterjea_bianchini", beta=0.25), cl.custom("u+v")
        )
        assert record.applicable
        assert not record.certified

    def test_custom_phi_slow_chain_blocks(self):
        # at rate 2/3 the chain has not settled at the depth cutoff
        record = cl.applicability(
            ContractionKind("chatterjea_bianchini", beta=0.4), cl.custom("u+v")
        )
        assert not record.applicable
        assert record.failed() == ["chain_bound_finite"]

    def test_principle_names_are_descriptive(self):
        for tag in ALL_TAGS:
            kind = (
                ContractionKind(tag, beta=0.3)
                if tag in ("bianchini", "chatterjea_bianchini")
                else ContractionKind(tag, alpha=0.2, **(
                    {"beta": 0.1} if tag.startswith("partial") else {"delta": 0.1}
                ))
            )
            record = cl.applicability(kind, cl.additive())
            assert "contraction" in record.principle


class TestStepRateOnOrbits:
    def test_weak_dual_orbit_rate_is_alpha(self):
        # the dual cross term vanishes on adjacent orbit pairs, so the
        # defining inequality itself caps every step ratio at alpha
        space = unit_interval()
        mapping = SelfMap(expr="x/2")
        kind = ContractionKind("weak_dual", alpha=0.6, delta=5.0)
        cert = cl.verify_contraction(space, mapping, kind)
        assert cert.passed
        trace = cl.picard_iterate(space, mapping, 1.0, max_iter=40)
        for prev, nxt in zip(trace.step_dists, trace.step_dists[1:]):
            assert nxt <= 0.6 * prev + 1e-12

    def test_weak_dual_rejects_orbit_rate_violator(self):
        # a chain a -> b -> c with unit steps cannot satisfy the dual form
        # for alpha < 1: the cross minimum is zero on the pair (c, b)
        cert = cl.verify_contraction(
            line_space(),
            SelfMap(images=(0, 0, 1)),
            ContractionKind("weak_dual", alpha=0.99, delta=100.0),
        )
        assert not cert.passed
