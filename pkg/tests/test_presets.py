import pytest

from promptmixer.compiler import compile_chain
from promptmixer.errors import ConfigError, UnknownModeError, UnknownPresetError
from promptmixer.presets import EASINGS, PersonalityPreset, RecallPlan


def current_faders(config):
    state = config.new_surface()
    return {fid: state.value(fid) for fid in config.personality_fader_ids()}


class TestPlanRecall:
    def test_plan_echoes_configuration(self, config):
        persona = config.presets.persona("Cynic")
        plan = config.presets.plan_recall("Cynic", current_faders(config))
        assert plan.starts == {fid: 0.0 for fid in persona.fader_targets}
        assert plan.targets == dict(persona.fader_targets)

    def test_surface_not_mutated_by_planning(self, config):
        state = config.new_surface()
        before = state.snapshot().payload_bytes()
        config.presets.plan_recall(
            "Guru", {fid: state.value(fid)
                     for fid in config.personality_fader_ids()})
        assert state.snapshot().payload_bytes() == before

    def test_reselect_after_full_recall_is_zero_motion(self, config):
        persona = config.presets.persona("Bestie")
        plan = config.presets.plan_recall("Bestie", current_faders(config))
        settled = plan.values_at(plan.duration_ms)
        again = config.presets.plan_recall("Bestie", settled)
        assert again.starts == again.targets == dict(persona.fader_targets)

    def test_unknown_preset(self, config):
        with pytest.raises(UnknownPresetError):
            config.presets.plan_recall("Stranger", current_faders(config))

    def test_unknown_mode(self, config):
        with pytest.raises(UnknownModeError):
            config.presets.mode("Daydream")


class TestTick:
    def test_linear_midpoint(self):
        plan = RecallPlan(moves=(("f", 0.0, 1.0),), duration_ms=800)
        assert plan.values_at(400) == {"f": 0.5}

    def test_boundaries_exact(self):
        plan = RecallPlan(moves=(("f", 0.1, 0.3), ("g", -0.7, 0.7)),
                          duration_ms=800)
        assert plan.values_at(0) == plan.starts
        assert plan.values_at(800) == plan.targets
        assert plan.values_at(5000) == plan.targets

    def test_negative_time_clamps_to_start(self):
        plan = RecallPlan(moves=(("f", 0.2, -0.9),), duration_ms=100)
        assert plan.values_at(-5) == {"f": 0.2}

    @pytest.mark.parametrize("easing", sorted(EASINGS))
    def test_trajectory_monotone_for_all_shipped_easings(self, easing):
        plan = RecallPlan(moves=(("up", -0.8, 0.9), ("down", 0.6, -0.4)),
                          duration_ms=800, easing=easing)
        times = range(0, 801, 50)
        ups = [plan.values_at(t)["up"] for t in times]
        downs = [plan.values_at(t)["down"] for t in times]
        assert ups == sorted(ups)
        assert downs == sorted(downs, reverse=True)
        for t in times:
            assert -0.8 <= plan.values_at(t)["up"] <= 0.9
            assert -0.4 <= plan.values_at(t)["down"] <= 0.6

    def test_convergence_for_every_shipped_preset(self, config):
        for preset_id, persona in config.presets.personas.items():
            plan = config.presets.plan_recall(preset_id,
                                              current_faders(config))
            final = plan.values_at(plan.duration_ms)
            assert final == dict(persona.fader_targets)

    def test_bad_duration_rejected(self):
        with pytest.raises(ConfigError):
            RecallPlan(moves=(("f", 0.0, 1.0),), duration_ms=0)

    def test_unknown_easing_rejected(self):
        with pytest.raises(ConfigError):
            RecallPlan(moves=(("f", 0.0, 1.0),), duration_ms=100,
                       easing="bounce")


class TestModeSelection:
    def test_selected_mode_reaches_compiler_output(self, config):
        state = config.new_surface()
        knob = state.spec("mode")
        state.set_control("mode", knob.position_labels.index("Explore"))
        mode = config.mode_for_position(state.value("mode"))
        chain = compile_chain(state.snapshot(), "ocean", mode, config.table)
        assert config.presets.mode("Explore").task_instruction \
            in chain.system_text

    def test_last_mode_selection_wins(self, config):
        state = config.new_surface()
        knob = state.spec("mode")
        state.set_control("mode", knob.position_labels.index("Critique"))
        state.set_control("mode", knob.position_labels.index("Refine"))
        mode = config.mode_for_position(state.value("mode"))
        chain = compile_chain(state.snapshot(), "ocean", mode, config.table)
        assert config.presets.mode("Refine").task_instruction \
            in chain.system_text
        assert config.presets.mode("Critique").task_instruction \
            not in chain.system_text


class TestPathIndependence:
    def test_recall_then_compile_matches_direct_set(self, config):
        mode = config.presets.mode("Compose")
        persona = config.presets.persona("Accountant")

        recalled = config.new_surface()
        plan = config.presets.plan_recall(
            "Accountant",
            {fid: recalled.value(fid) for fid in persona.fader_targets})
        for fid, value in plan.values_at(plan.duration_ms).items():
            recalled.set_control(fid, value)

        direct = config.new_surface()
        for fid, target in persona.fader_targets.items():
            direct.set_control(fid, target)

        assert recalled.snapshot().payload_bytes() \
            == direct.snapshot().payload_bytes()
        via_recall = compile_chain(recalled.snapshot(), "ocean dream", mode,
                                   config.table)
        via_direct = compile_chain(direct.snapshot(), "ocean dream", mode,
                                   config.table)
        # chains agree on everything except the mutation-count provenance
        assert via_recall.messages == via_direct.messages
        assert via_recall.sampling == via_direct.sampling


def test_persona_targets_validated():
    with pytest.raises(ConfigError):
        PersonalityPreset(id="x", description="", fader_targets={"f": 1.5})
