"""Virtual mixing console that compiles control state into LLM prompt chains."""

from .compiler import (
    DescriptorEntry,
    DescriptorTable,
    PromptChain,
    build_sections,
    compile_chain,
    quantize,
    render_clause,
    temperature_map,
)
from .config import AppConfig, default_config_path, load_config
from .console import Engine, ReplayResult, SessionLog, replay
from .gateway import (
    CompletionRequest,
    CompletionResult,
    Gateway,
    HttpBackend,
    StubBackend,
    stub_complete,
)
from .midi import MidiAdapter, MidiDecoder, MidiEvent, MidiMapping, decode, map_event
from .presets import ModePreset, PersonalityPreset, PresetBank, RecallPlan
from .slate import Board, Vocabulary
from .surface import (
    ControlSnapshot,
    ControlSpec,
    ControlSurfaceState,
    Group,
    Kind,
    normalize_midi,
)

__version__ = "0.1.0"
