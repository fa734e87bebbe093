"""chordwalk: expander extraction and random-walk search for cycles with
many chords, plus exact small-case oracles for everything the fast paths
claim."""

__version__ = "0.1.0"
