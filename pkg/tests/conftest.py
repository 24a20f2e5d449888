import pytest

from sonofeat.synth import SynthSpec, synth


@pytest.fixture(scope="session")
def clean_vowel():
    """Jitter-free 120 Hz three-formant vowel with ground-truth epochs."""
    spec = SynthSpec(120.0, [(700, 130, 1.0), (1220, 70, 0.7), (2600, 160, 0.4)],
                     0.5)
    return synth(spec, seed=11)


@pytest.fixture(scope="session")
def natural_vowel():
    """Mildly jittered/noisy vowel closer to real voiced speech."""
    spec = SynthSpec(120.0, [(700, 130, 1.0), (1220, 70, 0.7), (2600, 160, 0.4)],
                     0.5, jitter=0.005, noise_floor=1e-4)
    return synth(spec, seed=3)
