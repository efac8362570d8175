import os

from hypothesis import HealthCheck, settings

# Deterministic, CI-friendly hypothesis runs: derandomized with a modest
# example budget (the algebra properties are cheap but matrix-valued).
settings.register_profile(
    "default",
    derandomize=True,
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile(
    "thorough",
    derandomize=False,
    max_examples=300,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))
