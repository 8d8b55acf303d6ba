from hypothesis import settings

settings.register_profile("deterministic", derandomize=True, max_examples=40,
                          deadline=None)
settings.load_profile("deterministic")
