import hypothesis

hypothesis.settings.register_profile(
    "unishift",
    derandomize=True,
    deadline=None,
    max_examples=25,
)
hypothesis.settings.load_profile("unishift")
