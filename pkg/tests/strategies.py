from hypothesis import strategies as st

from metricmag.spacegen import GeneratorConfig, SimilaritySampler


def similarity_spaces(min_n=2, max_n=6, denominator_bound=32):
    """Exact valid similarity spaces, drawn by the package sampler from a
    hypothesis-chosen seed (validity is re-checked by the constructor)."""
    return st.builds(
        lambda seed, n: SimilaritySampler(GeneratorConfig(seed, denominator_bound)).sample(n),
        st.integers(0, 2**32 - 1),
        st.integers(min_n, max_n),
    )
