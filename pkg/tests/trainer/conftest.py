import pytest

from exemplar_synth.sampler import sample_consistent_pairs, sample_inconsistent_pairs


@pytest.fixture()
def toy_pairs(toy_corpus, tiny_config):
    return sample_consistent_pairs(toy_corpus, tiny_config.sampler, 8) + sample_inconsistent_pairs(
        toy_corpus,
        tiny_config.sampler,
        8,
    )
