from . import evaluate, gen_toy, infer, ingest, sample_pairs, train

#: Command modules in the order `--help` lists them.
COMMAND_MODULES = (gen_toy, ingest, sample_pairs, train, infer, evaluate)

__all__ = ["COMMAND_MODULES"]
