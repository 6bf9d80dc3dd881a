from __future__ import annotations

from dataclasses import asdict, dataclass, fields

GLOBAL = 0  # pool_chunk value collapsing the feature map to one step
INIT_MODES = ("random", "pretrained")


@dataclass
class ClassifierConfig:
    """Hyperparameters of the convolution + LSTM classifier.

    ``pool_chunk`` is the width of the non-overlapping max-pooling windows
    over the feature map; ``GLOBAL`` (0) pools the whole map into a single
    recurrent step.
    """

    num_classes: int = 2
    dimension: int = 300
    num_filters: int = 100
    window: int = 5
    pool_chunk: int = 5
    lstm_hidden: int = 100
    dropout: float = 0.5
    max_doc_len: int = 400
    learning_rate: float = 1e-3
    epochs: int = 10
    batch_size: int = 32
    seed: int = 0
    init_mode: str = "random"
    init_scale: float = 0.05
    max_vocab: int = 0  # 0 = unbounded

    def __post_init__(self):
        if isinstance(self.pool_chunk, str):
            self.pool_chunk = GLOBAL if self.pool_chunk.lower() == "global" else int(self.pool_chunk)
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.max_doc_len < self.window:
            raise ValueError("max_doc_len must be >= window")
        if self.num_classes < 2:
            raise ValueError("num_classes must be >= 2")
        if self.pool_chunk < 0:
            raise ValueError("pool_chunk must be >= 1, or 0 for global pooling")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        if self.init_mode not in INIT_MODES:
            raise ValueError(f"init_mode must be one of {INIT_MODES}")
        for name in ("dimension", "num_filters", "lstm_hidden", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    @property
    def n_positions(self) -> int:
        return self.max_doc_len - self.window + 1

    @property
    def n_steps(self) -> int:
        """Length of the pooled sequence fed to the LSTM."""
        if self.pool_chunk == GLOBAL:
            return 1
        return -(-self.n_positions // self.pool_chunk)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_strings(cls, values: dict[str, str]) -> "ClassifierConfig":
        """Build from ``key -> text`` pairs, coercing each to the field type."""
        kwargs = {}
        types = {f.name: f.type for f in fields(cls)}
        for key, raw in values.items():
            if key not in types:
                raise KeyError(f"unknown classifier option {key!r}")
            kind = types[key]
            if key == "pool_chunk" or kind == "str":
                kwargs[key] = raw
            elif kind == "float":
                kwargs[key] = float(raw)
            else:
                kwargs[key] = int(raw)
        return cls(**kwargs)
