"""
Hash-vocabulary tokenizer for the built-in encoder.

Words are split on whitespace and punctuation; characters of scripts written
without spaces become one token each. Tokens map to ids through CRC32, so
no vocabulary file is needed.
"""

import re
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import torch

from dimabsa.utils.helpers import is_cjk_char, stable_hash

PAD_ID = 0

_WORD_PATTERN = re.compile(r"\w+|[^\w\s]")


@dataclass(frozen=True)
class HashTokenizer:
    """
    Deterministic whitespace/codepoint tokenizer.

    Attributes:
        vocab_size: Number of ids including the padding id 0
        max_seq_len: Sequences are truncated to this many tokens
    """
    vocab_size: int = 8192
    max_seq_len: int = 128

    def split(self, text: str) -> List[str]:
        """Split text into surface tokens."""
        tokens: List[str] = []
        for match in _WORD_PATTERN.finditer(text):
            word = match.group()
            if not any(is_cjk_char(c) for c in word):
                tokens.append(word)
                continue
            run = ""
            for char in word:
                if is_cjk_char(char):
                    if run:
                        tokens.append(run)
                        run = ""
                    tokens.append(char)
                else:
                    run += char
            if run:
                tokens.append(run)
        return tokens

    def encode(self, text: str) -> List[int]:
        """Map text to ids in ``[1, vocab_size)``, truncated to ``max_seq_len``."""
        ids = [stable_hash(t, self.vocab_size - 1, offset=1) for t in self.split(text)]
        return ids[: self.max_seq_len]

    def batch_encode(self, texts: Sequence[str]) -> Tuple[torch.Tensor, torch.Tensor]:
        """
        Encode and right-pad a batch.

        Returns:
            ``(input_ids [B, T] long, mask [B, T] bool)``; T is at least 1
        """
        encoded = [self.encode(t) for t in texts]
        width = max([1] + [len(ids) for ids in encoded])
        input_ids = torch.full((len(texts), width), PAD_ID, dtype=torch.long)
        mask = torch.zeros((len(texts), width), dtype=torch.bool)
        for row, ids in enumerate(encoded):
            if ids:
                input_ids[row, : len(ids)] = torch.tensor(ids, dtype=torch.long)
                mask[row, : len(ids)] = True
        return input_ids, mask

    def describe(self) -> Dict[str, object]:
        """Hash specification stored in checkpoints."""
        return {
            "kind": "crc32-hash",
            "vocab_size": self.vocab_size,
            "max_seq_len": self.max_seq_len,
            "pad_id": PAD_ID,
        }
