from __future__ import annotations

from mrc_backend.tokenizer import SPECIALS, Token, Vocab, tokenize


def test_offsets_are_code_points():
    text = "👁 thin cornea 20/40"
    tokens = tokenize(text)
    assert [t.text for t in tokens] == ["👁", "thin", "cornea", "20/40"]
    for token in tokens:
        assert text[token.start:token.end] == token.text


def test_punctuation_peeling():
    assert [t.text for t in tokenize("(edema).")] == ["(", "edema", ")", "."]


def test_vocab_round_trip(tmp_path):
    vocab = Vocab.build(["the teal box", "a gray cat"])
    path = tmp_path / "vocab.json"
    vocab.save(path)
    loaded = Vocab.load(path)
    assert loaded.itos == vocab.itos
    assert loaded.id("teal") == vocab.id("teal")
    assert loaded.id("zebra") == loaded.stoi["[UNK]"]
    assert loaded.itos[:4] == list(SPECIALS)
