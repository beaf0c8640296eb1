import json
import re

import pytest
from gmpy2 import mpq

from affgaudin.golden import (golden_expr, golden_linear_form, golden_state, golden_tags, load_golden,
                              set_golden_path)


def test_tags_sorted_numerically():
    tags = golden_tags("quartic_basis.v")
    assert len(tags) == 14
    assert tags[1] == "quartic_basis.v2" and tags[-1] == "quartic_basis.v14"


def test_quartic_density_shape():
    # seven index-summed terms, expanding to 33 concrete monomials
    text = golden_expr("sigma3")
    assert len(re.split(r" [+-] ", text)) == 7
    s3 = golden_state("sigma3")
    assert s3.bigrade() == (4, 4)
    assert len(s3) == 33


def test_substitution():
    assert "{r}" in golden_expr("quadratic_witness")
    assert golden_state("quadratic_witness", r=2) == golden_state("quadratic_witness", r=2)


def test_linear_form():
    assert golden_linear_form("quartic_relations.x2") == {1: mpq(20, 3)}


def test_override_path(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"format": 1, "entries": [{"tag": "sigma1", "expr": "I[a=1,n=-2] * vac"}]}))
    set_golden_path(str(p))
    try:
        assert golden_tags() == ["sigma1"]
    finally:
        set_golden_path(None)
    assert len(load_golden()) > 40


def test_duplicate_tags_rejected(tmp_path):
    p = tmp_path / "g.json"
    e = {"tag": "x", "expr": "vac"}
    p.write_text(json.dumps({"format": 1, "entries": [e, e]}))
    with pytest.raises(ValueError):
        load_golden(str(p))
