import pytest

from hodgecert import familyfile
from hodgecert.errors import ParseError

GOOD = """# test family
vars = 4
degree = 4
f = x0^4 + x1^4 + x2^4 + x3^4
group_order = 2
weights = 1,0,0,0
character = 0
"""


def test_bundled_roundtrip():
    names = familyfile.bundled_names()
    assert len(names) >= 3
    for name in names:
        text = familyfile.bundled_text(name)
        assert familyfile.serialize(familyfile.parse(text, name)) == text


def test_parse_fields():
    ff = familyfile.parse(GOOD)
    assert ff.num_vars == 4 and ff.degree == 4 and ff.group_order == 2
    assert ff.weights == (1, 0, 0, 0) and ff.header == ["# test family"]
    spec = ff.to_spec(residue_twist=1)
    assert spec.residue_twist == 1 and spec.k == 1
    policy = ff.policy(seed=9)
    assert policy.seed == 9 and policy.num_primes == 2 and policy.exact_fallback


@pytest.mark.parametrize("text,key", [
    ("degree = 4\nf = x0^4 + x1^4\n", "vars"),
    ("vars = two\ndegree = 4\nf = x0^4\n", "vars"),
    ("vars = 2\ndegree = 4\nf = x0^4 + x1^3\n", "f"),
    ("vars = 2\ndegree = 4\nf = x0^4 + x9^4\n", "f"),
    ("vars = 2\ndegree = 3\nf = x0^4 + x1^4\n", "f"),
    ("vars = 2\ndegree = 4\nf = x0^4 + x1^4\nweights = 1\n", "weights"),
    ("vars = 2\ndegree = 4\nf = x0^4 + x1^4\ngroup_order = 2\n", "weights"),
    ("vars = 2\ndegree = 4\nf = x0^4 + x1^4\ncolour = red\n", "colour"),
    ("vars = 2\ndegree = 4\nf = x0^4 + x1^4\nexact_fallback = maybe\n", "exact_fallback"),
    ("vars = 2\nvars = 2\ndegree = 4\nf = x0^4 + x1^4\n", "vars"),
    ("vars = 4\ndegree = 4\nf = x0^4 + x1^4 + x2^4 + x3^4\nk = 2\n", "k"),
])
def test_parse_errors_name_the_key(text, key):
    with pytest.raises(ParseError) as exc:
        familyfile.parse(text)
    assert exc.value.key == key


def test_resolve(tmp_path):
    path = tmp_path / "mine.fam"
    path.write_text(GOOD)
    assert familyfile.resolve(str(path)).name == "mine"
    assert familyfile.resolve("quartic_p3").name == "quartic_p3"
    with pytest.raises(ParseError):
        familyfile.resolve(str(tmp_path / "missing.fam"))
