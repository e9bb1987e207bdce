import pytest

from factoroid import constructors as mk
from factoroid.groupoid import MeasuredGroupoid, validate_groupoid


@pytest.fixture(scope="session")
def z2():
    return mk.group_groupoid(mk.cyclic_group(2))


@pytest.fixture(scope="session")
def z3():
    return mk.group_groupoid(mk.cyclic_group(3))


@pytest.fixture(scope="session")
def klein4():
    return mk.group_groupoid(mk.klein_four_group())


@pytest.fixture(scope="session")
def klein_twisted():
    return mk.klein_four_twisted()


@pytest.fixture(scope="session")
def full2():
    return mk.full_relation(["x0", "x1"], {"x0": 0.5, "x1": 0.5})


@pytest.fixture(scope="session")
def full3():
    units = ["x0", "x1", "x2"]
    return mk.full_relation(units, {u: 1 / 3 for u in units})


@pytest.fixture(scope="session")
def s3_bundle():
    return mk.group_bundle({"pt": mk.symmetric_group(3)}, {"pt": 1.0})


@pytest.fixture(scope="session")
def z2_bundle():
    z2 = mk.cyclic_group(2)
    return mk.group_bundle({"x0": z2, "x1": z2}, {"x0": 0.5, "x1": 0.5})


@pytest.fixture(scope="session")
def swap_groupoid():
    return mk.transformation_groupoid(
        mk.cyclic_group(2),
        {("0", "x0"): "x0", ("0", "x1"): "x1",
         ("1", "x0"): "x1", ("1", "x1"): "x0"},
        ["x0", "x1"],
        {"x0": 0.5, "x1": 0.5},
    )


@pytest.fixture(scope="session")
def z2_trivial_two_points():
    return mk.transformation_groupoid(
        mk.cyclic_group(2),
        {("0", "x0"): "x0", ("0", "x1"): "x1",
         ("1", "x0"): "x0", ("1", "x1"): "x1"},
        ["x0", "x1"],
        {"x0": 0.5, "x1": 0.5},
    )


@pytest.fixture(scope="session")
def z4_translation():
    z4 = mk.cyclic_group(4)
    return mk.transformation_groupoid(
        z4, mk.translation_action(z4), z4.elements,
        {u: 0.25 for u in z4.elements},
    )


@pytest.fixture(scope="session")
def null_orbit_groupoid() -> MeasuredGroupoid:
    """Positive mass on an isolated unit; a null full-relation pair besides."""
    units = ["x0", "x1", "x2"]
    mass = {"x0": 1.0, "x1": 0.0, "x2": 0.0}
    arrows = [
        ("e0", "x0", "x0"), ("e1", "x1", "x1"), ("e2", "x2", "x2"),
        ("a12", "x2", "x1"), ("a21", "x1", "x2"),
    ]
    compose = {
        ("e0", "e0"): "e0", ("e1", "e1"): "e1", ("e2", "e2"): "e2",
        ("a12", "e2"): "a12", ("e1", "a12"): "a12",
        ("a21", "e1"): "a21", ("e2", "a21"): "a21",
        ("a12", "a21"): "e1", ("a21", "a12"): "e2",
    }
    inverse = {"e0": "e0", "e1": "e1", "e2": "e2", "a12": "a21", "a21": "a12"}
    unit_arrows = {"x0": "e0", "x1": "e1", "x2": "e2"}
    return validate_groupoid(
        MeasuredGroupoid(units, mass, arrows, compose, inverse, unit_arrows)
    )
