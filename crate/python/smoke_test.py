"""Smoke test for the Python bindings.

Run after `pip install -e . --no-build-isolation` in the repository root:

    python python/smoke_test.py
"""

import utt_py

PLUS = """
def (+) : Nat -> Nat -> Nat :=
  fun m n => natelim (x => Nat) n (k ih => su ih) m

def two unfolds (+) : Nat := (+) 1 1
"""


def main():
    m = utt_py.check(PLUS)
    assert m.defs() == ["(+)", "two"], m.defs()
    assert m.goals() == []

    sig = m.signature()
    assert "prop (+) ≤ ⊤" in sig, sig
    assert "prop two ≤ (+)" in sig, sig
    assert "{Nat | two ↪" in sig, sig

    assert m.unfolding_prop("two") == "two"
    assert m.entails("two", "(+)")
    assert not m.entails("(+)", "two")

    # sealed until its proposition (and what it depends on) is assumed
    assert m.normalize_def("two") == "out[two] two"
    assert m.normalize_def("two", assume=["two", "(+)"]) == "2"

    # the rewriting oracle agrees
    verdict = m.oracle_conv("two", "two", assume=["two", "(+)"])
    assert verdict == "equal", verdict

    # goals survive checking and show the sealed neutral
    holey = utt_py.check(
        PLUS + "\ndef left-unit : (n : Nat) -> Id Nat ((+) ze n) n := ?\n"
    )
    (goal,) = holey.goals()
    assert goal.hole_name.startswith("%hole")
    assert "out[" in goal.ty, goal.ty

    # type errors surface as ValueError
    try:
        utt_py.check("def bad : Nat := fun x => x\n")
    except ValueError:
        pass
    else:
        raise AssertionError("expected a check failure")

    print("smoke test: ok")


if __name__ == "__main__":
    main()
