"""Smoke test for the `deligne` extension.

Build first with `cargo build --release -p deligne-py`; the script falls back
to loading target/release/libdeligne.so when the module is not installed.
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys


def load():
    try:
        import deligne

        return deligne
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        for name in ("libdeligne.so", "libdeligne.dylib", "deligne.dll"):
            path = root / "target" / profile / name
            if path.exists():
                loader = importlib.machinery.ExtensionFileLoader("deligne", str(path))
                spec = importlib.util.spec_from_file_location("deligne", path, loader=loader)
                module = importlib.util.module_from_spec(spec)
                loader.exec_module(module)
                sys.modules["deligne"] = module
                return module
    sys.exit("deligne extension not found; run `cargo build --release -p deligne-py`")


def main():
    d = load()
    m0 = d.Model.builtin("m0")
    assert m0.ell == 3 and m0.e == 2
    assert m0.atoms() == ["nu^0", "nu^1"]
    assert m0.validate() == []

    st0 = m0.parse("nu^0 + nu^1")
    assert str(st0.cv()) == "C(nu^0)"
    assert st0.cv().cv_inverse() == st0
    assert str(m0.parse("[0,1]") * m0.parse("[0,1]")) == "nu^1 + [0,2]"
    assert (st0 + st0).dim == 4
    assert st0.dual() == st0
    assert m0.parse("C(nu^0)").lfactor() == "1"
    assert m0.parse("nu^1").lfactor() == "1/(1 - 2*X)"

    m1 = d.Model.builtin("m1")
    assert str(m1.parse("[0,1]*[0,1]")) == "nu^0 + [0,2]"

    try:
        st0.cv_inverse()
    except d.DeligneError as e:
        assert e.args[0] == "NotCParameter"
    else:
        raise AssertionError("expected NotCParameter")
    try:
        m0.parse("[0,1")
    except d.DeligneError as e:
        assert e.args[0] == "ParseError"
    else:
        raise AssertionError("expected ParseError")

    certs = [json.loads(c) for c in d.check(m0, "all", seed=3)]
    assert certs and all(c["pass"] for c in certs), certs
    assert certs == [json.loads(c) for c in d.check(m0, "all", seed=3)]

    m = d.Model.character(5, 2, [2])
    assert len(m.atoms()) == 8 and len(m.lines()) == 2
    print("smoke test ok:", len(certs), "certificates")


if __name__ == "__main__":
    main()
