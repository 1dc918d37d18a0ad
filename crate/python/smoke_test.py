"""Smoke test for the nilevo Python bindings.

Build and install first:
    pip install maturin
    maturin build --release -m crates/nilevo-py/Cargo.toml -o dist
    pip install dist/nilevo-*.whl
"""

import math

import nilevo

E3 = [[0, 1, 1], [0, 0, 1], [0, 0, 0]]
E4 = [["0", "1", "1", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"], ["0", "0", "0", "0"]]


def main() -> None:
    e3 = nilevo.Algebra(E3, name="E3")
    assert e3.dimension == 3 and e3.field == "rational"

    c = e3.classify()["results"]
    assert c["canonical"] and c["rank"] == 2 and c["nilpotency_index"] == 5
    assert c["I_A"] == [] and c["eta"] is None
    assert nilevo.max_nilpotency_index(3) == 5

    d = e3.derivations(alpha="1/2", beta=1, m=3)["results"]
    assert d["der_dimension"] == 2 and all(d["basis_leibniz"])
    assert d["derivation"]["leibniz"] and d["power"]["residual_vs_repeated_product"] == 0

    e4 = nilevo.Algebra(E4, name="E4")
    a = e4.automorphisms(alpha=-1, beta=3)["results"]
    assert a["eta"] == 2 and a["automorphism"]["multiplicative"]
    assert e4.quotient()["index"] == {"finite": 2}
    try:
        e4.automorphisms(alpha=2)
    except nilevo.DomainError:
        pass
    else:
        raise AssertionError("alpha = 2 is not a square root of unity")

    x = e3.exp(alpha=0.3, beta=-2)["results"]
    assert x["agree"], x["series_closed_diff"]
    assert math.isclose(float(x["recovered_parameters"]["alpha"]), 0.3, rel_tol=1e-12)

    v = e4.verify(seed=7)["results"]
    assert v["all_passed"], [s["name"] for s in v["suite"] if not s["passed"]]
    assert e4.verify(seed=7) == e4.verify(seed=7)

    csv, summary = e3.ode(alpha=0.2, t=1.0, steps=20, x0=[1.0, 0.5, -1.0])
    assert csv.splitlines()[0] == "t,x1,x2,x3" and len(csv.splitlines()) == 22
    assert summary["results"]["relative_error"] < 1e-6

    code, _, err = nilevo.run(["classify"])
    assert code == 2 and "--algebra" in err
    try:
        nilevo.Algebra([[0, 1], [0]])
    except nilevo.UsageError:
        pass
    else:
        raise AssertionError("ragged matrix accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
