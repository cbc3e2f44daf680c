"""Smoke test for the qhg extension module. Build it first with `maturin develop`."""

import json

import qhg


def main():
    alg = qhg.QHAlgebra(1)
    assert alg.dim == 7
    assert alg.jacobi_holds()
    assert alg.bracket(3, 4)[0] == "l"
    assert str(alg.d(alg.eta(1))) == "(-l)*e3^e4 + (-l)*e5^e6"
    assert alg.ricci_diagonal() == ["-8*l^2"] * 3 + ["-3*l^2"] * 4
    assert alg.scalar_curvatures() == ("-36*l^2", "-3*l^2")
    assert alg.holonomy_dim() == 3
    assert alg.canonical_torsion().degree == 3

    specialized = qhg.QHAlgebra(3, "2")
    assert specialized.scalar_curvatures() == ("-240", "-36")

    code, report = qhg.verify(p=1, lam="formal", suites=["connection", "cone"])
    data = json.loads(report)
    assert code == 0, data["summary"]
    assert set(data) == {"config", "checks", "summary"}

    try:
        qhg.verify(p=2, suites=["g2"])
    except ValueError:
        pass
    else:
        raise AssertionError("expected a configuration error")

    print("smoke test ok")


if __name__ == "__main__":
    main()
