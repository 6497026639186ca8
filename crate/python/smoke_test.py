"""Smoke test for the qwalk_py extension.

Build and install first, e.g. `maturin develop -m crates/qwalk-py/Cargo.toml`
or `pip install --no-build-isolation ./crates/qwalk-py`.
"""

import cmath
import math

import numpy as np
from scipy.linalg import expm

import qwalk_py as q

REFERENCE = """\
c_i = 70
c_j = 72
c_c = 200
c_ic = 4
c_jc = 4.2
c_ij = 0.1
w_i = 4
w_j = 4
w_c = 8
"""


def close(a, b, tol=1e-9):
    assert abs(a - b) <= tol, (a, b)


def graphs():
    k2 = q.Graph.named("k2")
    d = k2.pst(0, 1)
    assert d["pst"]
    close(d["time"], math.pi / 2)
    close(abs(k2.amplitude(0, 1, math.pi / 2, "adj")), 1.0)

    # amplitudes agree with a dense exponential
    p4 = q.Graph.named("p4")
    a = np.array(p4.matrix("adj"))
    u = expm(-1j * 1.3 * a)
    assert abs(p4.amplitude(0, 3, 1.3, "adj") - u[3, 0]) < 1e-10
    assert not p4.pst(0, 3)["pst"]

    p3 = q.Graph.named("p3")
    close(p3.pst(0, 2)["time"], math.pi / math.sqrt(2))

    q3 = q.Graph.named("q3")
    assert q3.vertex_count == 8 and q3.edge_count == 12
    close(sorted(q3.eigenvalues("adj"))[0], -3.0)

    g = q.Graph.parse(k2.to_text())
    assert g.edge_count == 1
    c = k2.corona(k2)
    assert (c.vertex_count, c.edge_count) == (6, 7)


def routing():
    net = q.RoutingNetwork(31)
    assert net.size == 31
    r = net.route("10100", "01011")
    assert len(r["hops"]) == 2
    close(r["magnitude"], 1.0)
    assert r["swap_baseline"] == 5


def chains():
    js = q.pst_chain(5)
    assert len(js) == 4
    for a, b in zip(js, reversed(js)):
        close(a, b, 1e-12)
    t, f = q.uniform_chain_best(4, 200.0)
    assert f < 1 - 1e-5 and t > 0


def qudits():
    fam = q.CouplingFamily.complete(2, [0.0, 1.0])
    assert sorted(round(x, 9) for x in fam.effective_couplings()) == [-1.0, 1.0]
    amp = fam.amplitude(0, 1, math.pi / 2)
    close(abs(amp), 1.0)
    close(abs(fam.direct_amplitude(0, 1, math.pi / 2) - amp), 0.0)
    out = fam.transfer(0, [1 / math.sqrt(2), 1j / math.sqrt(2)], 1, math.pi / 2)
    close(out["fidelity"], 1.0)
    corrected, uncorrected = q.CouplingFamily.cycle(4, [0.0, 1.0, 0.5]).unitarity_audit(
        0, [0.3, 0.9, 1.7]
    )
    assert corrected < 1e-9
    assert uncorrected > corrected


def transmon():
    r = q.coupling_report(REFERENCE)
    close(r["w_c"], 8.0)
    assert r["dispersive"]
    w_c, delta = q.find_cutoff(REFERENCE, 4.5, 7.0)
    close(w_c, math.sqrt(29.44), 1e-9)
    close(delta, 4.0 - w_c, 1e-9)
    close(q.pst_time(math.pi, 1), 0.5)


def main():
    for check in (graphs, routing, chains, qudits, transmon):
        check()
        print(f"{check.__name__}: ok")
    print("smoke test passed")


if __name__ == "__main__":
    main()
