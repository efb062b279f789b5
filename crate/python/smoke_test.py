"""Smoke test for the quadbct extension module.

Build and install first, e.g. `pip install --no-build-isolation ./crates/py`,
then run `python python/smoke_test.py`.
"""

import quadbct

f = quadbct.Field(3, 1)
assert f.n == 6 and f.modulus == 0x43, f

# field basics
x = 0x2A
assert f.mul(x, f.inv(x)) == 1
assert f.conj(f.conj(x)) == x

# classification
assert quadbct.classify(f, "0:1:0:0")["verdict"] == "Gamma0"
c = quadbct.classify(f, "1:0:0:0")
assert c == {"verdict": "NotGamma", "reasons": ["trace_theta4"]}, c

# table, DDT, BCT by both methods
table = quadbct.sbox_table(f, "0:1:0:0")
assert quadbct.is_permutation(table)
assert table == [f.pow(v, 17) for v in range(64)]
assert quadbct.differential_uniformity(table) == 4
assert quadbct.bct(table, "lqsl") == quadbct.bct(table, "definitional")
assert quadbct.boomerang_uniformity(table) == 4

# full verdict
v = quadbct.analyze(f, "0:1:0:0")
assert v["permutation"] and v["delta"] == 4 and v["beta"] == 4 and v["consistent"], v

# small-equation criteria against brute force
for tau, nu in [(0, 0), (3, 5), (17, 40), (63, 1)]:
    assert quadbct.lemma_core(f, tau, nu)["count"] == quadbct.lemma_core_brute(f, tau, nu)["count"]

# baselines and a sampled campaign
assert quadbct.baseline("gold", 3, 2)["beta"] == 4
assert quadbct.baseline("inverse", 3)["beta"] == 4
s = quadbct.search(3, 1, mode="gamma_sample", samples=20, seed=3, beta_policy="all")
assert s["anomaly_count"] == 0 and s["visited"] == 20, s
r = quadbct.run_suite("lemma-core", f)
assert r["checked"] == 4096 and r["failed"] == 0

try:
    quadbct.Field(4, 1)
except ValueError:
    pass
else:
    raise AssertionError("even m accepted")

print("smoke test passed")
