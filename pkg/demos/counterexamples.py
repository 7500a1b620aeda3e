"""Where the laws stop holding: non-causality in polynomial rings, sets
that are not determined by their marginals, and a finite search in the
Vietoris instance."""

from markovcats.cringplus import builtin_maps, check_noncausality
from markovcats.kernel import check_causality_triple
from markovcats.setmulti import nonextension_witness
from markovcats.vietoris import causality_search

r = check_noncausality(12)
print(r.detail)

m = builtin_maps()
print("generic checker on the same maps:", check_causality_triple(m["f"], m["g"], m["h1"], m["h2"]).passed)

for N in (1, 2, 3):
    A, B, report = nonextension_witness(N)
    print(f"N={N}: |A|={len(A)} |B|={len(B)}; {report.detail}")

res = causality_search(max_points=3, seed=0, budget=2000)
if res.found:
    print(f"vietoris: violation found after {res.examined} quadruples")
    for name, f in res.found.items():
        print(f"  {name}: {f.to_json()}")
else:
    print(f"vietoris: nothing found in {res.examined} quadruples")
