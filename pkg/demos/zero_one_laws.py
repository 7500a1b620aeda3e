"""Compatible families over infinite index sets, checked on finite windows."""

from fractions import Fraction

from markovcats import projective as P
from markovcats.finstoch import FINSTOCH, finset
from markovcats.kernel import Obj

B = finset("0", "1")
coin = FINSTOCH.state(B, [Fraction(2, 3), Fraction(1, 3)])

# an i.i.d. sequence indexed by the natural numbers, built lazily
fam = P.iid_family(coin, P.naturals())
print("law of flips 0 and 1:", ", ".join(map(str, fam.assign([0, 1]).rows()[0])))
print(P.validate_compatibility(fam, 5).detail)
print(P.check_infindep_lemma(fam, 0, 5).detail)

# permuting finitely many labels leaves an i.i.d. family unchanged
swapped = P.act(fam, P.transposition(0, 4))
print("invariant under swapping flips 0 and 4?", swapped.assign([0, 1, 4]) == fam.assign([0, 1, 4]))

# evens and odds as two disjoint copies of the sequence
r = P.check_hs_splitting(fam, P.affine(2, 0), P.affine(2, 1), [0, 1], [0, 2])
print("splitting:", r.detail)

# a statistic of three flips: parity is independent of every proper subset of
# the flips but not of all three, so the finite zero-one law does not apply
X3 = B @ B @ B
fair = FINSTOCH.state(B, ["1/2", "1/2"])
three = FINSTOCH.compose(FINSTOCH.copy_n(Obj(), 3), FINSTOCH.tensor_all([fair] * 3))
parity = P.StatisticFamily((0, 1, 2), FINSTOCH.function(X3, B, lambda x: str(sum(map(int, x)) % 2)))
print("parity:", P.check_kolmogorov_finite(three, parity).detail)

# determinism lemma: a deterministic statistic independent of its input is a.s. constant
X = finset("a", "b", "c")
p = FINSTOCH.state(X, ["1/2", "1/2", 0])
s = FINSTOCH.function(X, B, lambda x: "1" if x == "c" else "0")
print("determinism lemma:", P.check_determinism_lemma(p, s).detail)
