"""Kernels on finite sets: composition, copying, determinism, independence."""

from markovcats.finstoch import FINSTOCH, finset
from markovcats.kernel import Obj, as_equal, displays_ci, is_deterministic, marginalize


def show(row):
    return "[" + ", ".join(map(str, row)) + "]"


X = finset("sun", "rain")
Y = finset("walk", "bus")

weather = FINSTOCH.state(X, ["2/3", "1/3"])
choice = FINSTOCH.kernel(X, Y, [["3/4", "1/4"], ["1/10", "9/10"]])

print("P(transport) =", show(FINSTOCH.compose(weather, choice).rows()[0]))

# joint law of weather and transport: copy the weather, then act on one copy
joint = FINSTOCH.compose(FINSTOCH.compose(weather, FINSTOCH.copy(X)),
                         FINSTOCH.tensor(FINSTOCH.identity(X), choice))
print("joint =", show(joint.rows()[0]))
print("marginal on transport =", show(marginalize(joint, [1]).rows()[0]))
print("weather and transport independent?", displays_ci(joint))

coin = FINSTOCH.state(X, ["1/2", "1/2"])
pair = FINSTOCH.compose(FINSTOCH.copy(Obj()), FINSTOCH.tensor(coin, FINSTOCH.state(Y, ["1/5", "4/5"])))
print("a product state displays independence?", displays_ci(pair))

print("choice deterministic?", is_deterministic(choice))
always_walk = FINSTOCH.function(X, Y, lambda x: "walk")
print("constant function deterministic?", is_deterministic(always_walk))

sunny = FINSTOCH.dirac(X, "sun")
print("choice and 'always walk' agree when it is always sunny?",
      as_equal(sunny, choice, always_walk))
only_sun = FINSTOCH.kernel(X, Y, [["3/4", "1/4"], [0, 1]])
print("choice agrees with a kernel that differs only on rain, almost surely under 'sun'?",
      as_equal(sunny, choice, only_sun))
