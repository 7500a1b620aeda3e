"""Monte Carlo view of the zero-one laws with long coin-flip windows."""

from fractions import Fraction

from markovcats.cli.montecarlo import MonteCarloConfig, simulate_hs_negative_control, simulate_kolmogorov_demo

for theta in (Fraction(2, 5), Fraction(1, 2), Fraction(3, 5)):
    cfg = MonteCarloConfig((Fraction(1, 2),), theta, N=10_000, samples=5_000, seed=1, shards=4)
    res = simulate_kolmogorov_demo(cfg, parallel=True)
    print(f"i.i.d. fair coin, P(mean ≥ {theta}) ≈ {res.probability:.4f}")

# exchangeable but not independent: the bias is drawn once per window
cfg = MonteCarloConfig((Fraction(3, 10), Fraction(7, 10)), Fraction(1, 2), N=10_000, samples=5_000, seed=1)
res = simulate_hs_negative_control(cfg)
print(f"mixture of biases 0.3 and 0.7: P(mean ≥ 1/2) ≈ {res.probability:.4f} (limit {res.oracle['limit']})")
