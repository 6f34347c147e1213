"""Tour of the closed-form guarantees and the measurement budget rules.

Evaluates every guarantee on one shared instance (the weak ones at the
fixed-signal parameters, the uniform ones at their matrix-level parameters),
optimizes the free parameters of the noiseless fixed-signal bound, and prints
measurement budgets for the three rate-growth models.
"""

from csplab import (BoundInputs, FiniteDimRate, PolylogRate, PowerlawRate,
                    evaluate_bound, measurement_budget, optimize_free_params)

weak = BoundInputs(r=20.0, d=24, n=64, delta=0.01, sigma=0.05, zeta=0.01,
                   eta=2.0, eps=1.2, eps_prime=1.2,
                   tau1=3.0, tau2=0.75, tau3=1.0)
strong = BoundInputs(r=20.0, d=48, n=64, delta=0.01, sigma=0.05, zeta=0.01,
                     eta=2.0, eps=1.2, tau=0.75, t=1.0, tau_prime=1.0,
                     gamma=6.5)

print("guarantee  error_bound  failure_probability")
for tid in ("T3", "C4", "T5", "C6", "T6", "T7"):
    ev = evaluate_bound(tid, weak)
    print(f"{tid:9s}  {ev.error_bound:11.4f}  {ev.failure_probability:.6g}")
for tid in ("T8", "C9", "T9", "T10", "C11", "T11"):
    ev = evaluate_bound(tid, strong)
    print(f"{tid:9s}  {ev.error_bound:11.4f}  {ev.failure_probability:.6g}")

print()
opt = optimize_free_params("T3", BoundInputs(r=20.0, d=24, delta=0.01), 0.01)
print(f"optimized noiseless bound at failure <= 1%: error "
      f"{opt.evaluation.error_bound:.4f} at tau1={opt.inputs.tau1:.3g}, "
      f"tau2={opt.inputs.tau2:.3g}")

print()
print("measurement budgets at eta = 2 (weak / strong):")
for name, model in (("8-dimensional", FiniteDimRate(8.0)),
                    ("polylog c=1", PolylogRate(1.0)),
                    ("powerlaw c=1 beta=2", PowerlawRate(1.0, 2.0))):
    for delta in (1e-2, 1e-4, 1e-6):
        w = measurement_budget(model, delta, 2.0, "weak")
        s = measurement_budget(model, delta, 2.0, "strong")
        print(f"  {name:20s} delta={delta:g}: {w:6d} / {s:6d}")
