"""Maximum-entropy fitting from moment constraints.

A die is known only through two expectations: its mean and the probability
of rolling at least 5. The entropy-maximizing distribution under those
constraints is an exponential-family member whose natural parameters come
out of the dual Newton solve.
"""

import numpy as np

from femin import Infeasible, MomentConstraint, check_feasibility, entropy, solve_maxent

faces = np.arange(1, 7, dtype=float)
at_least_five = (faces >= 5).astype(float)

constraints = [
    MomentConstraint(faces, 4.2),          # loaded: mean above 3.5
    MomentConstraint(at_least_five, 0.4),  # P(roll >= 5) = 0.4
]

report = check_feasibility(constraints)
print("feasible:", report.feasible)

solution = solve_maxent(constraints, alphabet_size=6, tol=1e-10)
print("q =", np.round(solution.q.probs, 4))
print("lambda =", np.round(solution.lambdas, 4))
print(f"H(q) = {entropy(solution.q):.4f} nats (uniform would be {np.log(6):.4f})")
print(f"mean = {faces @ solution.q.probs:.6f}, P(>=5) = {at_least_five @ solution.q.probs:.6f}")
print(f"converged in {solution.iterations} Newton iterations, residual {solution.residual:.2e}")

# a target on the hull boundary has no finite-parameter representation
try:
    solve_maxent([MomentConstraint(faces, 6.0)], 6)
except Infeasible as err:
    print("\nmean target 6.0 rejected:", err)
