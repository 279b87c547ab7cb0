"""Walk through exact best approximations of a few targets.

For a target theta, a pair (p, q) is kept when no other pair (p', q')
outside {+-(p, q)} does at least as well in both respects: error
||p' + theta q'|| and size ||q'||.  Everything here is exact rational
arithmetic; cut-offs of the form e**T are decided by certified enclosures.
"""

from fractions import Fraction as F

from diophlab import (TargetMatrix, cf_expand, cf_fast_count,
                      enumerate_best_approximations)
from diophlab.runner import sample_theta


def show(title, seq):
    print(f"\n{title}")
    print(f"  {'p':>12} {'q':>12} {'||q||':>8} {'error':>12} shell")
    for rec in seq.records:
        print(f"  {str(rec.p):>12} {str(rec.q):>12} {rec.qnorm.as_float():>8.3g} "
              f"{rec.err.as_float():>12.5g} {rec.shell_index:>5}")
    tail = "  (sequence exhausted: exact hit)" if seq.exhausted_rational else ""
    print(f"  -> {seq.count} signed records{tail}")


# A scalar rational target: the records mirror its continued fraction.
theta = F(17, 50)
seq = enumerate_best_approximations(TargetMatrix.scalar(theta), qmax=50)
show("theta = 17/50, |q| <= 50", seq)
cf = cf_expand(theta)
print(f"  continued fraction: {list(cf.quotients)}; convergents "
      f"{['%d/%d' % c for c in cf.convergents]}")
print(f"  fast convergent count agrees: "
      f"{cf_fast_count(theta, qmax=50) == seq.count}")

# A simultaneous target: one q in Z^2 approximating a single coordinate.
theta2 = sample_theta(seed=12, index=0, dims=(1, 2), bits=32)
seq2 = enumerate_best_approximations(theta2, T=4)
show(f"random dyadic 1x2 target, ||q|| <= e^4", seq2)

# A 2x1 target: p in Z^2, scalar q.
theta3 = sample_theta(seed=12, index=1, dims=(2, 1), bits=32)
seq3 = enumerate_best_approximations(theta3, T=4)
show("random dyadic 2x1 target, |q| <= e^4", seq3)
