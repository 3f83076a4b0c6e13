"""Mean Euler characteristics of catalog models and their surgery trajectory.

Run: python3 demos/mec_tour.py
"""

from reebmec import (
    SurgeryStep,
    surgery_apply,
    af_surgery,
    mec,
    oracle_convergence,
    prequantization,
    standard_sphere,
    standard_sphere_af,
    ustilovsky,
)



def show(v):
    return f"chi+ = {v.chi_plus}, chi- = {v.chi_minus}"


for n in (2, 5, 10):
    print(f"standard sphere, n = {n}:", show(mec(standard_sphere(n))))

# Brieskorn spheres diffeomorphic to the standard one, told apart by chi+
for p in (7, 9, 15):
    print(f"Ustilovsky n = 5, p = {p}:", mec(ustilovsky(5, p)).chi_plus)

print("circle bundle chi_B = 2, c1 = 2:", show(prequantization(2, 2).value))

# truncated Euler characteristic over degree window, divided by N
rep = oracle_convergence(standard_sphere_af(3), (100, 1000, 10000))
for N, est in zip(rep.N, rep.estimates):
    print(f"  N = {N:>6}: chi_N / N = {est}  ({float(est):.6f})")

# attaching subcritical handles; each index-k handle moves chi+ by (-1)^k / 2
model = standard_sphere_af(4)
print("start:", show(mec(model)))
start = mec(model)
for k in (1, 2, 3, 2):
    model = af_surgery(model, k)
    print(f"  after index-{k} handle:", show(mec(model)))

# the same trajectory from the MEC value alone, without rebuilding models
v = start
for k in (1, 2, 3, 2):
    v = surgery_apply(v, SurgeryStep(k=k, n=4))
print("bookkeeping alone predicts:", show(v))
