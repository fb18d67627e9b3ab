"""
Largest admissible sparsity under a leakage budget
==================================================

p* against the number of colluding trusted workers z, for N2 = 100 and
s = 0.93 over GF(256).  Writes p_star.csv and p_star.svg to the working directory.
"""
from pathlib import Path

from sparsepriv import get_field
from sparsepriv.analysis import LeakageBudget, pad_stats, solve_p_star
from sparsepriv.pad import PadParams
from sparsepriv.svg import line_chart

F = get_field(256)
s, N2 = 0.93, 100
here = Path.cwd()

series, lines = {}, ["z,eps_rel,p_star,S_R"]
for eps_rel in (0.0, 0.05, 0.25, 0.5, 0.75, 1.0):
    pts = []
    for z in range(1, N2 + 1):
        p = solve_p_star(s, F, LeakageBudget(eps_rel, z, N2))
        pts.append((z, p))
        lines.append(f"{z},{eps_rel},{p:.9f},{pad_stats(s, PadParams.symmetric(p, F)).s_pad:.9f}")
    series[f"eps_rel={eps_rel}"] = pts
    print(f"eps_rel={eps_rel:<5} p*(z=1)={pts[0][1]:.4f}  p*(z=10)={pts[9][1]:.4f}  p*(z=100)={pts[-1][1]:.4f}")

# S(R) is affine in p*; the slope is close to s
print("slope of S(R) in p:", (s * 256 - 1) / 255)
(here / "p_star.csv").write_text("\n".join(lines) + "\n")
(here / "p_star.svg").write_text(line_chart(series, x_label="z", y_label="p*"))
