"""The two-setting CHSH line next to the three-setting pyramid."""
# %%
import math

from bellpyramid import chsh

s = 1 / math.sqrt(2)
cases = {
    "uncorrelated": (0, 0, 0, 0),
    "deterministic": (1, 1, 1, 1),
    "Tsirelson": (s, s, s, -s),
    "PR box": (1, 1, 1, -1),
}
for name, c in cases.items():
    value = chsh.chsh_value(chsh.ChshCorrelators(*c))
    print(f"{name:>14}: S = {value:.4f}  -> {chsh.chsh_classify(value).value}")

# %%
c = chsh.comparison()
print("\nshare of the no-signalling range")
print("                 pyramid   CHSH")
for key, label in [("sl", "local"), ("q", "quantum"), ("beyond_q", "beyond quantum")]:
    print(f"{label:>15}  {c['pyramid'][key]:.3f}     {c['chsh'][key]:.3f}")
print("\nthe three-setting picture leaves more room beyond quantum and less for local models")
