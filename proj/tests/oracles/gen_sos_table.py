"""Frozen table of perturbed predicate signs on a tiny integer grid."""
import random
from sos_oracle import orient_sign, incircle_sign

rng = random.Random(7)
pts = [(rng.randint(0, 2), rng.randint(0, 2)) for _ in range(40)]
# make coordinates unique
seen, uniq = set(), []
for p in pts:
    if p not in seen:
        seen.add(p); uniq.append(p)
pts = uniq
print("// points:", ", ".join(f"{{{x}, {y}}}" for x, y in pts))
rows = []
while len(rows) < 40:
    ids = rng.sample(range(len(pts)), 4)
    rows.append((ids, orient_sign(pts, ids[:3]), incircle_sign(pts, ids)))
for ids, o, c in rows:
    print(f"{{{ids[0]}, {ids[1]}, {ids[2]}, {ids[3]}, {o}, {c}}},")
