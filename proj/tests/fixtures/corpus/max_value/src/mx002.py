vals = [int(v) for v in input().split()]
best = vals[0]
for v in vals[1:]:
    if v > best:
        best = v
print(best)
