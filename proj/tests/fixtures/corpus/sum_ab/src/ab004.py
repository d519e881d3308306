plus = lambda p, q: p + q
print(plus(*map(int, input().split())))
