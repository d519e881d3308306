n = int(input())
print(sum(i * i for i in range(1, n + 1)))
