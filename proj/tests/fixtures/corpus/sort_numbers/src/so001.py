input()
nums = sorted(map(int, input().split()))
print(*nums)
