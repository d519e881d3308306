'''One-liner.'''
size = int(input())
print(sum(q * q for q in range(1, size + 1)))
