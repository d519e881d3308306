# gen
limit=int(input())
print(sum( z*z for z in range(1,limit+1) ))
