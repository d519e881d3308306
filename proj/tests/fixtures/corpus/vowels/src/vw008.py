# generator
t = input()
print(sum(1 for x in t if x in "aeiou"))
