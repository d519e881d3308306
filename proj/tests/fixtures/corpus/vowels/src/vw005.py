"""Count vowels."""
word = input()
n = 0
for c in word:
    if c in "aeiou":
        n += 1
print(n)
