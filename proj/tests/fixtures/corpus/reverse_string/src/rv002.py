text = input()
out = ''
i = len(text) - 1
while i >= 0:
    out += text[i]
    i -= 1
print(out)
