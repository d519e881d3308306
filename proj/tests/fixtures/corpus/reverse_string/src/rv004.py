def rev(s):
    # base case
    if not s:
        return ""
    return rev(s[1:]) + s[0]


print(rev(input()))
