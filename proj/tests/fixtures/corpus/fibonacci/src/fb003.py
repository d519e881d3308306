from functools import lru_cache

@lru_cache(maxsize=None)
def f(k):
    return k if k < 2 else f(k - 1) + f(k - 2)

print(f(int(input())))
