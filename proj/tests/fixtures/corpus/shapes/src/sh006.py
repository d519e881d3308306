def outer():
    counter = 0

    def inc(by=1, **extra):
        nonlocal counter
        counter += by + sum(extra.values())
        return counter

    inc()
    inc(by=2, bonus=3)
    return counter


try:
    value = outer()
except (ValueError, TypeError) as err:
    value = str(err)
finally:
    pass
print(value)
