def double(v):
    return v * 2


def add(a, b):
    return a + b


print(add(double(1), 2))
