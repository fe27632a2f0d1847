values = [v for v in range(10) if v % 2 if v > 3]
for v in values:
    try:
        print(v)
    except ValueError:
        pass
assert values
