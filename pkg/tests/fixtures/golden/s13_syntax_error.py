x = 1
print(x
# tail comment
