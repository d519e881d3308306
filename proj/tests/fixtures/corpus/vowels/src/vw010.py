print(len([letter for letter in input() if letter in "aeiou"]))  # list
