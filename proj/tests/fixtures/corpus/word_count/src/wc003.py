import sys
from collections import defaultdict

freq = defaultdict(int)
for word in sys.stdin.read().split():
    freq[word] += 1
for word, n in sorted(freq.items()):
    print(f"{word} {n}")
