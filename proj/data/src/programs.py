# Source programs for the oracle corpus. Each entry: name, entry, code, inputs.
PROGRAMS = []

def prog(name, entry, inputs, code):
    PROGRAMS.append({"name": name, "entry": entry, "inputs": inputs, "code": code.lstrip("\n")})

prog("add", "add", [[2, 3], [0, 0], [-1, 1], [10, -20], [7, 7]], """
def add(a, b):
    return a + b
""")

prog("factorial", "fact", [[0], [1], [5], [10], [12]], """
def fact(n):
    r = 1
    for i in range(1, n + 1):
        r = r * i
    return r
""")

prog("factorial_rec", "fact", [[0], [1], [3], [8], [15]], """
def fact(n):
    if n <= 1:
        return 1
    return n * fact(n - 1)
""")

prog("sum_range", "total", [[0], [1], [5], [-1], [100]], """
def total(n):
    s = 0
    for i in range(n):
        s = s + i
    return s
""")

prog("sum_while", "total", [[0], [3], [7], [-4], [50]], """
def total(n):
    s = 0
    i = 0
    while i < n:
        s += i * i
        i += 1
    return s
""")

prog("countdown", "countdown", [[0], [1], [4], [9], [-2]], """
def countdown(n):
    out = []
    for k in range(n, 0, -1):
        out.append(k)
    print(out)
    return len(out)
""")

prog("fib", "fib", [[0], [1], [2], [10], [30]], """
def fib(n):
    a = 0
    b = 1
    i = 0
    while i < n:
        t = a + b
        a = b
        b = t
        i = i + 1
    return a
""")

prog("fib_rec", "fib", [[0], [1], [5], [10], [15]], """
def fib(n):
    if n < 2:
        return n
    return fib(n - 1) + fib(n - 2)
""")

prog("gcd", "gcd", [[12, 18], [7, 3], [0, 5], [100, 75], [17, 17]], """
def gcd(a, b):
    while b != 0:
        t = b
        b = a % b
        a = t
    return a
""")

prog("is_prime", "is_prime", [[1], [2], [15], [17], [97]], """
def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True
""")

prog("primes_below", "primes", [[2], [10], [30], [1], [50]], """
def is_prime(n):
    if n < 2:
        return False
    for d in range(2, n):
        if d * d > n:
            break
        if n % d == 0:
            return False
    return True


def primes(limit):
    found = []
    for n in range(limit):
        if is_prime(n):
            found.append(n)
    return found
""")

prog("list_max", "largest", [[[3, 1, 4]], [[-5, -2, -9]], [[7]], [[1, 2, 3, 4, 5, 6]], [[0, 0, 0]]], """
def largest(xs):
    best = xs[0]
    for x in xs:
        if x > best:
            best = x
    return best
""")

prog("index_sum", "weighted", [[[1, 2, 3]], [[]], [[5]], [[2, -2, 2, -2]], [[10, 20, 30, 40]]], """
def weighted(xs):
    acc = 0
    for i in range(len(xs)):
        acc = acc + i * xs[i]
    return acc
""")

prog("reverse_list", "rev", [[[1, 2, 3]], [[]], [["a", "b"]], [[1.5, 2.5]], [[9, 8, 7, 6]]], """
def rev(xs):
    out = []
    i = len(xs) - 1
    while i >= 0:
        out.append(xs[i])
        i -= 1
    return out
""")

prog("count_chars", "count", [["hello", "l"], ["", "a"], ["aaa", "a"], ["abcabc", "c"], ["xyz", "q"]], """
def count(text, ch):
    n = 0
    for c in text:
        if c == ch:
            n += 1
    return n
""")

prog("word_lengths", "lengths", [[["a", "bb", "ccc"]], [[]], [["hello"]], [["", "x"]], [["ab", "cd", "ef", "gh"]]], """
def lengths(words):
    table = {}
    for w in words:
        table[w] = len(w)
    return table
""")

prog("histogram", "hist", [[[1, 2, 2, 3]], [[]], [[5, 5, 5]], [[1, 2, 3]], [[0, 1, 0, 1, 0]]], """
def hist(xs):
    counts = {}
    for x in xs:
        if x in counts:
            counts[x] = counts[x] + 1
        else:
            counts[x] = 1
    return counts
""")

prog("mean", "mean", [[[1, 2, 3]], [[4]], [[1.5, 2.5]], [[-1, 1]], [[10, 20, 30, 40]]], """
def mean(xs):
    total = 0.0
    for x in xs:
        total += x
    return total / len(xs)
""")

prog("poly", "poly", [[0.0], [1.0], [2.5], [-1.5], [3]], """
def poly(x):
    return 3 * x ** 2 - 2 * x + 0.5
""")

prog("power_loop", "power", [[2, 0], [2, 10], [3, 4], [-2, 3], [5, 1]], """
def power(base, exp):
    result = 1
    for _ in range(exp):
        result *= base
    return result
""")

prog("collatz", "steps", [[1], [6], [7], [27], [97]], """
def steps(n):
    count = 0
    while n != 1:
        if n % 2 == 0:
            n = n // 2
        else:
            n = 3 * n + 1
        count += 1
    return count
""")

prog("fizzbuzz", "fizz", [[1], [5], [15], [0], [16]], """
def fizz(n):
    for i in range(1, n + 1):
        if i % 15 == 0:
            print("FizzBuzz")
        elif i % 3 == 0:
            print("Fizz")
        elif i % 5 == 0:
            print("Buzz")
        else:
            print(i)
    return n
""")

prog("bubble_sort", "sort", [[[3, 1, 2]], [[]], [[1]], [[5, 4, 3, 2, 1]], [[2, 2, 1, 1]]], """
def sort(xs):
    n = len(xs)
    for i in range(n):
        for j in range(n - i - 1):
            if xs[j] > xs[j + 1]:
                t = xs[j]
                xs[j] = xs[j + 1]
                xs[j + 1] = t
    return xs
""")

prog("binary_search", "find", [[[1, 3, 5, 7], 5], [[1, 3, 5, 7], 4], [[], 1], [[2], 2], [[1, 2, 3, 4, 5, 6, 7, 8], 8]], """
def find(xs, target):
    lo = 0
    hi = len(xs) - 1
    while lo <= hi:
        mid = (lo + hi) // 2
        if xs[mid] == target:
            return mid
        elif xs[mid] < target:
            lo = mid + 1
        else:
            hi = mid - 1
    return -1
""")

prog("matrix_trace", "trace", [[[[1, 2], [3, 4]]], [[[5]]], [[[1, 0, 0], [0, 1, 0], [0, 0, 1]]], [[]], [[[2, 3], [4, -5]]]], """
def trace(m):
    t = 0
    for i in range(len(m)):
        t += m[i][i]
    return t
""")

prog("string_build", "stars", [[0], [1], [3], [5], [2]], """
def stars(n):
    line = ""
    rows = []
    for i in range(n):
        line = line + "*"
        rows.append(line)
    return rows
""")

prog("digits", "digit_sum", [[0], [7], [123], [9999], [-45]], """
def digit_sum(n):
    n = abs(n)
    s = 0
    while n > 0:
        s += n % 10
        n = n // 10
    return s
""")

prog("module_state", "scaled", [[1], [0], [-3], [10], [7]], """
FACTOR = 3
OFFSET = 2


def scaled(x):
    return x * FACTOR + OFFSET
""")

prog("helper_calls", "combine", [[1, 2], [0, 0], [-3, 4], [10, 10], [5, -5]], """
def square(x):
    return x * x


def combine(a, b):
    s = square(a) + square(b)
    print(s)
    return max(s, a * b)
""")

prog("nested_break", "first_pair", [[[1, 2, 3], 5], [[1, 1], 3], [[], 0], [[4, 6, 2], 8], [[0, 0, 0], 0]], """
def first_pair(xs, target):
    found = None
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            if xs[i] + xs[j] == target:
                found = (i, j)
                break
        if found is not None:
            break
    return found
""")

prog("continue_evens", "odds", [[0], [5], [10], [1], [-3]], """
def odds(n):
    total = 0
    i = 0
    while i < n:
        i += 1
        if i % 2 == 0:
            continue
        total += i
    return total
""")

prog("tuple_swap", "minmax", [[[3, 1, 2]], [[5]], [[-1, -7, 4]], [[2, 2]], [[9, 0, 9, 0]]], """
def minmax(xs):
    lo = xs[0]
    hi = xs[0]
    for x in xs:
        if x < lo:
            lo = x
        if x > hi:
            hi = x
    return (lo, hi)
""")

prog("annotated", "area", [[2, 3], [0, 5], [1.5, 2], [-1, 4], [10, 10]], """
def area(w: float, h: float):
    result: float = w * h
    return result
""")

prog("float_loop", "harmonic", [[1], [2], [5], [10], [0]], """
def harmonic(n):
    h = 0.0
    for k in range(1, n + 1):
        h = h + 1.0 / k
    return h
""")

prog("string_ops", "shout", [["hi"], [""], ["abc"], ["Hello World"], ["x"]], """
def shout(s):
    out = ""
    for ch in s:
        out = out + ch + ch
    return str(len(out)) + ":" + out
""")

prog("logic", "classify", [[0], [5], [-5], [100], [42]], """
def classify(x):
    if x > 0 and x % 2 == 0:
        return "pos-even"
    elif x > 0 or x == 0:
        return "nonneg"
    elif not x < -10:
        return "small-neg"
    return "other"
""")

prog("step_loop", "every_third", [[0], [10], [3], [20], [1]], """
def every_third(n):
    picked = []
    for i in range(2, n, 3):
        picked.append(i)
    k = 0
    while k < n:
        k += 3
    return (picked, k)
""")

prog("accumulate_dict", "totals", [[[["a", 1], ["b", 2], ["a", 3]]], [[]], [[["x", 5]]], [[["k", -1], ["k", 1]]], [[["p", 2], ["q", 3], ["r", 4]]]], """
def totals(pairs):
    acc = {}
    for p in pairs:
        key = p[0]
        if key in acc:
            acc[key] += p[1]
        else:
            acc[key] = p[1]
    return acc
""")
