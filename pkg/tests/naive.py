"""Reference evaluator written straight from the recursion definitions.

Demand-driven and recursive: term n is obtained by calling ``value(n)``,
which calls itself on the argument expressions and checks every argument
against ``[1, n-1]`` separately.  Shares no code with ``metafib.core``.
Results are cached per evaluator so n <= 60 stays tractable; the cache is
keyed by index only and never consulted for bounds decisions.
"""


class Undefined(Exception):
    pass


class NaiveEvaluator:
    def __init__(self, family, params, ics):
        self.family = family
        self.params = params
        self.ics = list(ics)
        self.cache = {}

    def value(self, n):
        if n <= len(self.ics):
            return self.ics[n - 1]
        if n in self.cache:
            return self.cache[n]
        p = self.params
        if self.family == "conway":
            v = self.power(p["k"], n - p["b"], n)
            result = self.at(n - p["a"] - v, n) + self.at(v, n)
        elif self.family == "variant":
            v = self.power(p["k"], n - p["b"], n)
            w = self.power(p["k"], n - p["c"], n)
            result = self.at(n - p["a"] - v, n) + self.at(w, n)
        elif self.family == "conolly":
            s = p["s"]
            result = self.at(n - s - self.at(n - 1, n), n) + self.at(
                n - s - 2 - self.at(n - 3, n), n
            )
        else:
            result = sum(self.at(n - a - self.at(n - b, n), n) for a, b in p["terms"])
        self.cache[n] = result
        return result

    def at(self, m, n):
        # Term m as used while evaluating term n.
        if m < 1 or m > n - 1:
            raise Undefined(n)
        return self.value(m)

    def power(self, k, m, n):
        for _ in range(k):
            m = self.at(m, n)
        return m


def naive_terms(family, params, ics, count):
    """Terms 1..count, stopping before the first undefined index.

    Returns ``(terms, first_undefined)`` where ``first_undefined`` is None
    when all ``count`` terms exist.
    """
    ev = NaiveEvaluator(family, params, ics)
    out = []
    for n in range(1, count + 1):
        try:
            out.append(ev.value(n))
        except Undefined:
            return out, n
    return out, None


def spec_family_params(spec):
    d = spec.to_dict()
    family = d.pop("family")
    return family, d
