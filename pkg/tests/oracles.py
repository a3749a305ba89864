"""Independent brute-force oracles the tests check the engine against.

Everything here deliberately avoids the code paths it verifies: counting is
per-document scans over raw text, the binomial tail is exact rational
arithmetic, quantiles and percentiles are recomputed from sorted lists.
"""

from fractions import Fraction
from math import ceil


def tokenize_naive(text):
    import unicodedata

    out = []
    for raw in text.split():
        start, end = 0, len(raw)
        while start < end and unicodedata.category(raw[start]).startswith("P"):
            start += 1
        while end > start and unicodedata.category(raw[end - 1]).startswith("P"):
            end -= 1
        if end > start:
            out.append(raw[start:end].lower())
    return out


def doc_grams(texts, n_max=3):
    grams = set()
    for text in texts:
        toks = tokenize_naive(text)
        for n in range(1, n_max + 1):
            for i in range(len(toks) - n + 1):
                grams.add(tuple(toks[i : i + n]))
    return grams


def doc_contains(texts, gram):
    for text in texts:
        toks = tokenize_naive(text)
        n = len(gram)
        for i in range(len(toks) - n + 1):
            if tuple(toks[i : i + n]) == gram:
                return True
    return False


def recount_vocabulary(docs_texts, min_df):
    """doc frequency per gram over a list of text-part lists."""
    df = {}
    for texts in docs_texts:
        for gram in doc_grams(texts):
            df[gram] = df.get(gram, 0) + 1
    return {g: c for g, c in df.items() if c >= min_df}


def binomial_tails_exact(n, p0_fraction):
    """P[X >= k] for every k in 0..n as exact Fractions.

    Terms come from the pmf recurrence, tails from a suffix sum.
    """
    p = p0_fraction
    q = 1 - p
    terms = [q**n]
    for i in range(n):
        terms.append(terms[-1] * (n - i) * p / ((i + 1) * q))
    tails = [Fraction(0)] * (n + 2)
    for k in range(n, -1, -1):
        tails[k] = tails[k + 1] + terms[k]
    return tails[: n + 1]


def nearest_rank_percentile(values, p):
    ordered = sorted(values)
    rank = ceil(Fraction(p, 100) * len(ordered))
    return ordered[max(rank, 1) - 1]


def naive_aggregate(store, subpop_ids, cls):
    """Per-token (cnt_pos, cnt_neg) counts by direct per-document scan."""
    counts = {}
    for doc_id in subpop_ids:
        rec = store.test_records[store.id_to_test_index[doc_id]]
        net = {}
        for e in rec.attributions.get(cls, ()):
            net[e.token] = net.get(e.token, 0.0) + e.score
        for tok, s in net.items():
            pair = counts.setdefault(tok, [0, 0])
            if s > 0:
                pair[0] += 1
            elif s < 0:
                pair[1] += 1
    return {t: tuple(v) for t, v in counts.items()}


def brute_force_rules(store, units, min_support_fraction, min_error_rate, max_conditions=2, redundancy_pruning=True):
    """Exhaustive rule search by per-document scanning.

    `units` is a list of (key, predicate) pairs where predicate(record) says
    whether the unit condition holds. Returns {frozenset(keys): (support,
    errors)} for every kept conjunction.
    """
    n = store.n_test
    matches = {}
    for key, pred in units:
        matches[key] = [bool(pred(r)) for r in store.test_records]
    err = [bool(e) for e in store.error_labels]

    def counts(keys):
        sup = 0
        k_err = 0
        for i in range(n):
            if all(matches[k][i] for k in keys):
                sup += 1
                if err[i]:
                    k_err += 1
        return sup, k_err

    kept = {}
    rates = {}
    keys = [k for k, _ in units]
    for key in keys:
        sup, k_err = counts([key])
        if sup:
            rates[frozenset([key])] = k_err / sup
        if sup and sup / n >= min_support_fraction and k_err / sup >= min_error_rate:
            kept[frozenset([key])] = (sup, k_err)

    if max_conditions >= 2:
        for i in range(len(keys)):
            for j in range(i + 1, len(keys)):
                pair = [keys[i], keys[j]]
                sup, k_err = counts(pair)
                if not sup or sup / n < min_support_fraction:
                    continue
                rate = k_err / sup
                if rate < min_error_rate:
                    continue
                if redundancy_pruning:
                    floor = max(
                        rates.get(frozenset([keys[i]]), 0.0),
                        rates.get(frozenset([keys[j]]), 0.0),
                    )
                    if rate <= floor:
                        continue
                kept[frozenset(pair)] = (sup, k_err)
    return kept
