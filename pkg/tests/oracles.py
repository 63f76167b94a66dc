"""Reference computations kept deliberately naive and separate from the package."""

import numpy as np


def enumerate_group(gens, cap=20000, decimals=8):
    """Brute-force closure of a finite matrix group, keyed on rounded entries."""
    gens = [np.asarray(g, dtype=complex) for g in gens]
    gens = gens + [g.conj().T for g in gens]

    def key(m):
        r = np.round(m, decimals) + 0.0  # folds -0.0 into 0.0
        return r.tobytes()

    ident = np.eye(len(gens[0]), dtype=complex)
    seen = {key(ident): ident}
    frontier = [ident]
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                b = g @ a
                kb = key(b)
                if kb not in seen:
                    seen[kb] = b
                    new.append(b)
        if len(seen) > cap:
            raise RuntimeError("group too large for enumeration")
        frontier = new
    return list(seen.values())


def trace_moment(elements, k=2):
    """Average of |tr g|^(2k) over a list of group elements."""
    return float(np.mean([abs(np.trace(g)) ** (2 * k) for g in elements]))


def haar_trace_moment(m, k, samples, rng):
    """Monte Carlo Haar average of |tr U|^(2k) on U(m) via QR of Ginibre matrices."""
    total = np.empty(samples)
    batch = 20000
    for start in range(0, samples, batch):
        n = min(batch, samples - start)
        z = (rng.standard_normal((n, m, m)) + 1j * rng.standard_normal((n, m, m))) / np.sqrt(2)
        q, r = np.linalg.qr(z)
        ph = np.diagonal(r, axis1=1, axis2=2)
        q = q * (ph / abs(ph))[:, None, :]
        total[start:start + n] = abs(np.trace(q, axis1=1, axis2=2)) ** (2 * k)
    return total.mean(), total.std(ddof=1) / np.sqrt(samples)
