"""Quantile functions built from finitely many affine copies of themselves.

A self-similar quantile Q on [0, 1] with values in [0, 1] is described by
pieces covering [0, 1] in order. A *similar* piece (start, width, offset,
ratio) satisfies Q(start + width * u) = offset + ratio * Q(u); a *flat*
piece (start, width, value) is constant. The Cantor function and the
binary-to-ternary digit map are the two examples used here.
"""
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np


@dataclass(frozen=True)
class SelfSimilarQuantile:
    # each piece: ("sim", start, width, offset, ratio) or ("flat", start, width, value)
    pieces: tuple
    depth: int = 48

    @property
    def starts(self):
        return np.array([p[1] for p in self.pieces])

    def _locate(self, t, side):
        starts = self.starts
        if side == "right":
            k = np.searchsorted(starts, t, side="right") - 1
        else:
            k = np.searchsorted(starts, t, side="left") - 1
        return np.clip(k, 0, len(self.pieces) - 1)

    def evaluate(self, t, side="right"):
        """Q(t) for side='right', the left limit Q(t-) for side='left'. Vectorised."""
        t = np.atleast_1d(np.asarray(t, dtype=float)).copy()
        out = np.zeros_like(t)
        scale = np.ones_like(t)
        done = np.zeros(t.shape, dtype=bool)
        kinds = np.array([p[0] == "sim" for p in self.pieces])
        start = np.array([p[1] for p in self.pieces])
        width = np.array([p[2] for p in self.pieces])
        off = np.array([p[3] for p in self.pieces])
        ratio = np.array([p[4] if p[0] == "sim" else 0.0 for p in self.pieces])
        for _ in range(self.depth):
            k = self._locate(t, side)
            flat = ~kinds[k] & ~done
            out = np.where(flat, out + scale * off[k], out)
            done |= flat
            sim = ~done
            out = np.where(sim, out + scale * off[k], out)
            scale = np.where(sim, scale * ratio[k], scale)
            t = np.where(sim, np.clip((t - start[k]) / width[k], 0.0, 1.0), t)
            if done.all():
                break
        # remaining scale is below ratio**depth; interpolate linearly inside it
        out = np.where(done, out, out + scale * t)
        return out

    def cdf(self, x, strict=False):
        """Lebesgue measure of {t : Q(t) <= x} (or < x when ``strict``). Vectorised.

        Q takes the values 0 and 1 only on null sets, so the two versions
        differ only at the values of flat pieces.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float)).copy()
        total = np.zeros_like(x)
        scale = np.ones_like(x)
        live = np.ones(x.shape, dtype=bool)
        for _ in range(self.depth):
            total = np.where(live & (x >= 1.0), total + scale, total)
            live &= (x > 0.0) & (x < 1.0)
            if not live.any():
                break
            nxt_x = np.zeros_like(x)
            nxt_scale = np.zeros_like(x)
            found = np.zeros(x.shape, dtype=bool)
            for p in self.pieces:
                if p[0] == "flat":
                    hit = (p[3] < x) if strict else (p[3] <= x)
                    total = np.where(live & hit, total + scale * p[2], total)
                    continue
                y = (x - p[3]) / p[4]
                total = np.where(live & (y >= 1.0), total + scale * p[2], total)
                inner = live & (y > 0.0) & (y < 1.0)
                nxt_x = np.where(inner, y, nxt_x)
                nxt_scale = np.where(inner, scale * p[2], nxt_scale)
                found |= inner
            live &= found
            x, scale = nxt_x, nxt_scale
        return np.where(live, total + scale * x, total)

    def full_moments(self, k):
        """Vector (int_0^1 Q^j)_{j=0..k}, solved from the self-similarity relation."""
        return _full_moments(self, int(k)).copy()

    def _moments_uncached(self, k):
        m = np.zeros(k + 1)
        m[0] = 1.0
        for j in range(1, k + 1):
            rhs = 0.0
            diag = 0.0
            for p in self.pieces:
                if p[0] == "flat":
                    rhs += p[2] * p[3] ** j
                else:
                    _, _, w, beta, rho = p
                    diag += w * rho**j
                    rhs += w * sum(comb(j, i) * beta ** (j - i) * rho**i * m[i] for i in range(j))
            m[j] = rhs / (1.0 - diag)
        return m

    def partial_moments(self, x, k):
        """Array of shape (len(x), k+1) with int_0^x Q^j for j = 0..k."""
        x = np.atleast_1d(np.asarray(x, dtype=float)).copy()
        full = self.full_moments(k)
        npc = len(self.pieces)
        # per piece: moment vector of the whole piece and the transfer matrix of a partial piece
        whole = np.zeros((npc, k + 1))
        transfer = np.zeros((npc, k + 1, k + 1))
        const = np.zeros((npc, k + 1))
        for idx, p in enumerate(self.pieces):
            if p[0] == "flat":
                whole[idx] = p[2] * p[3] ** np.arange(k + 1)
                const[idx] = p[3] ** np.arange(k + 1)  # times (x - start) later
            else:
                _, _, w, beta, rho = p
                for j in range(k + 1):
                    for i in range(j + 1):
                        transfer[idx, j, i] = w * comb(j, i) * beta ** (j - i) * rho**i
                whole[idx] = transfer[idx] @ full
        cum = np.vstack([np.zeros(k + 1), np.cumsum(whole, axis=0)])
        kinds = np.array([p[0] == "sim" for p in self.pieces])
        start = np.array([p[1] for p in self.pieces])
        width = np.array([p[2] for p in self.pieces])

        acc_vec = np.zeros((len(x), k + 1))
        acc_mat = np.broadcast_to(np.eye(k + 1), (len(x), k + 1, k + 1)).copy()
        active = np.ones(len(x), dtype=bool)
        at_end = x >= 1.0
        acc_vec[at_end] = full
        active &= ~at_end
        active &= x > 0.0
        for _ in range(self.depth):
            if not active.any():
                break
            kk = self._locate(x, "right")
            base = cum[kk]
            flat = ~kinds[kk]
            lin = np.where(flat[:, None], (x - start[kk])[:, None] * const[kk], 0.0)
            step = base + lin
            acc_vec[active] += np.einsum("nij,nj->ni", acc_mat[active], step[active])
            stop = active & flat
            active &= ~stop
            if not active.any():
                break
            acc_mat[active] = np.einsum("nij,njk->nik", acc_mat[active], transfer[kk[active]])
            x = np.where(active, np.clip((x - start[kk]) / width[kk], 0.0, 1.0), x)
        return acc_vec

    def power_integrals(self, a, b, c, s, terms=64, min_width=1e-17):
        """(int_a^b (c - Q)_+^s, int_a^b (Q - c)_+^s) for real s > 0.

        Cells of the self-similar tree whose value range stays about two
        range-widths away from c (1.9, to absorb rounding) are summed in closed form with a binomial
        series in the exact moments; the rest are split further.
        """
        full = self.full_moments(terms)
        j = np.arange(terms + 1)
        # generalised binomial coefficients C(s, j)
        coef = np.r_[1.0, np.cumprod((s - j[:-1]) / (j[:-1] + 1.0))]
        low = up = 0.0
        stack = [(0.0, 1.0, 0.0, 1.0)]  # (t0, width, y0, ratio): Q(t0 + width u) = y0 + ratio Q(u)
        while stack:
            t0, w, y0, rho = stack.pop()
            t1 = t0 + w
            lo_t, hi_t = max(a, t0), min(b, t1)
            if hi_t <= lo_t:
                continue
            whole = lo_t == t0 and hi_t == t1
            if whole and c - y0 >= 1.9 * rho:
                d = c - y0
                low += w * d**s * float(np.dot(coef * (-rho / d) ** j, full))
                continue
            if whole and y0 - c >= 1.9 * rho:
                d = y0 - c
                up += w * d**s * float(np.dot(coef * (rho / d) ** j, full))
                continue
            if w < min_width or rho <= 1e-15 * (abs(y0) + abs(c) + 1.0):
                # width or value range below roundoff; use the cell midpoint
                v = y0 + 0.5 * rho
                low += (hi_t - lo_t) * max(c - v, 0.0) ** s
                up += (hi_t - lo_t) * max(v - c, 0.0) ** s
                continue
            for p in self.pieces:
                if p[0] == "flat":
                    f0, f1 = max(lo_t, t0 + w * p[1]), min(hi_t, t0 + w * (p[1] + p[2]))
                    if f1 > f0:
                        v = y0 + rho * p[3]
                        low += (f1 - f0) * max(c - v, 0.0) ** s
                        up += (f1 - f0) * max(v - c, 0.0) ** s
                else:
                    stack.append((t0 + w * p[1], w * p[2], y0 + rho * p[3], rho * p[4]))
        return low, up


@lru_cache(maxsize=64)
def _full_moments(engine, k):
    return engine._moments_uncached(k)


def cantor_function_quantile(depth=48):
    """The Cantor function, as a self-similar quantile on [0, 1]."""
    return SelfSimilarQuantile(
        (("sim", 0.0, 1 / 3, 0.0, 0.5), ("flat", 1 / 3, 1 / 3, 0.5), ("sim", 2 / 3, 1 / 3, 0.5, 0.5)),
        depth,
    )


def binary_to_ternary_quantile(depth=48):
    """Binary digits of t rewritten as ternary digits in {0, 2}; the quantile of the Cantor measure."""
    return SelfSimilarQuantile((("sim", 0.0, 0.5, 0.0, 1 / 3), ("sim", 0.5, 0.5, 2 / 3, 1 / 3)), depth)
