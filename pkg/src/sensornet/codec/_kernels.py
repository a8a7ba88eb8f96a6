"""JIT-compiled hot paths for the JPEG codec.

Parallel kernels must be entered through ``KERNEL_LOCK``: the active numba
threading layer may not support concurrent parallel regions from multiple
Python threads, and with two worker threads per region there is nothing to
gain from overlapping them anyway.  Sequential kernels are nogil and safe
from any thread.

The decode-side kernels (integer IDCT, fancy chroma upsampling, fixed-point
YCbCr->RGB) mirror the arithmetic of the widespread libjpeg "islow" path so
that our output stays within +/-1 of any mainstream decoder.
"""

from __future__ import annotations

import threading

import numpy as np
from numba import njit, prange

KERNEL_LOCK = threading.Lock()

# ---------------------------------------------------------------------------
# encoder: color conversion + 4:2:0 downsampling (16-bit fixed point)
# ---------------------------------------------------------------------------


@njit(parallel=True, nogil=True, cache=True)
def rgb_to_planes_420(rgb, Y, Cb, Cr):
    """Y plus 2x2-averaged chroma in one pass over the RGB data.

    Planes are written edge-replicated out to their block-padded shapes;
    the padded Y height/width are exactly twice the chroma plane's.
    """
    h, w = rgb.shape[0], rgb.shape[1]
    for r2 in prange(Cb.shape[0]):
        for c2 in range(Cb.shape[1]):
            sb = np.int32(0)
            sr = np.int32(0)
            for dr in range(2):
                rr = 2 * r2 + dr
                if rr >= h:
                    rr = h - 1
                for dc in range(2):
                    cc = 2 * c2 + dc
                    if cc >= w:
                        cc = w - 1
                    R = np.int32(rgb[rr, cc, 0])
                    G = np.int32(rgb[rr, cc, 1])
                    B = np.int32(rgb[rr, cc, 2])
                    Y[2 * r2 + dr, 2 * c2 + dc] = np.uint8(
                        (19595 * R + 38470 * G + 7471 * B + 32768) >> 16
                    )
                    sb += (-11059 * R - 21709 * G + 32768 * B + 8388608 + 32768) >> 16
                    sr += (32768 * R - 27439 * G - 5329 * B + 8388608 + 32768) >> 16
            Cb[r2, c2] = np.uint8((sb + 2) >> 2)
            Cr[r2, c2] = np.uint8((sr + 2) >> 2)


@njit(parallel=True, nogil=True, cache=True)
def rgb_to_planes_444(rgb, Y, Cb, Cr):
    h, w = rgb.shape[0], rgb.shape[1]
    for r in prange(Y.shape[0]):
        rr = r
        if rr >= h:
            rr = h - 1
        for c in range(Y.shape[1]):
            cc = c
            if cc >= w:
                cc = w - 1
            R = np.int32(rgb[rr, cc, 0])
            G = np.int32(rgb[rr, cc, 1])
            B = np.int32(rgb[rr, cc, 2])
            Y[r, c] = np.uint8((19595 * R + 38470 * G + 7471 * B + 32768) >> 16)
            Cb[r, c] = np.uint8((-11059 * R - 21709 * G + 32768 * B + 8388608 + 32768) >> 16)
            Cr[r, c] = np.uint8((32768 * R - 27439 * G - 5329 * B + 8388608 + 32768) >> 16)


@njit(parallel=True, nogil=True, cache=True)
def pad_plane_edge(src, out):
    h, w = src.shape
    for r in prange(out.shape[0]):
        rr = r
        if rr >= h:
            rr = h - 1
        for c in range(out.shape[1]):
            cc = c
            if cc >= w:
                cc = w - 1
            out[r, c] = src[rr, cc]


# ---------------------------------------------------------------------------
# encoder: AAN float FDCT + quantization, output in zigzag order
# ---------------------------------------------------------------------------


@njit(parallel=True, nogil=True, cache=True)
def fdct_quant(plane, recip, zigzag, out):
    """AAN float FDCT + quantization over a block-padded uint8 plane.

    recip is 1/divisor in natural order with the AAN scale factors folded in;
    out receives int32 coefficients in zigzag order.  The two 1-D passes keep
    constant row indices on their destination arrays so the column loops
    vectorize.
    """
    bw = plane.shape[1] // 8
    n = out.shape[0]
    for b in prange(n):
        by = (b // bw) * 8
        bx = (b % bw) * 8
        blocks = np.empty((8, 8), np.float32)
        for i in range(8):
            for j in range(8):
                blocks[i, j] = np.float32(plane[by + i, bx + j]) - np.float32(128.0)
        tmp = np.empty((8, 8), np.float32)
        for i in range(8):
            t0 = blocks[i, 0] + blocks[i, 7]
            t7 = blocks[i, 0] - blocks[i, 7]
            t1 = blocks[i, 1] + blocks[i, 6]
            t6 = blocks[i, 1] - blocks[i, 6]
            t2 = blocks[i, 2] + blocks[i, 5]
            t5 = blocks[i, 2] - blocks[i, 5]
            t3 = blocks[i, 3] + blocks[i, 4]
            t4 = blocks[i, 3] - blocks[i, 4]
            t10 = t0 + t3
            t13 = t0 - t3
            t11 = t1 + t2
            t12 = t1 - t2
            tmp[i, 0] = t10 + t11
            tmp[i, 4] = t10 - t11
            z1 = (t12 + t13) * np.float32(0.707106781)
            tmp[i, 2] = t13 + z1
            tmp[i, 6] = t13 - z1
            t10 = t4 + t5
            t11 = t5 + t6
            t12 = t6 + t7
            z5 = (t10 - t12) * np.float32(0.382683433)
            z2 = np.float32(0.541196100) * t10 + z5
            z4 = np.float32(1.306562965) * t12 + z5
            z3 = t11 * np.float32(0.707106781)
            z11 = t7 + z3
            z13 = t7 - z3
            tmp[i, 5] = z13 + z2
            tmp[i, 3] = z13 - z2
            tmp[i, 1] = z11 + z4
            tmp[i, 7] = z11 - z4
        res = np.empty((8, 8), np.float32)
        for j in range(8):
            t0 = tmp[0, j] + tmp[7, j]
            t7 = tmp[0, j] - tmp[7, j]
            t1 = tmp[1, j] + tmp[6, j]
            t6 = tmp[1, j] - tmp[6, j]
            t2 = tmp[2, j] + tmp[5, j]
            t5 = tmp[2, j] - tmp[5, j]
            t3 = tmp[3, j] + tmp[4, j]
            t4 = tmp[3, j] - tmp[4, j]
            t10 = t0 + t3
            t13 = t0 - t3
            t11 = t1 + t2
            t12 = t1 - t2
            res[0, j] = t10 + t11
            res[4, j] = t10 - t11
            z1 = (t12 + t13) * np.float32(0.707106781)
            res[2, j] = t13 + z1
            res[6, j] = t13 - z1
            t10 = t4 + t5
            t11 = t5 + t6
            t12 = t6 + t7
            z5 = (t10 - t12) * np.float32(0.382683433)
            z2 = np.float32(0.541196100) * t10 + z5
            z4 = np.float32(1.306562965) * t12 + z5
            z3 = t11 * np.float32(0.707106781)
            z11 = t7 + z3
            z13 = t7 - z3
            res[5, j] = z13 + z2
            res[3, j] = z13 - z2
            res[1, j] = z11 + z4
            res[7, j] = z11 - z4
        for k in range(64):
            q = res[k // 8, k % 8] * recip[k]
            out[b, zigzag[k]] = (
                np.int32(q + np.float32(0.5)) if q >= 0 else -np.int32(-q + np.float32(0.5))
            )


# ---------------------------------------------------------------------------
# encoder: sequential Huffman entropy coding with byte stuffing
# ---------------------------------------------------------------------------


@njit(nogil=True, cache=True)
def _bit_size(v):
    s = 0
    a = v if v >= 0 else -v
    while a:
        a >>= 1
        s += 1
    return s


@njit(nogil=True, cache=True)
def huffman_encode(
    coefs0,
    coefs1,
    coefs2,
    g_comp,
    g_idx,
    dc_codes,
    dc_sizes,
    ac_codes,
    ac_sizes,
    comp_dc_tab,
    comp_ac_tab,
    out,
):
    """Entropy-code zigzagged blocks in MCU order.  Returns bytes written."""
    bitbuf = np.int64(0)
    nbits = 0
    pos = 0
    pred0 = 0
    pred1 = 0
    pred2 = 0
    for g in range(g_comp.shape[0]):
        comp = g_comp[g]
        idx = g_idx[g]
        if comp == 0:
            row = coefs0[idx]
            pred = pred0
        elif comp == 1:
            row = coefs1[idx]
            pred = pred1
        else:
            row = coefs2[idx]
            pred = pred2
        dt = comp_dc_tab[comp]
        at = comp_ac_tab[comp]
        # DC
        dc = row[0]
        diff = dc - pred
        if comp == 0:
            pred0 = dc
        elif comp == 1:
            pred1 = dc
        else:
            pred2 = dc
        s = _bit_size(diff)
        bitbuf = (bitbuf << dc_sizes[dt, s]) | np.int64(dc_codes[dt, s])
        nbits += dc_sizes[dt, s]
        if s:
            mag = diff if diff >= 0 else diff + (1 << s) - 1
            bitbuf = (bitbuf << s) | np.int64(mag)
            nbits += s
        while nbits >= 8:
            nbits -= 8
            byte = np.uint8((bitbuf >> nbits) & 0xFF)
            out[pos] = byte
            pos += 1
            if byte == 0xFF:
                out[pos] = 0
                pos += 1
        # AC with run lengths
        run = 0
        for k in range(1, 64):
            v = row[k]
            if v == 0:
                run += 1
                continue
            while run > 15:
                bitbuf = (bitbuf << ac_sizes[at, 0xF0]) | np.int64(ac_codes[at, 0xF0])
                nbits += ac_sizes[at, 0xF0]
                run -= 16
                while nbits >= 8:
                    nbits -= 8
                    byte = np.uint8((bitbuf >> nbits) & 0xFF)
                    out[pos] = byte
                    pos += 1
                    if byte == 0xFF:
                        out[pos] = 0
                        pos += 1
            s = _bit_size(v)
            sym = (run << 4) | s
            bitbuf = (bitbuf << ac_sizes[at, sym]) | np.int64(ac_codes[at, sym])
            nbits += ac_sizes[at, sym]
            mag = v if v >= 0 else v + (1 << s) - 1
            bitbuf = (bitbuf << s) | np.int64(mag)
            nbits += s
            run = 0
            while nbits >= 8:
                nbits -= 8
                byte = np.uint8((bitbuf >> nbits) & 0xFF)
                out[pos] = byte
                pos += 1
                if byte == 0xFF:
                    out[pos] = 0
                    pos += 1
        if run > 0:  # end of block
            bitbuf = (bitbuf << ac_sizes[at, 0]) | np.int64(ac_codes[at, 0])
            nbits += ac_sizes[at, 0]
            while nbits >= 8:
                nbits -= 8
                byte = np.uint8((bitbuf >> nbits) & 0xFF)
                out[pos] = byte
                pos += 1
                if byte == 0xFF:
                    out[pos] = 0
                    pos += 1
    if nbits > 0:  # pad final byte with 1-bits
        pad = 8 - nbits
        byte = np.uint8(((bitbuf << pad) | ((1 << pad) - 1)) & 0xFF)
        out[pos] = byte
        pos += 1
        if byte == 0xFF:
            out[pos] = 0
            pos += 1
    return pos


# ---------------------------------------------------------------------------
# decoder: sequential Huffman decode of one restart segment
# ---------------------------------------------------------------------------

STATUS_OK = 0
STATUS_TRUNCATED = 1
STATUS_BAD_CODE = 2
STATUS_BAD_SYMBOL = 3


@njit(nogil=True, cache=True)
def huffman_decode(
    data,
    g_comp,
    g_start,
    g_stop,
    comp_dc_tab,
    comp_ac_tab,
    mincode,
    maxcode,
    valptr,
    huffval,
    look_len,
    look_sym,
    natural_order,
    coefs,
    preds,
):
    """Decode blocks [g_start, g_stop) from one unstuffed entropy segment.

    coefs rows are written in natural order.  preds carries per-component DC
    predictors (reset by the caller at restart boundaries).
    """
    n = data.shape[0]
    pos = 0
    acc = np.int64(0)
    nbits = 0
    for g in range(g_start, g_stop):
        comp = g_comp[g]
        for target in range(2):
            table = comp_dc_tab[comp] if target == 0 else comp_ac_tab[comp]
            k = 0 if target == 0 else 1
            while True:
                # refill
                while nbits <= 48 and pos < n:
                    acc = (acc << 8) | np.int64(data[pos])
                    pos += 1
                    nbits += 8
                # decode one symbol
                peek = np.int64(0)
                if nbits >= 8:
                    peek = (acc >> (nbits - 8)) & 0xFF
                    ln = look_len[table, peek]
                else:
                    ln = 0
                if ln:
                    nbits -= ln
                    sym = look_sym[table, peek]
                else:
                    code = np.int64(0)
                    ln = 0
                    ok = False
                    for _ in range(16):
                        if nbits == 0:
                            if pos < n:
                                acc = (acc << 8) | np.int64(data[pos])
                                pos += 1
                                nbits += 8
                            else:
                                return STATUS_TRUNCATED
                        nbits -= 1
                        code = (code << 1) | ((acc >> nbits) & 1)
                        ln += 1
                        if code <= maxcode[table, ln]:
                            ok = True
                            break
                    if not ok:
                        return STATUS_BAD_CODE
                    sym = huffval[table, valptr[table, ln] + np.int32(code - mincode[table, ln])]
                if target == 0:
                    s = sym
                    if s > 11:
                        return STATUS_BAD_SYMBOL
                    diff = 0
                    if s:
                        if nbits < s:
                            while nbits <= 48 and pos < n:
                                acc = (acc << 8) | np.int64(data[pos])
                                pos += 1
                                nbits += 8
                            if nbits < s:
                                return STATUS_TRUNCATED
                        nbits -= s
                        bits = (acc >> nbits) & ((np.int64(1) << s) - 1)
                        diff = np.int32(bits)
                        if bits < (np.int64(1) << (s - 1)):
                            diff = np.int32(bits - (np.int64(1) << s) + 1)
                    preds[comp] += diff
                    coefs[g, 0] = preds[comp]
                    break
                # AC symbol
                r = sym >> 4
                s = sym & 0x0F
                if s == 0:
                    if r == 15:
                        k += 16
                        if k > 64:
                            return STATUS_BAD_SYMBOL
                        continue
                    break  # EOB
                k += r
                if k > 63:
                    return STATUS_BAD_SYMBOL
                if nbits < s:
                    while nbits <= 48 and pos < n:
                        acc = (acc << 8) | np.int64(data[pos])
                        pos += 1
                        nbits += 8
                    if nbits < s:
                        return STATUS_TRUNCATED
                nbits -= s
                bits = (acc >> nbits) & ((np.int64(1) << s) - 1)
                val = np.int32(bits)
                if bits < (np.int64(1) << (s - 1)):
                    val = np.int32(bits - (np.int64(1) << s) + 1)
                coefs[g, natural_order[k]] = val
                k += 1
                if k > 63:
                    break
    return STATUS_OK


# ---------------------------------------------------------------------------
# decoder: integer IDCT, libjpeg islow arithmetic (bit-exact)
# ---------------------------------------------------------------------------

CONST_BITS = 13
PASS1_BITS = 2

_F0298 = 2446
_F0390 = 3196
_F0541 = 4433
_F0765 = 6270
_F0899 = 7373
_F1175 = 9633
_F1501 = 12299
_F1847 = 15137
_F1961 = 16069
_F2053 = 16819
_F2562 = 20995
_F3072 = 25172


def make_range_limit() -> np.ndarray:
    """The post-IDCT range-limit table: index is the raw descaled value & 1023."""
    rl = np.zeros(1024, np.uint8)
    rl[0:128] = np.arange(128, 256)
    rl[128:512] = 255
    rl[512:896] = 0
    rl[896:1024] = np.arange(0, 128)
    return rl


@njit(parallel=True, nogil=True, cache=True)
def idct_blocks(coefs, g_list, plane_idx, qtab, range_limit, plane):
    """Dequantize + islow IDCT every block of one component into its plane."""
    bw = plane.shape[1] // 8
    for i in prange(g_list.shape[0]):
        g = g_list[i]
        pi = plane_idx[g]
        by = (pi // bw) * 8
        bx = (pi % bw) * 8
        blk = coefs[g]
        ws = np.empty(64, np.int64)
        for c in range(8):
            if (
                blk[8 + c] == 0
                and blk[16 + c] == 0
                and blk[24 + c] == 0
                and blk[32 + c] == 0
                and blk[40 + c] == 0
                and blk[48 + c] == 0
                and blk[56 + c] == 0
            ):
                dcval = np.int64(blk[c]) * qtab[c] << PASS1_BITS
                for r in range(8):
                    ws[8 * r + c] = dcval
                continue
            z2 = np.int64(blk[16 + c]) * qtab[16 + c]
            z3 = np.int64(blk[48 + c]) * qtab[48 + c]
            z1 = (z2 + z3) * _F0541
            tmp2 = z1 + z3 * (-_F1847)
            tmp3 = z1 + z2 * _F0765
            z2 = np.int64(blk[c]) * qtab[c]
            z3 = np.int64(blk[32 + c]) * qtab[32 + c]
            tmp0 = (z2 + z3) << CONST_BITS
            tmp1 = (z2 - z3) << CONST_BITS
            tmp10 = tmp0 + tmp3
            tmp13 = tmp0 - tmp3
            tmp11 = tmp1 + tmp2
            tmp12 = tmp1 - tmp2
            tmp0 = np.int64(blk[56 + c]) * qtab[56 + c]
            tmp1 = np.int64(blk[40 + c]) * qtab[40 + c]
            tmp2 = np.int64(blk[24 + c]) * qtab[24 + c]
            tmp3 = np.int64(blk[8 + c]) * qtab[8 + c]
            z1 = tmp0 + tmp3
            z2 = tmp1 + tmp2
            z3 = tmp0 + tmp2
            z4 = tmp1 + tmp3
            z5 = (z3 + z4) * _F1175
            tmp0 = tmp0 * _F0298
            tmp1 = tmp1 * _F2053
            tmp2 = tmp2 * _F3072
            tmp3 = tmp3 * _F1501
            z1 = z1 * (-_F0899)
            z2 = z2 * (-_F2562)
            z3 = z3 * (-_F1961)
            z4 = z4 * (-_F0390)
            z3 += z5
            z4 += z5
            tmp0 += z1 + z3
            tmp1 += z2 + z4
            tmp2 += z2 + z3
            tmp3 += z1 + z4
            ws[c] = (tmp10 + tmp3 + (1 << (CONST_BITS - PASS1_BITS - 1))) >> (CONST_BITS - PASS1_BITS)
            ws[56 + c] = (tmp10 - tmp3 + (1 << (CONST_BITS - PASS1_BITS - 1))) >> (CONST_BITS - PASS1_BITS)
            ws[8 + c] = (tmp11 + tmp2 + (1 << (CONST_BITS - PASS1_BITS - 1))) >> (CONST_BITS - PASS1_BITS)
            ws[48 + c] = (tmp11 - tmp2 + (1 << (CONST_BITS - PASS1_BITS - 1))) >> (CONST_BITS - PASS1_BITS)
            ws[16 + c] = (tmp12 + tmp1 + (1 << (CONST_BITS - PASS1_BITS - 1))) >> (CONST_BITS - PASS1_BITS)
            ws[40 + c] = (tmp12 - tmp1 + (1 << (CONST_BITS - PASS1_BITS - 1))) >> (CONST_BITS - PASS1_BITS)
            ws[24 + c] = (tmp13 + tmp0 + (1 << (CONST_BITS - PASS1_BITS - 1))) >> (CONST_BITS - PASS1_BITS)
            ws[32 + c] = (tmp13 - tmp0 + (1 << (CONST_BITS - PASS1_BITS - 1))) >> (CONST_BITS - PASS1_BITS)
        shift = CONST_BITS + PASS1_BITS + 3
        half = np.int64(1) << (shift - 1)
        for r in range(8):
            z2 = ws[8 * r + 2]
            z3 = ws[8 * r + 6]
            z1 = (z2 + z3) * _F0541
            tmp2 = z1 + z3 * (-_F1847)
            tmp3 = z1 + z2 * _F0765
            tmp0 = (ws[8 * r] + ws[8 * r + 4]) << CONST_BITS
            tmp1 = (ws[8 * r] - ws[8 * r + 4]) << CONST_BITS
            tmp10 = tmp0 + tmp3
            tmp13 = tmp0 - tmp3
            tmp11 = tmp1 + tmp2
            tmp12 = tmp1 - tmp2
            tmp0 = ws[8 * r + 7]
            tmp1 = ws[8 * r + 5]
            tmp2 = ws[8 * r + 3]
            tmp3 = ws[8 * r + 1]
            z1 = tmp0 + tmp3
            z2 = tmp1 + tmp2
            z3 = tmp0 + tmp2
            z4 = tmp1 + tmp3
            z5 = (z3 + z4) * _F1175
            tmp0 = tmp0 * _F0298
            tmp1 = tmp1 * _F2053
            tmp2 = tmp2 * _F3072
            tmp3 = tmp3 * _F1501
            z1 = z1 * (-_F0899)
            z2 = z2 * (-_F2562)
            z3 = z3 * (-_F1961)
            z4 = z4 * (-_F0390)
            z3 += z5
            z4 += z5
            tmp0 += z1 + z3
            tmp1 += z2 + z4
            tmp2 += z2 + z3
            tmp3 += z1 + z4
            plane[by + r, bx + 0] = range_limit[((tmp10 + tmp3 + half) >> shift) & 1023]
            plane[by + r, bx + 7] = range_limit[((tmp10 - tmp3 + half) >> shift) & 1023]
            plane[by + r, bx + 1] = range_limit[((tmp11 + tmp2 + half) >> shift) & 1023]
            plane[by + r, bx + 6] = range_limit[((tmp11 - tmp2 + half) >> shift) & 1023]
            plane[by + r, bx + 2] = range_limit[((tmp12 + tmp1 + half) >> shift) & 1023]
            plane[by + r, bx + 5] = range_limit[((tmp12 - tmp1 + half) >> shift) & 1023]
            plane[by + r, bx + 3] = range_limit[((tmp13 + tmp0 + half) >> shift) & 1023]
            plane[by + r, bx + 4] = range_limit[((tmp13 - tmp0 + half) >> shift) & 1023]


# ---------------------------------------------------------------------------
# decoder: chroma upsampling (libjpeg "fancy" triangle filters)
# ---------------------------------------------------------------------------


@njit(parallel=True, nogil=True, cache=True)
def upsample_h2v1_fancy(src, w, h, out):
    """src must carry at least one pad column past w (block padding does)."""
    for r in prange(h):
        v = np.int32(src[r, 0])
        out[r, 0] = np.uint8(v)
        out[r, 1] = np.uint8((v * 3 + np.int32(src[r, 1]) + 2) >> 2)
        if w == 1:
            continue
        for c in range(1, w - 1):
            v = np.int32(src[r, c]) * 3
            out[r, 2 * c] = np.uint8((v + np.int32(src[r, c - 1]) + 1) >> 2)
            out[r, 2 * c + 1] = np.uint8((v + np.int32(src[r, c + 1]) + 2) >> 2)
        v = np.int32(src[r, w - 1])
        out[r, 2 * (w - 1)] = np.uint8((v * 3 + np.int32(src[r, w - 2]) + 1) >> 2)
        out[r, 2 * (w - 1) + 1] = np.uint8(v)


@njit(parallel=True, nogil=True, cache=True)
def upsample_h2v2_fancy(src, w, h, out):
    """Triangle filter; vertical neighbors clamp at the true height, the
    horizontal neighbor of a single-column plane reads the pad column."""
    for outrow in prange(2 * h):
        near = outrow >> 1
        far = near - 1 if (outrow & 1) == 0 else near + 1
        if far < 0:
            far = 0
        if far > h - 1:
            far = h - 1
        this = np.int32(src[near, 0]) * 3 + np.int32(src[far, 0])
        nxt = np.int32(src[near, 1]) * 3 + np.int32(src[far, 1])
        out[outrow, 0] = np.uint8((this * 4 + 8) >> 4)
        out[outrow, 1] = np.uint8((this * 3 + nxt + 7) >> 4)
        if w == 1:
            continue
        last = this
        this = nxt
        for c in range(1, w - 1):
            nxt = np.int32(src[near, c + 1]) * 3 + np.int32(src[far, c + 1])
            out[outrow, 2 * c] = np.uint8((this * 3 + last + 8) >> 4)
            out[outrow, 2 * c + 1] = np.uint8((this * 3 + nxt + 7) >> 4)
            last = this
            this = nxt
        out[outrow, 2 * (w - 1)] = np.uint8((this * 3 + last + 8) >> 4)
        out[outrow, 2 * (w - 1) + 1] = np.uint8((this * 4 + 7) >> 4)


@njit(nogil=True, cache=True)
def upsample_replicate(src, w, h, hfac, vfac, out):
    for r in range(h * vfac):
        sr = r // vfac
        for c in range(w * hfac):
            out[r, c] = src[sr, c // hfac]


# ---------------------------------------------------------------------------
# decoder: fixed-point YCbCr -> RGB (libjpeg table arithmetic)
# ---------------------------------------------------------------------------


def make_ycc_rgb_tables():
    i = np.arange(256, dtype=np.int64)
    x = i - 128

    def fix(v):
        return np.int64(v * 65536 + 0.5)

    crr = ((fix(1.40200) * x + 32768) >> 16).astype(np.int32)
    cbb = ((fix(1.77200) * x + 32768) >> 16).astype(np.int32)
    crg = (-fix(0.71414) * x).astype(np.int64)
    cbg = (-fix(0.34414) * x + 32768).astype(np.int64)
    return crr, cbb, crg, cbg


@njit(parallel=True, nogil=True, cache=True)
def ycc_to_rgb(y, cb, cr, crr, cbb, crg, cbg, out):
    h, w = out.shape[0], out.shape[1]
    for r in prange(h):
        for c in range(w):
            yy = np.int32(y[r, c])
            b = cb[r, c]
            v = cr[r, c]
            rr = yy + crr[v]
            gg = yy + np.int32((cbg[b] + crg[v]) >> 16)
            bb = yy + cbb[b]
            out[r, c, 0] = np.uint8(min(255, max(0, rr)))
            out[r, c, 1] = np.uint8(min(255, max(0, gg)))
            out[r, c, 2] = np.uint8(min(255, max(0, bb)))
