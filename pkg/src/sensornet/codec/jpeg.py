"""Baseline-sequential JPEG: JFIF encoder and a matching decoder.

The encoder emits standard JFIF (SOI/APP0/DQT/SOF0/DHT/SOS/EOI) with the
Annex K tables quality-scaled, 4:4:4 or 4:2:0 subsampling, and no restart
markers; any conforming baseline decoder can read it.  The decoder accepts
baseline files from third-party encoders as well: 1- or 3-component,
sampling factors with integer ratios, optional restart intervals.
"""

from __future__ import annotations

import math
import struct

import numpy as np

from ..types import ImageBuffer, PixelFormat
from . import _kernels as K
from . import _tables as T


class CodecError(Exception):
    pass


class DimensionOverflow(CodecError):
    """Image dimension exceeds the 65535 format limit."""


class MalformedBitstream(CodecError):
    """Truncated input or marker/entropy violations."""


MAX_DIMENSION = 65535

_AAN = np.array(
    [1.0, 1.387039845, 1.306562965, 1.175875602, 1.0, 0.785694958, 0.541196100, 0.275899379]
)

_RANGE_LIMIT = K.make_range_limit()
_CRR, _CBB, _CRG, _CBG = K.make_ycc_rgb_tables()


def _encoder_tables():
    dc_codes = np.zeros((2, 256), np.int64)
    dc_sizes = np.zeros((2, 256), np.int64)
    ac_codes = np.zeros((2, 256), np.int64)
    ac_sizes = np.zeros((2, 256), np.int64)
    for i, (bits, vals) in enumerate(
        [(T.DC_LUMA_BITS, T.DC_LUMA_VALS), (T.DC_CHROMA_BITS, T.DC_CHROMA_VALS)]
    ):
        c, s = T.build_huffman_codes(bits, vals)
        dc_codes[i], dc_sizes[i] = c, s
    for i, (bits, vals) in enumerate(
        [(T.AC_LUMA_BITS, T.AC_LUMA_VALS), (T.AC_CHROMA_BITS, T.AC_CHROMA_VALS)]
    ):
        c, s = T.build_huffman_codes(bits, vals)
        ac_codes[i], ac_sizes[i] = c, s
    return dc_codes, dc_sizes, ac_codes, ac_sizes


_DC_CODES, _DC_SIZES, _AC_CODES, _AC_SIZES = _encoder_tables()


def _quant_recip(qtab_natural: np.ndarray) -> np.ndarray:
    div = qtab_natural.astype(np.float64) * np.outer(_AAN, _AAN).reshape(64) * 8.0
    return (1.0 / div).astype(np.float32)


import functools


@functools.lru_cache(maxsize=32)
def _mcu_layout(width, height, sampling):
    """Block-to-component maps for an interleaved scan.

    Returns (g_comp, g_idx, comp_grids, n_mcus) where g_comp/g_idx give, for
    every block in MCU order, its component and raster block index inside
    that component's padded block grid; comp_grids lists (blocks_w, blocks_h,
    comp_w, comp_h) per component.  Cached per geometry; treat the returned
    arrays as read-only.
    """
    hmax = max(h for h, _ in sampling)
    vmax = max(v for _, v in sampling)
    mcus_x = -(-width // (8 * hmax))
    mcus_y = -(-height // (8 * vmax))
    nmcu = mcus_x * mcus_y
    comp_grids = []
    for hi, vi in sampling:
        comp_w = -(-width * hi // hmax)
        comp_h = -(-height * vi // vmax)
        comp_grids.append((mcus_x * hi, mcus_y * vi, comp_w, comp_h))
    slots = [
        (c, dy, dx)
        for c, (hi, vi) in enumerate(sampling)
        for dy in range(vi)
        for dx in range(hi)
    ]
    per_mcu = len(slots)
    m = np.arange(nmcu, dtype=np.int32)
    my, mx = m // mcus_x, m % mcus_x
    g_comp = np.empty(nmcu * per_mcu, np.int8)
    g_idx = np.empty(nmcu * per_mcu, np.int32)
    for s, (c, dy, dx) in enumerate(slots):
        hi, vi = sampling[c]
        bw = comp_grids[c][0]
        g_comp[s::per_mcu] = c
        g_idx[s::per_mcu] = (my * vi + dy) * bw + (mx * hi + dx)
    return g_comp, g_idx, comp_grids, nmcu


def _single_comp_layout(comp_w, comp_h):
    bw = -(-comp_w // 8)
    bh = -(-comp_h // 8)
    nb = bw * bh
    g_comp = np.zeros(nb, np.int8)
    g_idx = np.arange(nb, dtype=np.int32)
    return g_comp, g_idx, [(bw, bh, comp_w, comp_h)], nb


def _marker(marker_byte, payload):
    return bytes([0xFF, marker_byte]) + struct.pack(">H", len(payload) + 2) + payload


def quantized_blocks(img: ImageBuffer, quality: int = 75, subsampling: str = "4:2:0"):
    """Zigzag-ordered quantized coefficients per component (encoder front half).

    Exposed for inspection and tests; encode_lossy entropy-codes exactly these.
    """
    h, w = img.height, img.width
    if w < 1 or h < 1:
        raise ValueError("image must be at least 1x1")
    if w > MAX_DIMENSION or h > MAX_DIMENSION:
        raise DimensionOverflow(f"{w}x{h} exceeds {MAX_DIMENSION}")
    qy = T.scaled_quant_table(T.LUMA_QUANT_BASE, quality)
    qc = T.scaled_quant_table(T.CHROMA_QUANT_BASE, quality)
    if img.pixel_format in (PixelFormat.RGB, PixelFormat.YCBCR):
        if img.pixel_format is PixelFormat.YCBCR:
            raise ValueError("encode expects RGB or single-channel input")
        if subsampling == "4:2:0":
            sampling = [(2, 2), (1, 1), (1, 1)]
        elif subsampling == "4:4:4":
            sampling = [(1, 1)] * 3
        else:
            raise ValueError(f"unknown subsampling {subsampling!r}")
        g_comp, g_idx, comp_grids, _ = _mcu_layout(w, h, tuple(sampling))
        # planes are produced directly at block-padded size, edge-replicated
        Y, Cb, Cr = (np.empty((bh * 8, bw * 8), np.uint8) for bw, bh, _, _ in comp_grids)
        with K.KERNEL_LOCK:
            if subsampling == "4:2:0":
                K.rgb_to_planes_420(img.data, Y, Cb, Cr)
            else:
                K.rgb_to_planes_444(img.data, Y, Cb, Cr)
        planes = [Y, Cb, Cr]
        qtabs = [qy, qc, qc]
    else:
        sampling = [(1, 1)]
        g_comp, g_idx, comp_grids, _ = _mcu_layout(w, h, tuple(sampling))
        bw, bh = comp_grids[0][0], comp_grids[0][1]
        padded = np.empty((bh * 8, bw * 8), np.uint8)
        with K.KERNEL_LOCK:
            K.pad_plane_edge(img.data, padded)
        planes = [padded]
        qtabs = [qy]

    coefs = []
    for plane, qt, (bw, bh, _, _) in zip(planes, qtabs, comp_grids):
        out = np.empty((bw * bh, 64), np.int32)
        with K.KERNEL_LOCK:
            K.fdct_quant(plane, _quant_recip(qt), T.ZIGZAG_ORDER, out)
        coefs.append(out)
    return coefs, (sampling, g_comp, g_idx, comp_grids, qy, qc)


def encode_lossy(img: ImageBuffer, quality: int = 75, subsampling: str = "4:2:0") -> bytes:
    """Encode to a baseline JFIF bitstream; deterministic for fixed inputs."""
    coefs, (sampling, g_comp, g_idx, comp_grids, qy, qc) = quantized_blocks(
        img, quality, subsampling
    )
    ncomp = len(sampling)
    color = ncomp == 3

    while len(coefs) < 3:
        coefs.append(np.zeros((1, 64), np.int32))
    cap = int(g_comp.shape[0]) * 420 + 1024
    out = np.empty(cap, np.uint8)
    comp_dc = np.array([0, 1, 1], np.int8)
    comp_ac = np.array([0, 1, 1], np.int8)
    n = K.huffman_encode(
        coefs[0], coefs[1], coefs[2], g_comp, g_idx,
        _DC_CODES, _DC_SIZES, _AC_CODES, _AC_SIZES, comp_dc, comp_ac, out,
    )
    entropy = out[:n].tobytes()

    parts = [b"\xff\xd8"]  # SOI
    parts.append(
        _marker(0xE0, b"JFIF\x00" + bytes([1, 1, 0]) + struct.pack(">HH", 1, 1) + bytes([0, 0]))
    )
    parts.append(_marker(0xDB, bytes([0x00]) + bytes(qy[T.NATURAL_ORDER].astype(np.uint8))))
    if color:
        parts.append(_marker(0xDB, bytes([0x01]) + bytes(qc[T.NATURAL_ORDER].astype(np.uint8))))
    sof = bytes([8]) + struct.pack(">HH", img.height, img.width) + bytes([ncomp])
    for i, (hi, vi) in enumerate(sampling):
        sof += bytes([i + 1, (hi << 4) | vi, 0 if i == 0 else 1])
    parts.append(_marker(0xC0, sof))
    hts = [(0x00, T.DC_LUMA_BITS, T.DC_LUMA_VALS), (0x10, T.AC_LUMA_BITS, T.AC_LUMA_VALS)]
    if color:
        hts += [(0x01, T.DC_CHROMA_BITS, T.DC_CHROMA_VALS), (0x11, T.AC_CHROMA_BITS, T.AC_CHROMA_VALS)]
    for tclass, bits, vals in hts:
        parts.append(_marker(0xC4, bytes([tclass]) + bytes(bits) + bytes(vals)))
    sos = bytes([ncomp])
    for i in range(ncomp):
        sos += bytes([i + 1, 0x00 if i == 0 else 0x11])
    sos += bytes([0, 63, 0])
    parts.append(_marker(0xDA, sos))
    parts.append(entropy)
    parts.append(b"\xff\xd9")  # EOI
    return b"".join(parts)


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------


class _Component:
    __slots__ = ("cid", "h", "v", "tq", "dc_tab", "ac_tab")

    def __init__(self, cid, h, v, tq):
        self.cid, self.h, self.v, self.tq = cid, h, v, tq
        self.dc_tab = self.ac_tab = 0


def _parse_headers(data: bytes):
    if len(data) < 4 or data[0:2] != b"\xff\xd8":
        raise MalformedBitstream("missing SOI")
    pos = 2
    qtabs: dict[int, np.ndarray] = {}
    htabs: dict[tuple[int, int], tuple] = {}
    frame = None
    restart_interval = 0
    while True:
        if pos + 1 >= len(data):
            raise MalformedBitstream("truncated before SOS")
        if data[pos] != 0xFF:
            raise MalformedBitstream("expected marker")
        while pos < len(data) and data[pos] == 0xFF:
            pos += 1  # fill bytes
        if pos >= len(data):
            raise MalformedBitstream("truncated marker")
        marker = data[pos]
        pos += 1
        if marker == 0xD9:
            raise MalformedBitstream("EOI before image data")
        if marker == 0x01 or 0xD0 <= marker <= 0xD7:
            continue  # TEM / stray RST: no segment body
        if pos + 2 > len(data):
            raise MalformedBitstream("truncated segment length")
        (seglen,) = struct.unpack_from(">H", data, pos)
        if seglen < 2 or pos + seglen > len(data):
            raise MalformedBitstream("bad segment length")
        body = data[pos + 2 : pos + seglen]
        pos += seglen
        if marker == 0xDB:
            off = 0
            while off < len(body):
                pq, tq = body[off] >> 4, body[off] & 0x0F
                off += 1
                if pq == 0:
                    vals = np.frombuffer(body, np.uint8, 64, off).astype(np.int64)
                    off += 64
                elif pq == 1:
                    vals = np.frombuffer(body, ">u2", 64, off).astype(np.int64)
                    off += 128
                else:
                    raise MalformedBitstream("bad DQT precision")
                nat = np.zeros(64, np.int64)
                nat[T.NATURAL_ORDER] = vals
                qtabs[tq] = nat
        elif marker == 0xC4:
            off = 0
            while off < len(body):
                if off + 17 > len(body):
                    raise MalformedBitstream("bad DHT segment")
                tc, th = body[off] >> 4, body[off] & 0x0F
                bits = tuple(body[off + 1 : off + 17])
                nvals = sum(bits)
                vals = tuple(body[off + 17 : off + 17 + nvals])
                if len(vals) != nvals or tc > 1 or th > 3:
                    raise MalformedBitstream("bad DHT segment")
                htabs[(tc, th)] = T.build_decoder_table(bits, vals)
                off += 17 + nvals
        elif marker in (0xC0, 0xC1):
            precision, height, width, ncomp = struct.unpack_from(">BHHB", body, 0)
            if precision != 8:
                raise MalformedBitstream(f"unsupported precision {precision}")
            if ncomp not in (1, 3):
                raise MalformedBitstream(f"unsupported component count {ncomp}")
            if width < 1 or height < 1:
                raise MalformedBitstream("zero dimension")
            comps = []
            for i in range(ncomp):
                cid, hv, tq = struct.unpack_from(">BBB", body, 6 + 3 * i)
                comp = _Component(cid, hv >> 4, hv & 0x0F, tq)
                if not (1 <= comp.h <= 4 and 1 <= comp.v <= 4):
                    raise MalformedBitstream("bad sampling factor")
                comps.append(comp)
            frame = (width, height, comps)
        elif marker in (0xC2, 0xC3, 0xC5, 0xC6, 0xC7, 0xC9, 0xCA, 0xCB, 0xCD, 0xCE, 0xCF):
            raise MalformedBitstream("unsupported SOF (not baseline sequential)")
        elif marker == 0xDD:
            (restart_interval,) = struct.unpack(">H", body)
        elif marker == 0xDA:
            if frame is None:
                raise MalformedBitstream("SOS before SOF")
            ns = body[0]
            width, height, comps = frame
            if ns != len(comps):
                raise MalformedBitstream("multi-scan sequential files not supported")
            by_id = {c.cid: c for c in comps}
            for i in range(ns):
                cs, tabs = body[1 + 2 * i], body[2 + 2 * i]
                if cs not in by_id:
                    raise MalformedBitstream("scan references unknown component")
                by_id[cs].dc_tab = tabs >> 4
                by_id[cs].ac_tab = tabs & 0x0F
            return frame, qtabs, htabs, restart_interval, pos
        # APPn, COM, DNL and other length-bearing segments are skipped


def _split_scan(data: bytes, start: int):
    """Split entropy-coded data into unstuffed restart segments.

    Returns (segments, end_pos) where end_pos sits on the 0xFF of the
    trailing (non-RST) marker.
    """
    segments = []
    seg_start = start
    pos = start
    n = len(data)
    while True:
        ff = data.find(b"\xff", pos)
        if ff < 0 or ff + 1 >= n:
            raise MalformedBitstream("entropy data ends without marker")
        nxt = data[ff + 1]
        if nxt == 0x00:
            pos = ff + 2
            continue
        if 0xD0 <= nxt <= 0xD7:
            segments.append(data[seg_start:ff].replace(b"\xff\x00", b"\xff"))
            seg_start = ff + 2
            pos = ff + 2
            continue
        if nxt == 0xFF:
            pos = ff + 1  # fill byte
            continue
        segments.append(data[seg_start:ff].replace(b"\xff\x00", b"\xff"))
        return segments, ff


def decode_lossy(data: bytes) -> ImageBuffer:
    """Decode a baseline JPEG; RGB for 3-component files, GRAY for 1."""
    (width, height, comps), qtabs, htabs, ri, pos = _parse_headers(bytes(data))
    segments, end = _split_scan(data, pos)
    if data[end : end + 2] != b"\xff\xd9":
        raise MalformedBitstream("expected EOI after scan")

    ncomp = len(comps)
    sampling = [(c.h, c.v) for c in comps]
    if ncomp == 1:
        hmax = vmax = 1
        comp_w = [width]
        comp_h = [height]
        g_comp, g_idx, comp_grids, nmcu = _single_comp_layout(width, height)
        blocks_per_mcu = 1
    else:
        hmax = max(c.h for c in comps)
        vmax = max(c.v for c in comps)
        for c in comps:
            if hmax % c.h or vmax % c.v:
                raise MalformedBitstream("fractional sampling not supported")
        comp_w = [-(-width * c.h // hmax) for c in comps]
        comp_h = [-(-height * c.v // vmax) for c in comps]
        g_comp, g_idx, comp_grids, nmcu = _mcu_layout(width, height, tuple(sampling))
        blocks_per_mcu = sum(h * v for h, v in sampling)

    expected_segments = -(-nmcu // ri) if ri else 1
    if len(segments) != expected_segments:
        raise MalformedBitstream(
            f"restart segment count {len(segments)} != expected {expected_segments}"
        )

    for c in comps:
        if c.tq not in qtabs:
            raise MalformedBitstream(f"missing quantization table {c.tq}")
        if (0, c.dc_tab) not in htabs or (1, c.ac_tab) not in htabs:
            raise MalformedBitstream("missing Huffman table")

    # stack per-id decoder tables; comp selectors index into the stacks
    def stack(tc):
        minc = np.zeros((4, 17), np.int32)
        maxc = np.full((4, 17), -1, np.int64)
        vptr = np.zeros((4, 17), np.int32)
        hval = np.zeros((4, 257), np.int32)
        ll = np.zeros((4, 256), np.int32)
        ls = np.zeros((4, 256), np.int32)
        for th in range(4):
            tab = htabs.get((tc, th))
            if tab is None:
                continue
            mc, xc, vp, hv, l_, s_ = tab
            minc[th], maxc[th], vptr[th] = mc, xc, vp
            hval[th, : len(hv)] = hv
            ll[th], ls[th] = l_, s_
        return minc, maxc, vptr, hval, ll, ls

    dminc, dmaxc, dvptr, dhval, dll, dls = stack(0)
    aminc, amaxc, avptr, ahval, all_, als = stack(1)
    # merge DC/AC stacks: index 0..3 DC tables, 4..7 AC tables
    minc = np.vstack([dminc, aminc])
    maxc = np.vstack([dmaxc, amaxc])
    vptr = np.vstack([dvptr, avptr])
    hval = np.vstack([dhval, ahval])
    ll = np.vstack([dll, all_])
    ls = np.vstack([dls, als])
    comp_dc = np.array([c.dc_tab for c in comps], np.int8)
    comp_ac = np.array([4 + c.ac_tab for c in comps], np.int8)

    nb = g_comp.shape[0]
    coefs = np.zeros((nb, 64), np.int32)
    preds = np.zeros(ncomp, np.int32)
    for k, seg in enumerate(segments):
        mcu_lo = k * ri if ri else 0
        mcu_hi = min(nmcu, mcu_lo + ri) if ri else nmcu
        preds[:] = 0
        status = K.huffman_decode(
            np.frombuffer(seg, np.uint8),
            g_comp,
            mcu_lo * blocks_per_mcu,
            mcu_hi * blocks_per_mcu,
            comp_dc,
            comp_ac,
            minc,
            maxc,
            vptr,
            hval,
            ll,
            ls,
            T.NATURAL_ORDER,
            coefs,
            preds,
        )
        if status == K.STATUS_TRUNCATED:
            raise MalformedBitstream("entropy data truncated")
        if status != K.STATUS_OK:
            raise MalformedBitstream("invalid entropy coding")

    planes = []
    for ci, c in enumerate(comps):
        bw, bh, _, _ = comp_grids[ci]
        plane = np.empty((bh * 8, bw * 8), np.uint8)
        g_list = np.nonzero(g_comp == ci)[0].astype(np.int64)
        with K.KERNEL_LOCK:
            K.idct_blocks(coefs, g_list, g_idx, qtabs[c.tq], _RANGE_LIMIT, plane)
        planes.append(plane)

    if ncomp == 1:
        return ImageBuffer(PixelFormat.GRAY, planes[0][:height, :width])

    full = []
    for ci, c in enumerate(comps):
        # Upsampling sees the block-padded plane but the true sample counts;
        # a single-column plane legitimately reads one pad column.  Planes of
        # width <= 2 are replicated instead of triangle-filtered, matching
        # what mainstream decoders do.
        hr, vr = hmax // c.h, vmax // c.v
        src = planes[ci]
        ch, cw = comp_h[ci], comp_w[ci]
        if hr == 1 and vr == 1:
            full.append(src)
        elif hr == 2 and vr == 1 and cw > 2:
            up = np.empty((ch, cw * 2), np.uint8)
            with K.KERNEL_LOCK:
                K.upsample_h2v1_fancy(src, cw, ch, up)
            full.append(up)
        elif hr == 2 and vr == 2 and cw > 2:
            up = np.empty((ch * 2, cw * 2), np.uint8)
            with K.KERNEL_LOCK:
                K.upsample_h2v2_fancy(src, cw, ch, up)
            full.append(up)
        else:
            up = np.empty((ch * vr, cw * hr), np.uint8)
            K.upsample_replicate(np.ascontiguousarray(src[:ch, :cw]), cw, ch, hr, vr, up)
            full.append(up)

    # planes may be larger than the image; the output shape bounds the loops
    rgb = np.empty((height, width, 3), np.uint8)
    with K.KERNEL_LOCK:
        K.ycc_to_rgb(full[0], full[1], full[2], _CRR, _CBB, _CRG, _CBG, rgb)
    return ImageBuffer(PixelFormat.RGB, rgb)


def psnr(a: ImageBuffer | np.ndarray, b: ImageBuffer | np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB between two 8-bit rasters."""
    pa = a.data if isinstance(a, ImageBuffer) else np.asarray(a)
    pb = b.data if isinstance(b, ImageBuffer) else np.asarray(b)
    if pa.shape != pb.shape:
        raise ValueError(f"shape mismatch {pa.shape} vs {pb.shape}")
    mse = np.mean((pa.astype(np.float64) - pb.astype(np.float64)) ** 2)
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)
