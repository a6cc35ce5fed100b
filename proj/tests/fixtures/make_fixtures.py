#!/usr/bin/env python3
"""Regenerates the binary AXML / APK fixtures and their .expected oracles.

The encoder and decoder below are independent implementations of the Android
binary-XML format (little-endian chunked, AOSP ResourceTypes.h layout). Every
fixture's .expected file is produced by DECODING the generated bytes with the
decoder in this file, never by echoing the encoder's inputs, so the C++ parser
is compared against a second implementation's reading of the same bytes.

Run from the repository root:  python3 tests/fixtures/make_fixtures.py
"""

import os
import struct
import zipfile

HERE = os.path.dirname(os.path.abspath(__file__))

RES_STRING_POOL = 0x0001
RES_XML = 0x0003
RES_XML_START_NS = 0x0100
RES_XML_END_NS = 0x0101
RES_XML_START_EL = 0x0102
RES_XML_END_EL = 0x0103
RES_XML_RESOURCE_MAP = 0x0180

TYPE_STRING = 0x03
TYPE_INT_DEC = 0x10

ANDROID_NS = "http://schemas.android.com/apk/res/android"
ATTR_NAME_RES_ID = 0x01010003  # android:name


# ---------------------------------------------------------------------------
# Encoder
# ---------------------------------------------------------------------------

class AxmlBuilder:
    """Builds a binary manifest from (element, attrs) tuples.

    Strings with resource ids must come first in the pool; the resource map's
    i-th entry annotates pool index i.
    """

    def __init__(self, utf8_pool=False):
        self.utf8_pool = utf8_pool
        self.strings = []
        self.resource_ids = []
        self.index = {}

    def intern(self, s, res_id=None):
        if s in self.index:
            return self.index[s]
        if res_id is not None:
            if len(self.strings) != len(self.resource_ids):
                raise ValueError("resource-mapped strings must be interned first")
            self.resource_ids.append(res_id)
        idx = len(self.strings)
        self.strings.append(s)
        self.index[s] = idx
        return idx

    def _string_pool(self):
        offsets, data = [], b""
        for s in self.strings:
            offsets.append(len(data))
            if self.utf8_pool:
                raw = s.encode("utf-8")
                if len(s) > 0x7F or len(raw) > 0x7F:
                    raise ValueError("long strings not needed for fixtures")
                data += bytes([len(s), len(raw)]) + raw + b"\x00"
            else:
                units = s.encode("utf-16-le")
                if len(s) > 0x7FFF:
                    raise ValueError("long strings not needed for fixtures")
                data += struct.pack("<H", len(s)) + units + b"\x00\x00"
        while len(data) % 4:
            data += b"\x00"
        header_size = 28
        strings_start = header_size + 4 * len(offsets)
        flags = (1 << 8) if self.utf8_pool else 0
        body = b"".join(struct.pack("<I", o) for o in offsets) + data
        return struct.pack("<HHIIIIII", RES_STRING_POOL, header_size,
                           header_size + len(body), len(self.strings), 0,
                           flags, strings_start, 0) + body

    def _resource_map(self):
        if not self.resource_ids:
            return b""
        body = b"".join(struct.pack("<I", r) for r in self.resource_ids)
        return struct.pack("<HHI", RES_XML_RESOURCE_MAP, 8, 8 + len(body)) + body

    @staticmethod
    def _node(ctype, body, line=1):
        return struct.pack("<HHIII", ctype, 16, 16 + len(body), line, 0xFFFFFFFF) + body

    def start_ns(self, prefix_idx, uri_idx):
        return self._node(RES_XML_START_NS, struct.pack("<II", prefix_idx, uri_idx))

    def end_ns(self, prefix_idx, uri_idx):
        return self._node(RES_XML_END_NS, struct.pack("<II", prefix_idx, uri_idx))

    def start_element(self, name_idx, attrs=(), ns_idx=0xFFFFFFFF):
        body = struct.pack("<IIHHHHHH", ns_idx, name_idx, 20, 20, len(attrs), 0, 0, 0)
        for (ans, aname, raw, dtype, data) in attrs:
            body += struct.pack("<IIIHBBI", ans, aname, raw, 8, 0, dtype, data)
        return self._node(RES_XML_START_EL, body)

    def end_element(self, name_idx, ns_idx=0xFFFFFFFF):
        return self._node(RES_XML_END_EL, struct.pack("<II", ns_idx, name_idx))

    def document(self, node_chunks):
        payload = self._string_pool() + self._resource_map() + b"".join(node_chunks)
        return struct.pack("<HHI", RES_XML, 8, 8 + len(payload)) + payload


def build_manifest(package, permission_elements, utf8_pool=False):
    """permission_elements: list of (element_name, value) where value is a
    permission string, an int (non-string android:name), or None (no name
    attribute at all)."""
    b = AxmlBuilder(utf8_pool)
    name_idx = b.intern("name", ATTR_NAME_RES_ID)
    ns_idx = b.intern(ANDROID_NS)
    android_idx = b.intern("android")
    manifest_idx = b.intern("manifest")
    package_attr_idx = b.intern("package")
    package_val_idx = b.intern(package)

    elements = []
    for element_name, value in permission_elements:
        el_idx = b.intern(element_name)
        if isinstance(value, str):
            val_idx = b.intern(value)
            elements.append((el_idx, [(ns_idx, name_idx, val_idx, TYPE_STRING, val_idx)]))
        elif isinstance(value, int):
            elements.append((el_idx, [(ns_idx, name_idx, 0xFFFFFFFF, TYPE_INT_DEC, value)]))
        else:
            elements.append((el_idx, []))

    chunks = [b.start_ns(android_idx, ns_idx)]
    chunks.append(b.start_element(
        manifest_idx,
        [(0xFFFFFFFF, package_attr_idx, package_val_idx, TYPE_STRING, package_val_idx)]))
    for el_idx, attrs in elements:
        chunks.append(b.start_element(el_idx, attrs))
        chunks.append(b.end_element(el_idx))
    chunks.append(b.end_element(manifest_idx))
    chunks.append(b.end_ns(android_idx, ns_idx))
    return b.document(chunks)


def build_empty_manifest():
    b = AxmlBuilder()
    manifest_idx = b.intern("manifest")
    return b.document([b.start_element(manifest_idx), b.end_element(manifest_idx)])


# ---------------------------------------------------------------------------
# Decoder (the oracle)
# ---------------------------------------------------------------------------

def _decode_pool(buf, pos, size):
    header_size, = struct.unpack_from("<H", buf, pos + 2)
    count, _styles, flags, strings_start, _ = struct.unpack_from("<IIIII", buf, pos + 8)
    utf8 = bool(flags & (1 << 8))
    pool = []
    for i in range(count):
        rel, = struct.unpack_from("<I", buf, pos + header_size + 4 * i)
        off = pos + strings_start + rel
        if utf8:
            if buf[off] & 0x80:
                off += 2
            else:
                off += 1
            blen = buf[off]
            if blen & 0x80:
                blen = ((blen & 0x7F) << 8) | buf[off + 1]
                off += 2
            else:
                off += 1
            pool.append(buf[off:off + blen].decode("utf-8"))
        else:
            units, = struct.unpack_from("<H", buf, off)
            off += 2
            if units & 0x8000:
                extra, = struct.unpack_from("<H", buf, off)
                units = ((units & 0x7FFF) << 16) | extra
                off += 2
            pool.append(buf[off:off + 2 * units].decode("utf-16-le"))
    return pool


def decode_permissions(buf):
    """Returns (package, [permission...]) — document order, first kept."""
    ctype, _hs, total = struct.unpack_from("<HHI", buf, 0)
    if ctype != RES_XML:
        raise ValueError("not binary XML")
    pool, res_map = [], []
    package, perms, seen = "", [], set()
    pos = 8
    while pos + 8 <= total:
        ctype, header_size, size = struct.unpack_from("<HHI", buf, pos)
        if ctype == RES_STRING_POOL:
            pool = _decode_pool(buf, pos, size)
        elif ctype == RES_XML_RESOURCE_MAP:
            n = (size - header_size) // 4
            res_map = list(struct.unpack_from("<%dI" % n, buf, pos + header_size))
        elif ctype == RES_XML_START_EL:
            body = pos + header_size
            _ns, name_idx, attr_start, attr_size, attr_count = struct.unpack_from(
                "<IIHHH", buf, body)
            local = pool[name_idx] if name_idx < len(pool) else ""
            for a in range(attr_count):
                ap = body + attr_start + a * attr_size
                ans, aname, raw = struct.unpack_from("<III", buf, ap)
                _sz, _res0, dtype, data = struct.unpack_from("<HBBI", buf, ap + 12)
                is_name = (aname < len(pool) and pool[aname] == "name") or \
                          (aname < len(res_map) and res_map[aname] == ATTR_NAME_RES_ID)
                value = None
                if raw != 0xFFFFFFFF:
                    value = pool[raw]
                elif dtype == TYPE_STRING:
                    value = pool[data]
                if local == "manifest" and aname < len(pool) and pool[aname] == "package":
                    package = value or ""
                if local in ("uses-permission", "uses-permission-sdk-23") and is_name:
                    if value is not None and value not in seen:
                        seen.add(value)
                        perms.append(value)
        pos += size
    return package, perms


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

def write(name, data):
    with open(os.path.join(HERE, name), "wb") as f:
        f.write(data)
    print("wrote %-24s %6d bytes" % (name, len(data)))


def write_expected(name, axml_bytes):
    package, perms = decode_permissions(axml_bytes)
    text = "".join(p + "\n" for p in perms)
    with open(os.path.join(HERE, name), "w", newline="\n") as f:
        f.write(text)
    print("wrote %-24s %r, %d permissions" % (name, package, len(perms)))


def make_apk(name, manifest, extra_entries=True, compress=zipfile.ZIP_DEFLATED):
    path = os.path.join(HERE, name)
    with zipfile.ZipFile(path, "w") as z:
        if extra_entries:
            z.writestr(zipfile.ZipInfo("classes.dex"), b"dex\n035\x00" + b"\x00" * 64,
                       zipfile.ZIP_DEFLATED)
        if manifest is not None:
            z.writestr(zipfile.ZipInfo("AndroidManifest.xml"), manifest, compress)
        if extra_entries:
            z.writestr(zipfile.ZipInfo("res/values/strings.xml"), b"<resources/>\n",
                       zipfile.ZIP_DEFLATED)
    print("wrote %-24s" % name)
    with open(path, "rb") as f:
        return f.read()


def main():
    send_sms = build_manifest("com.example.sms",
                              [("uses-permission", "android.permission.SEND_SMS")])
    multi = build_manifest("com.example.multi", [
        ("uses-permission", "android.permission.SEND_SMS"),
        ("uses-permission", "android.permission.INTERNET"),
        ("uses-permission", "android.permission.SEND_SMS"),  # duplicate
        ("uses-permission-sdk-23", "android.permission.ACCESS_FINE_LOCATION"),
        ("uses-permission", "com.mediatek.permission.ACCESS_MTK_MMHW"),
    ])
    utf8 = build_manifest("com.example.utf8",
                          [("uses-permission", "android.permission.SEND_SMS"),
                           ("uses-permission", "android.permission.RECEIVE_SMS")],
                          utf8_pool=True)
    odd = build_manifest("com.example.odd", [
        ("uses-permission", 42),  # android:name is an int, not a string
        ("uses-permission", None),  # no name attribute at all
        ("uses-permission", "android.permission.READ_PHONE_STATE"),
    ])

    write("minimal.axml", build_empty_manifest())
    write("send_sms.axml", send_sms)
    write("multi.axml", multi)
    write("utf8pool.axml", utf8)
    write("odd.axml", odd)

    write_expected("send_sms.perms.expected", send_sms)
    write_expected("multi.perms.expected", multi)
    write_expected("utf8pool.perms.expected", utf8)
    write_expected("odd.perms.expected", odd)

    # Wrong leading chunk type.
    bad = bytearray(send_sms)
    bad[0:2] = struct.pack("<H", 0x0000)
    write("badmagic.axml", bytes(bad))

    # Declared file size exceeds the actual bytes.
    write("truncated.axml", send_sms[: len(send_sms) - 16])

    # APKs. zipfile is the independent DEFLATE/CRC producer.
    make_apk("stored.apk", send_sms, compress=zipfile.ZIP_STORED)
    make_apk("deflated.apk", send_sms)
    make_apk("multi.apk", multi)
    make_apk("utf8.apk", utf8)
    make_apk("odd.apk", odd)
    make_apk("no_manifest.apk", None)
    make_apk("bzip2.apk", send_sms, compress=zipfile.ZIP_BZIP2)

    # Flip a byte inside the stored manifest payload without touching the
    # recorded CRC: guaranteed checksum mismatch.
    stored = bytearray(make_apk("bad_crc.apk", send_sms, compress=zipfile.ZIP_STORED))
    payload = stored.find(send_sms)
    assert payload > 0
    stored[payload + len(send_sms) - 3] ^= 0xFF
    write("bad_crc.apk", bytes(stored))

    write("notazip.bin", b"this is not an archive, just a text file\n" * 3)

    # The raw manifest bytes let tests compare open_apk output byte-for-byte.
    write("send_sms.axml.bin", send_sms)


if __name__ == "__main__":
    main()
