#!/usr/bin/env python3
"""Independent brute-force oracle for the frozen values in the C++ unit tests.

Builds the pipe-delimited encoding by hand (string formatting, no shared code
with the C++ serializer) and hashes it with hashlib.
"""
import hashlib

ZERO = "0" * 64


def sha(s: str) -> str:
    return hashlib.sha256(s.encode("utf-8")).hexdigest()


def data_payload(digest: str) -> str:
    return '{"fields":{"digest":"%s"},"kind":"data"}' % digest


def encode(nonce, index, ts, payload, prev):
    return "%d|%d|%d|%s|%s" % (nonce, index, ts, payload, prev)


def mine(index, ts, payload, prev, difficulty):
    nonce = 0
    while True:
        h = sha(encode(nonce, index, ts, payload, prev))
        if h.startswith("0" * difficulty):
            return nonce, h
        nonce += 1


if __name__ == "__main__":
    print("empty", sha(""))
    print("abc", sha("abc"))
    d = sha("abc")
    p = "f" * 64
    print("encoding_7_3", encode(7, 3, 1500000000, data_payload(d), p))
    for diff in (1, 2, 3):
        print("mine d=%d" % diff, mine(1, 1500000000, data_payload(d), ZERO, diff))
    # aggr over AGB + one data block mined at difficulty 1
    _, h1 = mine(1, 1500000000, data_payload(d), ZERO, 1)
    print("aggr_agb_plus_one", sha(ZERO + h1))
    # meta-bearing payload
    meta = '{"fields":{"digest":"%s","meta":{"file_name":"app.log","ts_from":10,"ts_to":20}},"kind":"data"}' % d
    print("mine meta d=2", mine(5, 1600000000, meta, p, 2))
