"""Independent step-by-step oracle for the small-parameter "Hi" envelope.

Recomputes every stage from the formulas with Python integers and the
standard library only; its output is frozen into test_m2fe.cpp.
"""
import hashlib
import math

alphabet = ("0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"
            " !\"#%&'()*+,-./:;<=>?@$^_[\\]`~{|}")
assert len(alphabet) == 95
c2i = {ch: i + 1 for i, ch in enumerate(alphabet)}

m, e, N, k, S, T = "Hi", 17, 3233, 3, 10, 7
A = "".join(f"{c2i[ch]:02d}" for ch in m)
chunks = [A[i:i + k] for i in range(0, len(A), k)]
D = len(str(N))
cipher = [str(pow(int(ch), e, N)).zfill(D) for ch in chunks]

def dumgen(left, right):
    a, b = len(left), len(right)
    lam = int(math.floor(math.sqrt((a + b) ** 2 / (a * b)) + 0.5))
    delta = (lam * S) % T
    psi = 1 + ((lam + S % (S - T)) % 2)
    src = right if lam % 2 == 1 else left
    delta = min(delta, len(src))
    return src[:delta] if psi == 1 else src[len(src) - delta:]

stream = cipher[0]
for i in range(1, len(cipher)):
    stream += dumgen(cipher[i - 1], cipher[i]) + cipher[i]

bits = "".join(f"{int(d):04b}" for d in stream)
dk_val = math.floor(math.log(S) * T * T + math.log(T) * S * S)
dk = bin(dk_val)[2:]
z = "".join(str(int(b) ^ int(dk[i % len(dk)])) for i, b in enumerate(bits))
rule0 = {"00": "A", "01": "C", "10": "G", "11": "T"}
bases = "".join(rule0[z[i:i + 2]] for i in range(0, len(z), 2))

code = {"A": 0, "C": 1, "G": 2, "T": 3}
packed = bytearray()
for i in range(0, len(bases), 4):
    group = bases[i:i + 4]
    v = 0
    for ch in group:
        v = v << 2 | code[ch]
    v <<= 2 * (4 - len(group))
    packed.append(v)

env = b"CSEC" + bytes([1]) + k.to_bytes(2, "big") + D.to_bytes(2, "big")
env += len(A).to_bytes(8, "big") + (2 * len(bases)).to_bytes(8, "big") + bytes(packed)

print("A", A)
print("chunks", chunks)
print("cipher", cipher)
print("stream", stream)
print("dk", dk_val, dk)
print("bases", bases)
print("envelope", env.hex())
print("sha256", hashlib.sha256(env).hexdigest())
