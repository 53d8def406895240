#!/usr/bin/env python3
"""Builds tests/data/decode_fixture.txt.

Random instructions are written in canonical assembly, assembled by clang
(--target=riscv32), and each encoding is paired with the expected
disassembly. Compressed forms are paired with the disassembly of their
32-bit expansion.

usage: gen_decode_fixture.py [out] [--seed N] [--count N]
"""
import argparse
import os
import random
import struct
import subprocess
import sys
import tempfile

BASE32 = ["add", "sub", "sll", "slt", "sltu", "xor", "srl", "sra", "or", "and",
          "mul", "mulh", "mulhsu", "mulhu", "div", "divu", "rem", "remu"]
IMM = ["addi", "slti", "sltiu", "xori", "ori", "andi"]
SHIFT = ["slli", "srli", "srai"]
LOADS = ["lb", "lh", "lw", "lbu", "lhu"]
STORES = ["sb", "sh", "sw"]
BRANCHES = ["beq", "bne", "blt", "bge", "bltu", "bgeu"]
CSR_REG = ["csrrw", "csrrs", "csrrc"]
CSR_IMM = ["csrrwi", "csrrsi", "csrrci"]
CSRS = [0x300, 0x301, 0x304, 0x305, 0x340, 0x341, 0x342, 0x343, 0x344, 0xB00, 0xB02, 0xC00, 0xC01, 0xC02,
        0xB80, 0xB82, 0xC80, 0xC81, 0xC82, 0xF11, 0xF14]


def r(rng):
    return rng.randrange(32)


def gen32(rng):
    k = rng.randrange(11)
    if k == 0:
        op = rng.choice(BASE32)
        d, a, b = r(rng), r(rng), r(rng)
        line = f"{op} x{d}, x{a}, x{b}"
        return line, line
    if k == 1:
        op = rng.choice(IMM)
        d, a, imm = r(rng), r(rng), rng.randrange(-2048, 2048)
        line = f"{op} x{d}, x{a}, {imm}"
        return line, line
    if k == 2:
        op = rng.choice(SHIFT)
        d, a, sh = r(rng), r(rng), rng.randrange(32)
        line = f"{op} x{d}, x{a}, {sh}"
        return line, line
    if k == 3:
        op = rng.choice(LOADS)
        d, a, imm = r(rng), r(rng), rng.randrange(-2048, 2048)
        line = f"{op} x{d}, {imm}(x{a})"
        return line, line
    if k == 4:
        op = rng.choice(STORES)
        s, a, imm = r(rng), r(rng), rng.randrange(-2048, 2048)
        line = f"{op} x{s}, {imm}(x{a})"
        return line, line
    if k == 5:
        op = rng.choice(BRANCHES)
        a, b, off = r(rng), r(rng), rng.randrange(-2048, 2048) * 2
        line = f"{op} x{a}, x{b}, {off}"
        return line, line
    if k == 6:
        d, off = r(rng), rng.randrange(-(1 << 19), 1 << 19) * 2
        line = f"jal x{d}, {off}"
        return line, line
    if k == 7:
        d, a, imm = r(rng), r(rng), rng.randrange(-2048, 2048)
        line = f"jalr x{d}, {imm}(x{a})"
        return line, line
    if k == 8:
        op = rng.choice(["lui", "auipc"])
        d, imm = r(rng), rng.randrange(1 << 20)
        line = f"{op} x{d}, {imm}"
        return line, line
    if k == 9:
        csr = rng.choice(CSRS)
        d = r(rng)
        if rng.randrange(2):
            op = rng.choice(CSR_REG)
            a = r(rng)
            return f"{op} x{d}, {csr:#x}, x{a}", f"{op} x{d}, {csr:#x}, x{a}"
        op = rng.choice(CSR_IMM)
        u = rng.randrange(32)
        return f"{op} x{d}, {csr:#x}, {u}", f"{op} x{d}, {csr:#x}, {u}"
    op = rng.choice(["fence", "fence.i", "ecall", "ebreak", "mret", "wfi"])
    return op, op


def rc(rng):
    return 8 + rng.randrange(8)


def nz(rng, lo, hi):
    while True:
        v = rng.randrange(lo, hi)
        if v != 0:
            return v


def gen16(rng):
    k = rng.randrange(24)
    if k == 0:
        d, imm = rc(rng), rng.randrange(1, 256) * 4
        return f"c.addi4spn x{d}, x2, {imm}", f"addi x{d}, x2, {imm}"
    if k == 1:
        d, a, off = rc(rng), rc(rng), rng.randrange(32) * 4
        return f"c.lw x{d}, {off}(x{a})", f"lw x{d}, {off}(x{a})"
    if k == 2:
        s, a, off = rc(rng), rc(rng), rng.randrange(32) * 4
        return f"c.sw x{s}, {off}(x{a})", f"sw x{s}, {off}(x{a})"
    if k == 3:
        return "c.nop", "addi x0, x0, 0"
    if k == 4:
        d, imm = nz(rng, 1, 32), nz(rng, -32, 32)
        return f"c.addi x{d}, {imm}", f"addi x{d}, x{d}, {imm}"
    if k == 5:
        off = rng.randrange(-1024, 1024) * 2
        return f"c.jal {off}", f"jal x1, {off}"
    if k == 6:
        d, imm = nz(rng, 1, 32), rng.randrange(-32, 32)
        return f"c.li x{d}, {imm}", f"addi x{d}, x0, {imm}"
    if k == 7:
        imm = nz(rng, -32, 32) * 16
        return f"c.addi16sp x2, {imm}", f"addi x2, x2, {imm}"
    if k == 8:
        d = rng.choice([x for x in range(1, 32) if x != 2])
        imm = rng.choice([rng.randrange(1, 32), rng.randrange(0xFFFE0, 0x100000)])
        return f"c.lui x{d}, {imm}", f"lui x{d}, {imm}"
    if k in (9, 10):
        op = "srli" if k == 9 else "srai"
        d, sh = rc(rng), rng.randrange(1, 32)
        return f"c.{op} x{d}, {sh}", f"{op} x{d}, x{d}, {sh}"
    if k == 11:
        d, imm = rc(rng), rng.randrange(-32, 32)
        return f"c.andi x{d}, {imm}", f"andi x{d}, x{d}, {imm}"
    if k == 12:
        op = rng.choice(["sub", "xor", "or", "and"])
        d, s = rc(rng), rc(rng)
        return f"c.{op} x{d}, x{s}", f"{op} x{d}, x{d}, x{s}"
    if k == 13:
        off = rng.randrange(-1024, 1024) * 2
        return f"c.j {off}", f"jal x0, {off}"
    if k in (14, 15):
        op = "beq" if k == 14 else "bne"
        a, off = rc(rng), rng.randrange(-128, 128) * 2
        return f"c.{op}z x{a}, {off}", f"{op} x{a}, x0, {off}"
    if k == 16:
        d, sh = nz(rng, 1, 32), rng.randrange(1, 32)
        return f"c.slli x{d}, {sh}", f"slli x{d}, x{d}, {sh}"
    if k == 17:
        d, off = nz(rng, 1, 32), rng.randrange(64) * 4
        return f"c.lwsp x{d}, {off}(x2)", f"lw x{d}, {off}(x2)"
    if k == 18:
        a = nz(rng, 1, 32)
        return f"c.jr x{a}", f"jalr x0, 0(x{a})"
    if k == 19:
        d, s = nz(rng, 1, 32), nz(rng, 1, 32)
        return f"c.mv x{d}, x{s}", f"add x{d}, x0, x{s}"
    if k == 20:
        return "c.ebreak", "ebreak"
    if k == 21:
        a = nz(rng, 1, 32)
        return f"c.jalr x{a}", f"jalr x1, 0(x{a})"
    if k == 22:
        d, s = nz(rng, 1, 32), nz(rng, 1, 32)
        return f"c.add x{d}, x{s}", f"add x{d}, x{d}, x{s}"
    s, off = rng.randrange(32), rng.randrange(64) * 4
    return f"c.swsp x{s}, {off}(x2)", f"sw x{s}, {off}(x2)"


def text_section(path):
    data = open(path, "rb").read()
    if data[:4] != b"\x7fELF" or data[4] != 1:
        raise SystemExit("expected an ELF32 object")
    shoff, = struct.unpack_from("<I", data, 32)
    shentsize, shnum, shstrndx = struct.unpack_from("<HHH", data, 46)
    sections = [struct.unpack_from("<IIIIIIIIII", data, shoff + i * shentsize) for i in range(shnum)]
    strtab = sections[shstrndx]
    for sec in sections:
        name_end = data.index(b"\0", strtab[4] + sec[0])
        if data[strtab[4] + sec[0]:name_end] == b".text":
            return data[sec[4]:sec[4] + sec[5]]
    raise SystemExit("no .text section")


def assemble(lines, march, clang):
    with tempfile.TemporaryDirectory() as tmp:
        src = os.path.join(tmp, "in.s")
        obj = os.path.join(tmp, "in.o")
        with open(src, "w") as f:
            f.write(".option norelax\n")
            if "c" not in march[4:]:
                f.write(".option norvc\n")
            f.write("\n".join(lines) + "\n")
        subprocess.run([clang, "--target=riscv32", f"-march={march}", "-c", src, "-o", obj], check=True)
        return text_section(obj)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out", nargs="?", default=os.path.join(os.path.dirname(__file__), "..", "data",
                                                           "decode_fixture.txt"))
    ap.add_argument("--seed", type=int, default=20240607)
    ap.add_argument("--count", type=int, default=4000)
    ap.add_argument("--clang", default="clang")
    args = ap.parse_args()
    rng = random.Random(args.seed)

    wide = [gen32(rng) for _ in range(args.count)]
    narrow = [gen16(rng) for _ in range(args.count // 2)]
    text32 = assemble([a for a, _ in wide], "rv32im", args.clang)
    text16 = assemble([a for a, _ in narrow], "rv32imc", args.clang)
    if len(text32) != 4 * len(wide) or len(text16) != 2 * len(narrow):
        raise SystemExit("unexpected .text size; an instruction was relaxed or expanded")

    with open(args.out, "w") as f:
        f.write(f"# clang-assembled decode fixture (seed {args.seed}); <encoding> <disassembly>\n")
        for i, (_, dis) in enumerate(wide):
            word, = struct.unpack_from("<I", text32, 4 * i)
            f.write(f"{word:08x} {dis}\n")
        for i, (_, dis) in enumerate(narrow):
            half, = struct.unpack_from("<H", text16, 2 * i)
            f.write(f"{half:04x} {dis}\n")
    print(f"wrote {len(wide) + len(narrow)} entries to {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
