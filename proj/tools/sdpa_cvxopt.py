#!/usr/bin/env python3
"""Solve an SDPA sparse (.dat-s) problem with CVXOPT and write x one value per line.

    minimize c.x  subject to  sum_i x_i F_i - F_0  PSD (negative block size = diagonal)

Exit status 3 when cvxopt is not installed, 1 when the solver does not report optimal.
"""
import argparse
import sys


def read_sdpa(path):
    lines = []
    with open(path) as fh:
        for raw in fh:
            s = raw.strip()
            if not s or s[0] in '"*':
                continue
            for ch in ",{}()":
                s = s.replace(ch, " ")
            lines.append(s.split())
    m = int(lines[0][0])
    nblocks = int(lines[1][0])
    sizes = [int(v) for v in lines[2][:nblocks]]
    c = [float(v) for v in lines[3][:m]]
    entries = [(int(a), int(b), int(i), int(j), float(v)) for a, b, i, j, v in lines[4:]]
    return m, sizes, c, entries


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("problem")
    ap.add_argument("solution")
    ap.add_argument("--tol", type=float, default=1e-9)
    args = ap.parse_args()
    try:
        from cvxopt import matrix, solvers, spmatrix
    except ImportError:
        print("cvxopt not available", file=sys.stderr)
        return 3

    m, sizes, c, entries = read_sdpa(args.problem)
    lp = [b for b, s in enumerate(sizes) if s < 0]
    lp_offset = {}
    total = 0
    for b in lp:
        lp_offset[b] = total
        total += -sizes[b]

    # Per PSD block: column-major vec of the full symmetric matrix.
    gs = {b: ([], [], []) for b, s in enumerate(sizes) if s > 0}
    hs = {b: [0.0] * (s * s) for b, s in enumerate(sizes) if s > 0}
    gl = ([], [], [])
    hl = [0.0] * total
    for mat, blk, i, j, v in entries:
        b = blk - 1
        if sizes[b] < 0:
            row = lp_offset[b] + i - 1
            if mat == 0:
                hl[row] -= v
            else:
                gl[0].append(-v); gl[1].append(row); gl[2].append(mat - 1)
            continue
        n = sizes[b]
        cells = {(i - 1) + (j - 1) * n, (j - 1) + (i - 1) * n}
        for cell in cells:
            if mat == 0:
                hs[b][cell] -= v
            else:
                gs[b][0].append(-v); gs[b][1].append(cell); gs[b][2].append(mat - 1)

    solvers.options.update(show_progress=False, abstol=args.tol, reltol=args.tol, feastol=args.tol, maxiters=200)
    kwargs = {}
    if total:
        kwargs["Gl"] = spmatrix(gl[0], gl[1], gl[2], (total, m))
        kwargs["hl"] = matrix(hl)
    blocks = sorted(gs)
    kwargs["Gs"] = [spmatrix(gs[b][0], gs[b][1], gs[b][2], (sizes[b] ** 2, m)) for b in blocks]
    kwargs["hs"] = [matrix(hs[b], (sizes[b], sizes[b])) for b in blocks]
    sol = solvers.sdp(matrix(c), **kwargs)
    with open(args.solution, "w") as fh:
        for v in sol["x"]:
            fh.write("%.17g\n" % v)
    print(sol["status"], "%.17g" % sol["primal objective"])
    return 0 if sol["status"] == "optimal" else 1


if __name__ == "__main__":
    sys.exit(main())
