#!/usr/bin/env python3
"""Route a two-block Bell circuit onto a heavy-hex coupling graph.

Builds the repetition-code Bell experiment, maps it onto a line through the
graph with the first few logical pairs interleaved, and prints native-CX
statistics before and after SWAP insertion.
"""

import argparse

from qedet.codes import repetition_code
from qedet.encode import build_experiment_circuit
from qedet.route import circuit_stats, find_line, heavy_hex_graph, route_circuit


def interleaved_line_layout(line, pairs: int, n: int):
    b0, b1 = [0] * n, [0] * n
    for i in range(pairs):
        b0[i], b1[i] = line[2 * i], line[2 * i + 1]
    nxt = 2 * pairs
    for block in (b0, b1):
        for i in range(pairs, n):
            block[i] = line[nxt]
            nxt += 1
    return tuple(b0 + b1)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--distance", type=int, default=7)
    ap.add_argument("--rows", type=int, default=2)
    ap.add_argument("--cols", type=int, default=2)
    ap.add_argument("--interleaved-pairs", type=int, default=3)
    args = ap.parse_args()

    exp = build_experiment_circuit("bell", repetition_code(args.distance), 0, "ZZ")
    width = exp.circuit.n_qubits
    g = heavy_hex_graph(args.rows, args.cols)
    layout = interleaved_line_layout(find_line(g, width),
                                     args.interleaved_pairs, args.distance)

    before = circuit_stats(exp.circuit, mode="native-CX")
    routed = route_circuit(exp.circuit, g, layout)
    after = circuit_stats(routed.circuit, mode="native-CX")

    print(f"heavy-hex {args.rows}x{args.cols}: {g.n_nodes} nodes; "
          f"circuit width {width}")
    print(f"{'':>12} {'2q gates':>9} {'depth':>6} {'swaps':>6}")
    print(f"{'unrouted':>12} {before['two_qubit_count']:>9} "
          f"{before['depth']:>6} {'-':>6}")
    print(f"{'routed':>12} {after['two_qubit_count']:>9} "
          f"{after['depth']:>6} {routed.swap_count:>6}")


if __name__ == "__main__":
    main()
